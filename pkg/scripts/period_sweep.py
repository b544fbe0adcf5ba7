"""Minimum bandwidth per period and processor count for every table1 cluster, as CSV.

Usage: python scripts/period_sweep.py [--out sweep.csv] [--jobs 4]
"""

import argparse
import csv
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from mprkit.cli import VARIANTS, dec
from mprkit.interface import min_capacity
from mprkit.model import fmt_rat
from mprkit.project import load


@dataclass
class Config:
    periods: Sequence[int] = tuple(range(1, 13))
    mprimes: Sequence[int] = (1, 2, 3)
    variant: str = "lsbf"
    jobs: int = 1


def probe(job):
    name, Pi, m, variant = job
    ts = load("table1").cluster(name).taskset
    return name, Pi, m, min_capacity(ts, Pi, m, VARIANTS[variant])


def main(cfg: Config, out) -> None:
    p = load("table1")
    jobs = [(c, Pi, m, cfg.variant) for c in p.clusters for m in cfg.mprimes for Pi in cfg.periods]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            rows = list(pool.map(probe, jobs))
    else:
        rows = [probe(j) for j in jobs]
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["cluster", "Pi", "mprime", "Theta", "bandwidth", "bandwidth_decimal"])
    for name, Pi, m, theta in rows:
        if theta is None:
            w.writerow([name, Pi, m, "", "", "infeasible"])
        else:
            bw = Fraction(theta) / Pi
            w.writerow([name, Pi, m, fmt_rat(theta), fmt_rat(bw), dec(bw)])


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--variant", choices=sorted(VARIANTS), default="lsbf")
    a = ap.parse_args()
    cfg = Config(variant=a.variant, jobs=a.jobs)
    if a.out:
        with open(a.out, "w") as fh:
            main(cfg, fh)
    else:
        main(cfg, sys.stdout)
