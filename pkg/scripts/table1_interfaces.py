"""Interfaces, server tasks and the composed interface for the table1 project.

Usage: python scripts/table1_interfaces.py [--variant lsbf|exact|improved]
"""

import argparse
from dataclasses import dataclass

from mprkit.cli import VARIANTS, dec
from mprkit.inter_cluster import compose_gedf
from mprkit.interface import InfeasibleInterfaceError, min_processors
from mprkit.project import load
from mprkit.transform import Rounding, transform_def2


@dataclass
class Config:
    variant: str = "lsbf"
    compose_periods: range = range(1, 13)
    m_cap: int = 6


def main(cfg: Config) -> None:
    p = load("table1")
    variant = VARIANTS[cfg.variant]
    sets = []
    for name, Pi in p.analysis.composition:
        res = min_processors(p.cluster(name).taskset, Pi, variant, resolution=p.analysis.resolution)
        g = res.model
        servers = transform_def2(g, Rounding.CEIL, prefix=f"{name}.")
        sets.append(servers)
        tasks = ", ".join(f"({t.period},{t.wcet},{t.deadline})" for t in servers.tasks)
        print(f"{name}: Pi={Pi} m*={g.mprime} Theta={dec(g.Theta, 2)} servers {{{tasks}}}")
    for Pi in cfg.compose_periods:
        try:
            g = compose_gedf(sets, Pi, variant, m_cap=cfg.m_cap).model
            print(f"composed Pi={Pi}: m'={g.mprime} bandwidth={dec(g.bandwidth)}")
        except InfeasibleInterfaceError:
            print(f"composed Pi={Pi}: infeasible up to {cfg.m_cap} processors")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--variant", choices=sorted(VARIANTS), default=Config.variant)
    ap.add_argument("--m-cap", type=int, default=Config.m_cap)
    a = ap.parse_args()
    main(Config(variant=a.variant, m_cap=a.m_cap))
