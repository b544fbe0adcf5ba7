"""Simulate the fig1 task set under each global policy and under the clustered split.

Usage: python scripts/fig1_schedules.py [--horizon 6] [--traces DIR]
"""

import argparse
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from mprkit.model import Policy
from mprkit.project import load
from mprkit.simulator import simulate_global
from mprkit.cli import run_scenario


@dataclass
class Config:
    horizon: int = 6
    m: int = 4
    traces: Optional[Path] = None


def gantt(trace, width):
    rows = {}
    for (task, _), pieces in sorted(trace.execution_intervals().items()):
        line = rows.setdefault(task, [" "] * width)
        for a, b, p in pieces:
            for x in range(int(a), min(width, int(-(-b // 1)))):
                line[x] = str(p)
    return "\n".join(f"  {task:>5} |{''.join(line)}|" for task, line in rows.items())


def main(cfg: Config) -> None:
    p = load("fig1")
    ts = p.taskset("fig1")
    runs = [(pol.value, simulate_global(ts, cfg.m, pol, horizon=cfg.horizon))
            for pol in (Policy.GEDF, Policy.EDZL, Policy.LLF, Policy.FPEDF, Policy.USEDF)]
    runs.append(("clustered", run_scenario(p, "fig1-clustered", cfg.horizon)))
    for name, trace in runs:
        missed = ", ".join(f"{t}@{d}" for t, d in trace.misses) or "none"
        print(f"{name}: misses {missed}; preemptions {trace.preemptions}")
        print(gantt(trace, cfg.horizon))
        if cfg.traces:
            cfg.traces.mkdir(parents=True, exist_ok=True)
            (cfg.traces / f"{name}.csv").write_text(trace.to_csv())


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--horizon", type=int, default=6)
    ap.add_argument("--traces", type=Path)
    a = ap.parse_args()
    main(Config(horizon=a.horizon, traces=a.traces))
