"""Command-line front end.

Exit codes: 0 success (or schedulable), 1 a negative verdict, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import List, Optional, Sequence

from . import project as proj
from .algorithms import Unschedulable, usedf_vc_build, vcidt_build, vcidt_preemption_bound
from .inter_cluster import compose_gedf
from .interface import InfeasibleInterfaceError, min_capacity, min_processors, processor_range
from .model import MprModel, Rat, exact, fmt_rat
from .schedulability import is_schedulable
from .simulator import dedicated_table, simulate_global, simulate_hierarchical
from .supply import SupplyVariant
from .transform import Rounding, transform_def2, transform_def3, validate_transformation

VARIANTS = {"exact": SupplyVariant.EXACT, "lsbf": SupplyVariant.LINEAR_LOWER, "improved": SupplyVariant.IMPROVED}


class InputError(Exception):
    pass


def dec(x: Rat, places: int = 4) -> str:
    """Fixed-point rendering of an exact value (round half up)."""
    q = Fraction(x) * 10**places
    sign = "-" if q < 0 else ""
    q = abs(q)
    n = (q.numerator * 2 + q.denominator) // (2 * q.denominator)
    if n == 0:
        sign = ""
    whole, frac = divmod(n, 10**places)
    return f"{sign}{whole}.{frac:0{places}d}" if places else f"{sign}{whole}"


def _rat_arg(text: str) -> Rat:
    try:
        return exact(Fraction(text))
    except (ValueError, ZeroDivisionError) as err:
        raise argparse.ArgumentTypeError(f"not a number: {text}") from err


def _model_arg(text: str) -> MprModel:
    parts = [p.strip() for p in text.strip("<>() ").split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("model must be Pi,Theta,m")
    try:
        return MprModel(int(parts[0]), exact(Fraction(parts[1])), int(parts[2]))
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from err


def _range_arg(text: str) -> List[int]:
    if not text:
        return []
    out = []
    for part in text.split(","):
        if ".." in part:
            a, b = part.split("..")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return out


def _variant(args, p) -> SupplyVariant:
    return VARIANTS[args.variant] if args.variant else p.analysis.variant


def _resolution(args, p) -> Rat:
    return args.resolution if args.resolution is not None else p.analysis.resolution


def _emit(obj, out) -> None:
    out.write(json.dumps(obj, indent=1) + "\n")


def _interface_json(name, Pi, res, variant) -> dict:
    m = res.model
    return {
        "cluster": name,
        "Pi": Pi,
        "variant": variant.value,
        "mprime": m.mprime,
        "Theta": fmt_rat(m.Theta),
        "Theta_decimal": dec(m.Theta, 2),
        "bandwidth": fmt_rat(m.bandwidth),
        "bandwidth_decimal": dec(m.bandwidth),
        "m_range_searched": list(res.m_range_searched),
        "per_m": {str(k): (None if v is None else fmt_rat(v)) for k, v in res.per_m_bandwidth},
    }


# -- commands ----------------------------------------------------------------


def cmd_analyze(args, out) -> int:
    p = proj.load(args.project)
    c = p.cluster(args.cluster)
    variant = VARIANTS[args.variant] if args.variant else SupplyVariant.EXACT
    verdict = is_schedulable(c.taskset, args.model, variant)
    report = {"cluster": args.cluster, "model": str(args.model), "variant": variant.value, "schedulable": bool(verdict)}
    if verdict.witness is not None:
        w = verdict.witness
        report["witness"] = {"task": c.taskset[w.k].label, "A_k": fmt_rat(w.A_k), "demand": fmt_rat(w.demand), "supply": fmt_rat(w.supply)}
    _emit(report, out)
    return 0 if verdict else 1


def cmd_interface(args, out) -> int:
    p = proj.load(args.project)
    c = p.cluster(args.cluster)
    variant = _variant(args, p)
    try:
        res = min_processors(c.taskset, args.Pi, variant, args.m_cap, _resolution(args, p))
    except InfeasibleInterfaceError as err:
        _emit({"cluster": args.cluster, "Pi": args.Pi, "variant": variant.value, "feasible": False, "error": str(err)}, out)
        return 1
    _emit(_interface_json(args.cluster, args.Pi, res, variant), out)
    return 0


def _sweep_row(job):
    ts, Pi, m, variant, resolution = job
    return Pi, m, min_capacity(ts, Pi, m, variant, resolution)


def cmd_sweep(args, out) -> int:
    p = proj.load(args.project)
    c = p.cluster(args.cluster)
    variant = _variant(args, p)
    periods = args.periods if args.periods is not None else list(p.analysis.periods)
    ms = args.mprimes or list(range(*(lambda r: (r[0], r[1] + 1))(processor_range(c.taskset, args.m_cap))))
    jobs = [(c.taskset, Pi, m, variant, _resolution(args, p)) for m in ms for Pi in periods]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_sweep_row, jobs))
    else:
        rows = [_sweep_row(j) for j in jobs]
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["Pi", "mprime", "Theta", "bandwidth", "bandwidth_decimal", "status"])
    for Pi, m, theta in sorted(rows, key=lambda r: (r[1], r[0])):
        if theta is None:
            w.writerow([Pi, m, "", "", "", "infeasible"])
        else:
            bw = exact(Fraction(theta) / Pi)
            w.writerow([Pi, m, fmt_rat(theta), fmt_rat(bw), dec(bw), "feasible"])
    return 0


def _servers_out(sets, fmt, out) -> None:
    rows = [(s.source, t) for s in sets for t in s.tasks]
    if fmt == "json":
        _emit([{"interface": str(src), "label": t.label, "T": t.period, "C": fmt_rat(t.wcet), "D": t.deadline} for src, t in rows], out)
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["interface", "label", "T", "C", "D"])
        for src, t in rows:
            w.writerow([str(src), t.label, t.period, fmt_rat(t.wcet), t.deadline])


def cmd_transform(args, out) -> int:
    if args.definition == "def3":
        sts = transform_def3(args.model)
    else:
        sts = transform_def2(args.model, Rounding(args.rounding))
    validate_transformation(sts)
    _servers_out([sts], args.format, out)
    return 0


def _composition_inputs(args, p):
    pairs = list(p.analysis.composition)
    if args.clusters:
        pairs = []
        for part in args.clusters.split(","):
            name, _, Pi = part.partition(":")
            pairs.append((name, int(Pi)))
    if not pairs:
        raise InputError("no clusters to compose (use --clusters NAME:PI,...)")
    return pairs


def cmd_compose(args, out) -> int:
    p = proj.load(args.project)
    variant = _variant(args, p)
    resolution = _resolution(args, p)
    sets, interfaces = [], []
    for name, Pi in _composition_inputs(args, p):
        res = min_processors(p.cluster(name).taskset, Pi, variant, None, resolution)
        interfaces.append(_interface_json(name, Pi, res, variant))
        sets.append(transform_def2(res.model, Rounding.CEIL, prefix=f"{name}."))
    report = {"interfaces": interfaces, "servers": []}
    for s in sets:
        for t in s.tasks:
            report["servers"].append({"label": t.label, "T": t.period, "C": fmt_rat(t.wcet), "D": t.deadline})
    code = 0
    try:
        res = compose_gedf(sets, args.Pi_out, variant, args.m_cap, resolution)
        report["composed"] = _interface_json("composed", args.Pi_out, res, variant)
    except InfeasibleInterfaceError as err:
        report["composed"] = None
        report["error"] = str(err)
        code = 1
    _emit(report, out)
    return code


def _vc_report(system, ts, horizon, simulate):
    if isinstance(system, Unschedulable):
        return {"admitted": False, "reason": system.reason}, 1
    report = {
        "admitted": True,
        "flavor": system.flavor.value,
        "Pi": system.common_Pi,
        "clusters": [
            {"label": c.label, "scheduler": c.scheduler.value, "tasks": [t.label for t in c.taskset], "interface": str(c.interface)}
            for c in system.clusters
        ],
        "table": system.table.to_csv(),
    }
    if simulate:
        h = horizon or ts.hyperperiod
        tr = simulate_hierarchical(system, horizon=h)
        report["simulation"] = tr.summary()
        report["simulation"]["preemption_bound"] = vcidt_preemption_bound(ts, h)
    return report, 0


def cmd_vcidt(args, out) -> int:
    p = proj.load(args.project)
    ts = p.taskset(args.taskset)
    report, code = _vc_report(vcidt_build(ts, args.m or p.m), ts, args.horizon, args.simulate)
    _emit(report, out)
    return code


def cmd_usedf_vc(args, out) -> int:
    p = proj.load(args.project)
    ts = p.taskset(args.taskset)
    report, code = _vc_report(usedf_vc_build(ts, args.m or p.m), ts, args.horizon, args.simulate)
    _emit(report, out)
    return code


def run_scenario(p: proj.ProjectFile, name: str, horizon=None, policy=None):
    if name not in p.scenarios:
        raise proj.ProjectError(f"unknown scenario {name!r}")
    sc = p.scenarios[name]
    kind = sc["kind"]
    h = horizon or sc.get("horizon")
    if kind == "global":
        ts = p.taskset(sc["taskset"])
        return simulate_global(ts, int(sc.get("m", p.m)), policy or sc.get("policy", "gEDF"), horizon=h or ts.hyperperiod)
    if kind == "clustered":
        sizes = [(c, int(n)) for c, n in sc["clusters"].items()]
        clusters = [p.cluster(c) for c, _ in sizes]
        return simulate_hierarchical(clusters, horizon=h, table=dedicated_table(sizes))
    ts = p.taskset(sc["taskset"])
    build = vcidt_build if kind == "vcidt" else usedf_vc_build
    system = build(ts, int(sc.get("m", p.m)))
    if isinstance(system, Unschedulable):
        raise InputError(f"scenario {name!r} not admitted: {system.reason}")
    return simulate_hierarchical(system, horizon=h or ts.hyperperiod)


def cmd_simulate(args, out) -> int:
    p = proj.load(args.project)
    trace = run_scenario(p, args.scenario, args.horizon, args.policy)
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write(trace.to_json() if args.format == "json" else trace.to_csv())
    _emit(trace.summary(), out)
    return 0


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mprkit", description="Compositional analysis of virtual-cluster multiprocessor scheduling.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, project=True):
        if project:
            sp.add_argument("project", help="project JSON path or built-in name (table1, fig1)")
        sp.add_argument("--variant", choices=sorted(VARIANTS), help="supply bound used by the test")
        sp.add_argument("--resolution", type=_rat_arg, help="capacity grid, e.g. 1/100")
        sp.add_argument("--m-cap", type=int, dest="m_cap", help="largest processor count to try")
        sp.add_argument("--horizon", type=_rat_arg, help="simulation horizon")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("analyze", help="test a cluster against an interface")
    common(sp)
    sp.add_argument("cluster")
    sp.add_argument("--model", type=_model_arg, required=True, help="Pi,Theta,m")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("interface", help="minimum-bandwidth interface")
    common(sp)
    sp.add_argument("cluster")
    sp.add_argument("--Pi", type=int, required=True)
    sp.set_defaults(func=cmd_interface)

    sp = sub.add_parser("sweep", help="bandwidth over a range of periods")
    common(sp)
    sp.add_argument("cluster")
    sp.add_argument("--periods", type=_range_arg, help="e.g. 1..12 or 2,4,6")
    sp.add_argument("--mprimes", type=_range_arg, help="processor counts, e.g. 1..3")
    sp.add_argument("--jobs", type=int, default=1, help="worker processes")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("transform", help="interface to periodic server tasks")
    common(sp, project=False)
    sp.add_argument("--model", type=_model_arg, required=True, help="Pi,Theta,m")
    sp.add_argument("--definition", choices=("def2", "def3"), default="def2")
    sp.add_argument("--rounding", choices=[r.value for r in Rounding], default="ceil")
    sp.set_defaults(func=cmd_transform)

    sp = sub.add_parser("compose", help="interfaces, servers, and a gEDF interface for the servers")
    common(sp)
    sp.add_argument("--clusters", help="NAME:PI,... (defaults to the project's composition)")
    sp.add_argument("--Pi-out", type=int, dest="Pi_out", default=1)
    sp.set_defaults(func=cmd_compose)

    sp = sub.add_parser("simulate", help="run a scenario and summarize misses and preemptions")
    common(sp)
    sp.add_argument("scenario")
    sp.add_argument("--policy", help="override a global scenario's policy")
    sp.add_argument("--trace", help="write the event trace to this file")
    sp.set_defaults(func=cmd_simulate)

    for name, func in (("vcidt", cmd_vcidt), ("usedf-vc", cmd_usedf_vc)):
        sp = sub.add_parser(name, help=f"build a {name} system")
        common(sp)
        sp.add_argument("taskset")
        sp.add_argument("--m", type=int)
        sp.add_argument("--simulate", action="store_true", help="also simulate one hyperperiod")
        sp.set_defaults(func=func)
    return ap


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.func(args, out)
    except (proj.ProjectError, InputError, InfeasibleInterfaceError, ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
