"""JSON project files: task sets, clusters, analysis settings and scenarios.

Capacities may be written as integers, decimals or "p/q" strings; decimals
are read exactly (8.22 becomes 411/50).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

from .model import Cluster, Policy, Rat, SporadicTask, TaskSet, exact, fmt_rat
from .supply import SupplyVariant

SCHEMA_VERSION = 1
SCENARIO_KINDS = ("global", "clustered", "vcidt", "usedf-vc")
BUILTIN = ("table1", "fig1")


class ProjectError(ValueError):
    """Malformed or inconsistent project file."""


@dataclass(frozen=True)
class ClusterSpec:
    taskset: str
    scheduler: Policy = Policy.GEDF
    tasks: Optional[Tuple[str, ...]] = None


@dataclass(frozen=True)
class AnalysisConfig:
    periods: Tuple[int, ...] = tuple(range(1, 13))
    variant: SupplyVariant = SupplyVariant.LINEAR_LOWER
    resolution: Rat = Fraction(1, 100)
    composition: Tuple[Tuple[str, int], ...] = ()


@dataclass(frozen=True)
class ProjectFile:
    tasksets: Dict[str, TaskSet]
    clusters: Dict[str, ClusterSpec] = field(default_factory=dict)
    m: Optional[int] = None
    analysis: AnalysisConfig = AnalysisConfig()
    scenarios: Dict[str, dict] = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def taskset(self, name: str) -> TaskSet:
        if name not in self.tasksets:
            raise ProjectError(f"unknown task set {name!r}")
        return self.tasksets[name]

    def cluster(self, name: str, label: Optional[str] = None) -> Cluster:
        if name not in self.clusters:
            raise ProjectError(f"unknown cluster {name!r}")
        spec = self.clusters[name]
        ts = self.taskset(spec.taskset)
        if spec.tasks is not None:
            ts = TaskSet(tuple(ts[ts.index(l)] for l in spec.tasks))
        return Cluster(ts, spec.scheduler, None, label or name)


def _rat(value, what: str) -> Rat:
    try:
        if isinstance(value, str):
            return exact(Fraction(value.strip()))
        return exact(value)
    except (ValueError, TypeError, ZeroDivisionError) as err:
        raise ProjectError(f"bad number for {what}: {value!r}") from err


def _int(value, what: str) -> int:
    v = _rat(value, what)
    if not isinstance(v, int):
        raise ProjectError(f"{what} must be an integer, got {value!r}")
    return v


def _task(obj, where: str) -> SporadicTask:
    if not isinstance(obj, dict) or not {"T", "C"} <= obj.keys():
        raise ProjectError(f"{where}: a task needs T and C")
    T = _int(obj["T"], f"{where}.T")
    D = _int(obj.get("D", T), f"{where}.D")
    try:
        return SporadicTask(T, _rat(obj["C"], f"{where}.C"), D, str(obj.get("label", "")))
    except ValueError as err:
        raise ProjectError(f"{where}: {err}") from err


def parse_project(obj: dict) -> ProjectFile:
    """Validate a decoded project document."""
    if not isinstance(obj, dict):
        raise ProjectError("project must be a JSON object")
    version = obj.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ProjectError(f"schema_version {version!r} unsupported (expected {SCHEMA_VERSION})")
    tasksets = {}
    for name, tasks in (obj.get("tasksets") or {}).items():
        if not isinstance(tasks, list) or not tasks:
            raise ProjectError(f"task set {name!r} must be a nonempty list")
        try:
            tasksets[name] = TaskSet(tuple(_task(t, f"{name}[{i}]") for i, t in enumerate(tasks)))
        except ValueError as err:
            raise ProjectError(f"task set {name!r}: {err}") from err
    clusters = {}
    for name, c in (obj.get("clusters") or {}).items():
        if c.get("taskset") not in tasksets:
            raise ProjectError(f"cluster {name!r} references unknown task set {c.get('taskset')!r}")
        try:
            sched = Policy(c.get("scheduler", "gEDF"))
        except ValueError as err:
            raise ProjectError(f"cluster {name!r}: {err}") from err
        tasks = c.get("tasks")
        if tasks is not None:
            labels = {t.label for t in tasksets[c["taskset"]]}
            missing = [l for l in tasks if l not in labels]
            if missing:
                raise ProjectError(f"cluster {name!r} references unknown tasks {missing}")
            tasks = tuple(tasks)
        clusters[name] = ClusterSpec(c["taskset"], sched, tasks)
    m = obj.get("platform", {}).get("m")
    if m is not None:
        m = _int(m, "platform.m")
    a = obj.get("analysis") or {}
    try:
        analysis = AnalysisConfig(
            tuple(_int(p, "analysis.periods") for p in a.get("periods", range(1, 13))),
            SupplyVariant(a.get("variant", "lsbf")),
            _rat(a.get("resolution", "1/100"), "analysis.resolution"),
            tuple((k, _int(v, f"composition.{k}")) for k, v in (a.get("composition") or {}).items()),
        )
    except ValueError as err:
        raise ProjectError(str(err)) from err
    for k, _ in analysis.composition:
        if k not in clusters:
            raise ProjectError(f"composition references unknown cluster {k!r}")
    scenarios = {}
    for name, sc in (obj.get("scenarios") or {}).items():
        kind = sc.get("kind")
        if kind not in SCENARIO_KINDS:
            raise ProjectError(f"scenario {name!r}: kind must be one of {SCENARIO_KINDS}")
        if kind == "clustered":
            for c in sc.get("clusters", {}):
                if c not in clusters:
                    raise ProjectError(f"scenario {name!r} references unknown cluster {c!r}")
        elif sc.get("taskset") not in tasksets:
            raise ProjectError(f"scenario {name!r} references unknown task set {sc.get('taskset')!r}")
        scenarios[name] = dict(sc)
    return ProjectFile(tasksets, clusters, m, analysis, scenarios, version)


def loads(text: str) -> ProjectFile:
    try:
        obj = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as err:
        raise ProjectError(f"invalid JSON: {err}") from err
    return parse_project(obj)


def load(source: Union[str, Path]) -> ProjectFile:
    """Read a project from a path or a built-in name such as ``table1``."""
    name = str(source)
    if name in BUILTIN and not Path(name).exists():
        return loads(resources.files("mprkit.data").joinpath(f"{name}.json").read_text())
    try:
        return loads(Path(source).read_text())
    except OSError as err:
        raise ProjectError(f"cannot read {source}: {err}") from err


def to_dict(p: ProjectFile) -> dict:
    obj = {
        "schema_version": p.schema_version,
        "tasksets": {
            name: [{"label": t.label, "T": t.period, "C": fmt_rat(t.wcet), "D": t.deadline} for t in ts]
            for name, ts in p.tasksets.items()
        },
        "clusters": {},
        "analysis": {
            "periods": list(p.analysis.periods),
            "variant": p.analysis.variant.value,
            "resolution": fmt_rat(p.analysis.resolution),
            "composition": dict(p.analysis.composition),
        },
        "scenarios": p.scenarios,
    }
    if p.m is not None:
        obj["platform"] = {"m": p.m}
    for name, c in p.clusters.items():
        entry = {"taskset": c.taskset, "scheduler": c.scheduler.value}
        if c.tasks is not None:
            entry["tasks"] = list(c.tasks)
        obj["clusters"][name] = entry
    return obj


def dumps(p: ProjectFile) -> str:
    return json.dumps(to_dict(p), indent=1, default=_json_default)


def _json_default(x):
    if isinstance(x, Fraction):
        return fmt_rat(exact(x))
    raise TypeError(f"cannot serialize {type(x).__name__}")


def trial_seed(default: int = 0) -> int:
    """Seed for random trial suites, overridable through MPRKIT_SEED."""
    raw = os.environ.get("MPRKIT_SEED")
    return default if raw in (None, "") else int(raw)
