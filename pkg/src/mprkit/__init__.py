"""Interfaces, analysis and simulation for virtual-cluster scheduling on multiprocessors."""

from .model import Cluster, MprModel, Policy, SporadicTask, TaskSet, exact, task
from .supply import SupplyVariant, lsbf, sbf, sbf_improved, sbf_oracle, usbf
from .demand import dem, workload_bound
from .schedulability import is_schedulable, schedulability_load
from .interface import min_capacity, min_processors
from .transform import Rounding, transform_def2, transform_def3
from .inter_cluster import ScheduleTable, compose_gedf, mcnaughton
from .algorithms import usedf_vc_bound, usedf_vc_build, vcidt_build
from .simulator import simulate_global, simulate_hierarchical, supply_from_trace

__all__ = [
    "Cluster", "MprModel", "Policy", "SporadicTask", "TaskSet", "exact", "task",
    "SupplyVariant", "lsbf", "sbf", "sbf_improved", "sbf_oracle", "usbf",
    "dem", "workload_bound", "is_schedulable", "schedulability_load",
    "min_capacity", "min_processors", "Rounding", "transform_def2", "transform_def3",
    "ScheduleTable", "compose_gedf", "mcnaughton",
    "usedf_vc_bound", "usedf_vc_build", "vcidt_build",
    "simulate_global", "simulate_hierarchical", "supply_from_trace",
]
