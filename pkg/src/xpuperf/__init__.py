"""Analytical modeling and exploration toolkit for LLM inference across
heterogeneous AI accelerators."""

from .catalog import (
    AcceleratorSpec,
    Catalog,
    LlmModelConfig,
    bundled_catalog_path,
    bundled_measurements_dir,
    load_bundled_catalog,
    load_catalog,
    save_catalog,
)
from .comparator import Metric, PairwiseMatrix, RooflineCurve, equivalency_matrix, roofline
from .distmodel import (
    ByteWidths,
    CommMode,
    ParallelismPlan,
    ScenarioEstimate,
    comm_time,
    enumerate_plans,
    estimate,
    min_devices,
    scaleout_report,
)
from .explorer import ParetoFrontier, SweepSpec, frontier, frontier_membership, pareto, run_sweep
from .workload import (
    InferencePoint,
    Phase,
    decode_flops_per_token,
    kv_cache_bytes,
    param_count_oracle,
    prefill_flops,
    weight_bytes,
)

__version__ = "0.1.0"

__all__ = [
    "AcceleratorSpec",
    "ByteWidths",
    "Catalog",
    "CommMode",
    "InferencePoint",
    "LlmModelConfig",
    "Metric",
    "PairwiseMatrix",
    "ParallelismPlan",
    "ParetoFrontier",
    "Phase",
    "RooflineCurve",
    "ScenarioEstimate",
    "SweepSpec",
    "bundled_catalog_path",
    "bundled_measurements_dir",
    "comm_time",
    "decode_flops_per_token",
    "enumerate_plans",
    "equivalency_matrix",
    "estimate",
    "frontier",
    "frontier_membership",
    "kv_cache_bytes",
    "load_bundled_catalog",
    "load_catalog",
    "min_devices",
    "param_count_oracle",
    "pareto",
    "prefill_flops",
    "roofline",
    "run_sweep",
    "save_catalog",
    "scaleout_report",
    "weight_bytes",
]
