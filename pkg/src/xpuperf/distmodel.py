"""Distributed LLM inference estimator.

Sizes the scale-out needed to hold weights plus KV cache, enumerates tensor-
and pipeline-parallel plans, prices their communication, and turns the result
into TTFT/TPOT and energy-per-token estimates under an optimistic (zero
exposed communication) or realistic (fully exposed communication) link model.

Latency model:
  TTFT  = max(prefill_flops/(tp*peak), prefill_bytes/(tp*bw)) * q + comm_prefill
          with q = (pp + B - 1) / (B * pp): a single prompt traverses pipeline
          stages sequentially (q = 1 at B = 1, no microbatching), while the
          prompts of a larger batch stream through the stages back to back.
  TPOT  = max((weights + KV)/(tp*bw), B*decode_flops/(tp*peak)) + comm_decode
          (pipeline stages read their weight shards sequentially per token, so
          the per-stage byte times sum back to total_bytes/(tp*bw)).

Communication (uniform link model, no compute overlap):
  TP: 2 ring all-reduces per layer, each moving m = B*s_tok*d_model*act bytes
      in time 2*(tp-1)/tp * m/ib + 2*(tp-1)*latency.
  PP: (pp-1) boundary activations of the same m bytes, each m/ib + latency.

Energy prices whole allocation quanta (you power a full rack even when the
plan uses part of it) at TDP scaled by the measured phase power fraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

from .catalog import AcceleratorSpec, LlmModelConfig, Parallelism
from .errors import InfeasibleError, InfeasiblePlanError, EmptyPlanSetError, ValidationError
from .workload import (
    InferencePoint,
    Phase,
    decode_flops_per_token,
    kv_cache_bytes,
    prefill_flops,
    weight_bytes,
)

DEFAULT_HEADROOM = 0.9
DEFAULT_MAX_DEVICES = 4096
DEFAULT_ACTIVATION_BYTES = 2


class CommMode(str, Enum):
    OPTIMISTIC = "optimistic"  # zero exposed communication
    REALISTIC = "realistic"  # communication fully exposed


@dataclass(frozen=True)
class ByteWidths:
    """Per-scenario element sizes; defaults follow the model config (fp16)."""

    bytes_per_param: Optional[int] = None
    bytes_per_kv_elem: Optional[int] = None
    bytes_per_act: int = DEFAULT_ACTIVATION_BYTES

    def params(self, model: LlmModelConfig) -> int:
        return self.bytes_per_param if self.bytes_per_param is not None else model.bytes_per_param

    def kv(self, model: LlmModelConfig) -> int:
        return (
            self.bytes_per_kv_elem
            if self.bytes_per_kv_elem is not None
            else model.bytes_per_kv_elem
        )


DEFAULT_WIDTHS = ByteWidths()


@dataclass(frozen=True)
class ParallelismPlan:
    tp: int
    pp: int

    @property
    def n_devices(self) -> int:
        return self.tp * self.pp

    def __post_init__(self) -> None:
        if self.tp < 1 or self.pp < 1:
            raise ValidationError("tp and pp must be >= 1")


@dataclass(frozen=True)
class ScenarioEstimate:
    platform: str
    model: str
    point: InferencePoint
    plan: ParallelismPlan
    mode: CommMode
    ttft_s: Optional[float]
    tpot_s: Optional[float]
    comm_prefill_s: Optional[float]
    comm_decode_s: Optional[float]
    energy_per_output_token_j: Optional[float]
    energy_per_input_token_j: Optional[float]
    n_devices_allocated: int
    feasible: bool
    reason: Optional[str] = None


def _round_to_quantum(n: int, quantum: int) -> int:
    return ((n + quantum - 1) // quantum) * quantum


def scenario_bytes(
    model: LlmModelConfig, batch: int, context_len: int, widths: ByteWidths = DEFAULT_WIDTHS
) -> int:
    """Working-set bytes: model weights plus the batch's KV cache."""
    return weight_bytes(model, widths.params(model)) + kv_cache_bytes(
        model, batch, context_len, widths.kv(model)
    )


def min_devices(
    platform: AcceleratorSpec,
    model: LlmModelConfig,
    batch: int,
    context_len: int,
    headroom: float = DEFAULT_HEADROOM,
    widths: ByteWidths = DEFAULT_WIDTHS,
    max_devices: int = DEFAULT_MAX_DEVICES,
) -> int:
    """Smallest device count whose derated capacity holds weights + KV cache.

    Rounded up to the platform's allocation quantum.
    """
    if not 0 < headroom <= 1:
        raise ValidationError("headroom must be in (0, 1]")
    total = scenario_bytes(model, batch, context_len, widths)
    usable = platform.mem_capacity_bytes * headroom
    n = max(1, math.ceil(total / usable))
    n = _round_to_quantum(n, platform.allocation_quantum)
    if n > max_devices:
        raise InfeasibleError(
            f"{model.name} at batch={batch}, context={context_len} needs {n} "
            f"{platform.name} devices; limit is {max_devices}"
        )
    return n


def plan_violation(
    platform: AcceleratorSpec, model: LlmModelConfig, plan: ParallelismPlan
) -> Optional[str]:
    """Reason the plan is structurally invalid for this platform/model, if any."""
    if plan.tp > 1 and not platform.supports(Parallelism.TP):
        return "parallelism"
    if plan.pp > 1 and not platform.supports(Parallelism.PP):
        return "parallelism"
    if model.n_kv_heads % plan.tp != 0:
        return "divisibility"
    if plan.pp > model.n_layers:
        return "layers"
    return None


def enumerate_plans(
    platform: AcceleratorSpec, model: LlmModelConfig, n_devices: int
) -> list[ParallelismPlan]:
    """All (tp, pp) factorizations of ``n_devices`` valid on this platform."""
    if n_devices < 1:
        raise ValidationError("n_devices must be >= 1")
    plans = []
    for tp in range(1, n_devices + 1):
        if n_devices % tp:
            continue
        plan = ParallelismPlan(tp=tp, pp=n_devices // tp)
        if plan_violation(platform, model, plan) is None:
            plans.append(plan)
    if not plans:
        raise EmptyPlanSetError(
            f"no valid (tp, pp) factorization of {n_devices} devices for "
            f"{model.name} on {platform.name}"
        )
    return plans


def comm_time(
    platform: AcceleratorSpec,
    model: LlmModelConfig,
    point: InferencePoint,
    plan: ParallelismPlan,
    phase: Phase,
    widths: ByteWidths = DEFAULT_WIDTHS,
) -> tuple[int, float]:
    """(bytes moved per device, seconds) for one pass of the given phase."""
    violation = plan_violation(platform, model, plan)
    if violation is not None:
        raise InfeasiblePlanError(
            f"plan tp={plan.tp}, pp={plan.pp} invalid for {model.name} on "
            f"{platform.name}: {violation}",
            reason=violation,
        )
    s_tok = point.prompt_len if phase is Phase.PREFILL else 1
    m = point.batch * s_tok * model.d_model * widths.bytes_per_act
    ib = platform.interconnect_bw_bytes_per_s
    lat = platform.interconnect_latency_s
    total_bytes = 0
    total_time = 0.0
    if plan.tp > 1:
        # two ring all-reduces per layer (attention output + MLP output)
        per_allreduce_bytes = 2 * (plan.tp - 1) / plan.tp * m
        per_allreduce_time = per_allreduce_bytes / ib + 2 * (plan.tp - 1) * lat
        n_allreduce = 2 * model.n_layers
        total_bytes += round(n_allreduce * per_allreduce_bytes)
        total_time += n_allreduce * per_allreduce_time
    if plan.pp > 1:
        hops = plan.pp - 1
        total_bytes += hops * m
        total_time += hops * (m / ib + lat)
    return total_bytes, total_time


def estimate(
    platform: AcceleratorSpec,
    model: LlmModelConfig,
    point: InferencePoint,
    plan: ParallelismPlan,
    mode: CommMode = CommMode.REALISTIC,
    headroom: float = DEFAULT_HEADROOM,
    widths: ByteWidths = DEFAULT_WIDTHS,
) -> ScenarioEstimate:
    """Full latency/energy estimate for one scenario; raises when infeasible."""
    violation = plan_violation(platform, model, plan)
    if violation is not None:
        raise InfeasiblePlanError(
            f"plan tp={plan.tp}, pp={plan.pp} invalid for {model.name} on "
            f"{platform.name}: {violation}",
            reason=violation,
        )
    total_bytes = scenario_bytes(model, point.batch, point.context_len, widths)
    per_device = total_bytes / plan.n_devices
    if per_device > platform.mem_capacity_bytes * headroom:
        raise InfeasiblePlanError(
            f"{total_bytes / 1e9:.1f} GB over {plan.n_devices} devices exceeds "
            f"{platform.mem_capacity_bytes * headroom / 1e9:.1f} GB usable per "
            f"{platform.name}",
            reason="capacity",
        )
    n_alloc = _round_to_quantum(plan.n_devices, platform.allocation_quantum)

    B, s, t = point.batch, point.prompt_len, point.context_len
    tp, pp = plan.tp, plan.pp
    peak, bw = platform.peak_flops, platform.mem_bw_bytes_per_s

    if mode is CommMode.OPTIMISTIC:
        comm_prefill = comm_decode = 0.0
    else:
        _, comm_prefill = comm_time(platform, model, point, plan, Phase.PREFILL, widths)
        _, comm_decode = comm_time(platform, model, point, plan, Phase.DECODE, widths)

    prefill_point = replace(point, phase=Phase.PREFILL)
    pipeline_q = (pp + B - 1) / (B * pp)
    ttft = (
        max(prefill_flops(prefill_point) / (tp * peak), total_bytes / (tp * bw)) * pipeline_q
        + comm_prefill
    )
    tpot = (
        max(total_bytes / (tp * bw), B * decode_flops_per_token(model, t) / (tp * peak))
        + comm_decode
    )
    e_out = n_alloc * platform.tdp_w * platform.decode_power_fraction * tpot / B
    e_in = n_alloc * platform.tdp_w * platform.prefill_power_fraction * ttft / (B * s)
    return ScenarioEstimate(
        platform=platform.name,
        model=model.name,
        point=point,
        plan=plan,
        mode=mode,
        ttft_s=ttft,
        tpot_s=tpot,
        comm_prefill_s=comm_prefill,
        comm_decode_s=comm_decode,
        energy_per_output_token_j=e_out,
        energy_per_input_token_j=e_in,
        n_devices_allocated=n_alloc,
        feasible=True,
    )


def infeasible_estimate(
    platform: AcceleratorSpec,
    model: LlmModelConfig,
    point: InferencePoint,
    plan: ParallelismPlan,
    mode: CommMode,
    reason: str,
) -> ScenarioEstimate:
    """Placeholder estimate so sweeps can report why a cell has no numbers."""
    return ScenarioEstimate(
        platform=platform.name,
        model=model.name,
        point=point,
        plan=plan,
        mode=mode,
        ttft_s=None,
        tpot_s=None,
        comm_prefill_s=None,
        comm_decode_s=None,
        energy_per_output_token_j=None,
        energy_per_input_token_j=None,
        n_devices_allocated=0,
        feasible=False,
        reason=reason,
    )


@dataclass(frozen=True)
class ScaleoutSetting:
    """One documented precision setting for the capacity-division report."""

    label: str
    bytes_per_param: int
    bytes_per_kv_elem: int


@dataclass(frozen=True)
class ScaleoutReport:
    platform: str
    model: str
    batch: int
    context_len: int
    headroom: float
    rows: tuple[dict, ...]
    reported_deployment_devices: Optional[int]
    note: Optional[str]


# Published rack-scale deployment sizes that do not follow from capacity
# division; flagged alongside the derived counts in scale-out reports.
REPORTED_DEPLOYMENTS: dict[tuple[str, str], int] = {
    ("Groq", "Llama-3.1-70B"): 576,
}

SCALEOUT_SETTINGS = (
    ScaleoutSetting("fp16", 2, 2),
    ScaleoutSetting("fp8", 1, 1),
)


def scaleout_report(
    platform: AcceleratorSpec,
    model: LlmModelConfig,
    batch: int,
    context_len: int,
    headroom: float = DEFAULT_HEADROOM,
    settings: tuple[ScaleoutSetting, ...] = SCALEOUT_SETTINGS,
    max_devices: int = DEFAULT_MAX_DEVICES,
) -> ScaleoutReport:
    """Scale-out sizing under each documented precision setting.

    ``capacity_devices`` is the raw weight-capacity division (devices whose
    combined working memory holds the weights alone; no headroom, no KV):
    the figure rack-count discussions are based on. ``min_devices`` is the
    full deployment sizing (weights + KV cache, headroom, quantum rounding);
    None when it exceeds ``max_devices``.
    """
    rows = []
    for setting in settings:
        widths = ByteWidths(setting.bytes_per_param, setting.bytes_per_kv_elem)
        wbytes = weight_bytes(model, setting.bytes_per_param)
        capacity_devices = max(1, math.ceil(wbytes / platform.mem_capacity_bytes))
        try:
            deploy = min_devices(
                platform, model, batch, context_len, headroom, widths, max_devices
            )
        except InfeasibleError:
            deploy = None
        rows.append(
            {
                "setting": setting.label,
                "bytes_per_param": setting.bytes_per_param,
                "bytes_per_kv_elem": setting.bytes_per_kv_elem,
                "weight_bytes": wbytes,
                "kv_cache_bytes": kv_cache_bytes(
                    model, batch, context_len, setting.bytes_per_kv_elem
                ),
                "capacity_devices": capacity_devices,
                "min_devices": deploy,
            }
        )
    reported = REPORTED_DEPLOYMENTS.get((platform.name, model.name))
    note = None
    if reported is not None:
        note = (
            f"published deployment uses {reported} accelerators; this figure "
            "does not follow from capacity division and is flagged for context"
        )
    return ScaleoutReport(
        platform=platform.name,
        model=model.name,
        batch=batch,
        context_len=context_len,
        headroom=headroom,
        rows=tuple(rows),
        reported_deployment_devices=reported,
        note=note,
    )
