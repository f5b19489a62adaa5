"""Design-space sweeps and pareto-frontier extraction.

A sweep walks the Cartesian grid (platform, model, batch, context length,
mode), explores device counts from the capacity minimum up to four times that
minimum (capped at the configured maximum), and keeps each cell's non-dominated
plan points. Frontiers minimize (latency, energy per token) jointly: TTFT with
energy per input token for prefill, TPOT with energy per output token for
decode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .catalog import Catalog
from .distmodel import (
    DEFAULT_HEADROOM,
    DEFAULT_MAX_DEVICES,
    ByteWidths,
    CommMode,
    InfeasiblePlanError,
    ParallelismPlan,
    ScenarioEstimate,
    estimate,
    infeasible_estimate,
    min_devices,
    plan_violation,
)
from .errors import EmptyInputError, InfeasibleError, ValidationError
from .workload import InferencePoint, Phase


@dataclass(frozen=True)
class SweepSpec:
    platforms: tuple[str, ...]
    models: tuple[str, ...]
    batches: tuple[int, ...]
    context_lens: tuple[int, ...]
    phases: tuple[Phase, ...] = (Phase.PREFILL, Phase.DECODE)
    modes: tuple[CommMode, ...] = (CommMode.OPTIMISTIC, CommMode.REALISTIC)
    headroom: float = DEFAULT_HEADROOM
    overrides: dict[str, ByteWidths] = field(default_factory=dict)
    max_devices: int = DEFAULT_MAX_DEVICES

    def __post_init__(self) -> None:
        for name, values in (
            ("platforms", self.platforms),
            ("models", self.models),
            ("batches", self.batches),
            ("context_lens", self.context_lens),
            ("phases", self.phases),
            ("modes", self.modes),
        ):
            if not values:
                raise ValidationError(f"sweep {name} must be non-empty")
        if any(b < 1 for b in self.batches):
            raise ValidationError("batches must be strictly positive")
        if any(t < 1 for t in self.context_lens):
            raise ValidationError("context_lens must be strictly positive")
        if not 0 < self.headroom <= 1:
            raise ValidationError("headroom must be in (0, 1]")
        if self.max_devices < 1:
            raise ValidationError("max_devices must be >= 1")


@dataclass(frozen=True)
class FrontierPoint:
    x: float  # latency, seconds
    y: float  # energy per token, joules
    platform: str
    tp: int
    pp: int
    n_devices: int
    mode: CommMode


@dataclass(frozen=True)
class ParetoFrontier:
    phase: Phase
    axis_x: str
    axis_y: str
    points: tuple[FrontierPoint, ...]


def pareto(points: Sequence[tuple[float, float, object]]) -> list[tuple[float, float, object]]:
    """Minimal non-dominated subset of (x, y, label) under minimize-both.

    Weak dominance with strict improvement on at least one axis; exact ties on
    both axes all survive. Output keeps input order.
    """
    if not points:
        raise EmptyInputError("pareto() needs at least one point")
    for x, y, _ in points:
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValidationError("pareto() requires finite coordinates")
    # Single sorted pass: a point survives iff its y is strictly below every
    # y seen at strictly smaller x, and no same-x point has strictly smaller y.
    order = sorted(range(len(points)), key=lambda i: (points[i][0], points[i][1]))
    survivors = [False] * len(points)
    best_y_before = math.inf  # min y over strictly smaller x
    i = 0
    while i < len(order):
        j = i
        x = points[order[i]][0]
        while j < len(order) and points[order[j]][0] == x:
            j += 1
        group = order[i:j]
        min_y = points[group[0]][1]  # group sorted by y
        if min_y < best_y_before:
            for k in group:
                if points[k][1] == min_y:
                    survivors[k] = True
        best_y_before = min(best_y_before, min_y)
        i = j
    return [points[i] for i in range(len(points)) if survivors[i]]


def _cell_candidates(
    catalog: Catalog,
    spec: SweepSpec,
    platform_name: str,
    model_name: str,
    batch: int,
    context_len: int,
    mode: CommMode,
) -> list[ScenarioEstimate]:
    """Estimates for every valid plan with n in [min_devices, 4*min_devices]."""
    platform = catalog.get_platform(platform_name)
    model = catalog.get_model(model_name)
    widths = spec.overrides.get(platform_name, ByteWidths())
    point = InferencePoint(
        model=model,
        batch=batch,
        prompt_len=context_len,
        context_len=context_len,
        phase=Phase.DECODE,
    )
    try:
        n_min = min_devices(
            platform, model, batch, context_len, spec.headroom, widths, spec.max_devices
        )
    except (InfeasibleError, ValidationError) as e:
        return [
            infeasible_estimate(
                platform, model, point, ParallelismPlan(1, 1), mode, f"capacity: {e}"
            )
        ]
    n_max = min(4 * n_min, spec.max_devices)
    out: list[ScenarioEstimate] = []
    last_reason = "capacity"
    for tp in range(1, model.n_kv_heads + 1):
        if model.n_kv_heads % tp:
            continue
        pp_lo = max(1, math.ceil(n_min / tp))
        pp_hi = min(model.n_layers, n_max // tp)
        for pp in range(pp_lo, pp_hi + 1):
            plan = ParallelismPlan(tp=tp, pp=pp)
            if plan_violation(platform, model, plan) is not None:
                break  # parallelism/layer limits only tighten as pp grows
            try:
                out.append(
                    estimate(platform, model, point, plan, mode, spec.headroom, widths)
                )
            except InfeasiblePlanError as e:
                last_reason = e.reason
    if not out:
        return [
            infeasible_estimate(
                platform,
                model,
                point,
                ParallelismPlan(1, 1),
                mode,
                f"{last_reason}: no plan between {n_min} and {n_max} devices fits",
            )
        ]
    return _non_dominated_union(out)


def _non_dominated_union(estimates: list[ScenarioEstimate]) -> list[ScenarioEstimate]:
    """Keep estimates non-dominated on either the prefill or the decode axes."""
    keep: set[int] = set()
    for xattr, yattr in (
        ("ttft_s", "energy_per_input_token_j"),
        ("tpot_s", "energy_per_output_token_j"),
    ):
        pts = [(getattr(e, xattr), getattr(e, yattr), i) for i, e in enumerate(estimates)]
        for _, _, i in pareto(pts):
            keep.add(i)
    return [e for i, e in enumerate(estimates) if i in keep]


def run_sweep(catalog: Catalog, spec: SweepSpec) -> list[ScenarioEstimate]:
    """Evaluate the sweep grid; deterministic order, infeasible cells included.

    Per cell only plan points that are pareto-relevant on at least one phase's
    axes are kept, so result sizes stay at "a few thousand scenarios".
    """
    results: list[ScenarioEstimate] = []
    for platform_name in spec.platforms:
        for model_name in spec.models:
            for batch in spec.batches:
                for context_len in spec.context_lens:
                    for mode in spec.modes:
                        results.extend(
                            _cell_candidates(
                                catalog, spec, platform_name, model_name, batch, context_len, mode
                            )
                        )
    results.sort(
        key=lambda e: (
            e.platform,
            e.model,
            e.point.batch,
            e.point.context_len,
            e.mode.value,
            e.plan.n_devices,
            e.plan.tp,
        )
    )
    return results


def _axes(phase: Phase) -> tuple[str, str]:
    if phase is Phase.PREFILL:
        return "ttft_s", "energy_per_input_token_j"
    return "tpot_s", "energy_per_output_token_j"


def frontier(
    estimates: Iterable[ScenarioEstimate],
    phase: Phase,
    mode: CommMode,
    batch: Optional[int] = None,
) -> ParetoFrontier:
    """Non-dominated (latency, energy/token) points among feasible estimates."""
    xattr, yattr = _axes(phase)
    pts: list[tuple[float, float, ScenarioEstimate]] = []
    for e in estimates:
        if not e.feasible or e.mode is not mode:
            continue
        if batch is not None and e.point.batch != batch:
            continue
        x, y = getattr(e, xattr), getattr(e, yattr)
        if x is None or y is None or not (math.isfinite(x) and math.isfinite(y)):
            continue
        pts.append((x, y, e))
    points: tuple[FrontierPoint, ...] = ()
    if pts:
        front = pareto(pts)
        front.sort(key=lambda p: (p[0], p[1]))
        points = tuple(
            FrontierPoint(
                x=x,
                y=y,
                platform=e.platform,
                tp=e.plan.tp,
                pp=e.plan.pp,
                n_devices=e.plan.n_devices,
                mode=e.mode,
            )
            for x, y, e in front
        )
    return ParetoFrontier(
        phase=phase,
        axis_x=xattr,
        axis_y=yattr,
        points=points,
    )


def frontier_membership(
    estimates: Iterable[ScenarioEstimate],
    phase: Phase,
    platform: str,
    mode: CommMode,
    batch: Optional[int] = None,
) -> bool:
    """True iff any feasible estimate of the platform lies on the frontier."""
    front = frontier(estimates, phase, mode, batch)
    return any(p.platform == platform for p in front.points)
