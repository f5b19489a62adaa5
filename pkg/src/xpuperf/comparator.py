"""Roofline curves and pairwise FLOPS-equivalent comparison matrices.

Pairwise ratios answer "scaled to the same number of FLOPS, how does platform
A compare to platform B" for power draw, accessible-memory bandwidth per
capacity, and silicon area efficiency. The FLOPS-equalization factor cancels
algebraically in each ratio-of-ratios, so the implementation computes plain
per-platform intensities and divides.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .catalog import AcceleratorSpec
from .errors import MissingFieldError, ValidationError


class Metric(str, Enum):
    POWER_PER_FLOPS = "power"
    BW_PER_CAPACITY = "bwcap"
    AREA_EFFICIENCY = "area"


@dataclass(frozen=True)
class RooflinePoint:
    arithmetic_intensity: float
    attainable_flops: float


@dataclass(frozen=True)
class RooflineCurve:
    platform: str
    ridge_point: float  # FLOP/byte where bandwidth-bound meets compute-bound
    points: tuple[RooflinePoint, ...]


@dataclass(frozen=True)
class PairwiseMatrix:
    metric: Metric
    platforms: tuple[str, ...]
    values: tuple[tuple[float, ...], ...]  # values[a][b] = ratio of a over b

    def value(self, a: str, b: str) -> float:
        ia, ib = self.platforms.index(a), self.platforms.index(b)
        return self.values[ia][ib]


def roofline(platform: AcceleratorSpec, ai_samples: Sequence[float]) -> RooflineCurve:
    """Attainable throughput min(peak, AI * bw) at each sampled intensity."""
    if any(ai <= 0 for ai in ai_samples):
        raise ValidationError("arithmetic intensities must be > 0")
    points = tuple(
        RooflinePoint(ai, min(platform.peak_flops, ai * platform.mem_bw_bytes_per_s))
        for ai in ai_samples
    )
    return RooflineCurve(
        platform=platform.name,
        ridge_point=platform.peak_flops / platform.mem_bw_bytes_per_s,
        points=points,
    )


def log_spaced_intensities(lo: float = 0.01, hi: float = 1e5, n: int = 100) -> list[float]:
    """Default AI sampling grid for roofline plots (log-spaced)."""
    if lo <= 0 or hi <= lo or n < 2:
        raise ValidationError("need 0 < lo < hi and n >= 2")
    ratio = (hi / lo) ** (1.0 / (n - 1))
    return [lo * ratio**i for i in range(n)]


def _intensity(metric: Metric, p: AcceleratorSpec) -> float:
    if metric is Metric.POWER_PER_FLOPS:
        if p.tdp_w is None:
            raise MissingFieldError(f"platform {p.name!r}: tdp_w required for power matrix")
        return p.tdp_w / p.peak_flops
    if metric is Metric.BW_PER_CAPACITY:
        return p.mem_bw_bytes_per_s / p.mem_capacity_bytes
    if metric is Metric.AREA_EFFICIENCY:
        if p.die_area_mm2 is None:
            raise MissingFieldError(f"platform {p.name!r}: die_area_mm2 required for area matrix")
        return p.peak_flops / p.die_area_mm2
    raise ValidationError(f"unknown metric {metric!r}")


def equivalency_matrix(metric: Metric, platforms: Sequence[AcceleratorSpec]) -> PairwiseMatrix:
    """Pairwise ratio grid value[a][b] for the requested metric.

    PowerPerFlops: (tdp_a/peak_a) / (tdp_b/peak_b) -- platform a's power when
    scaled to b's FLOPS. BwPerCapacity: (bw_a/cap_a) / (bw_b/cap_b).
    AreaEfficiency: (peak_a/area_a) / (peak_b/area_b); higher is better.
    """
    if not platforms:
        raise ValidationError("platform list is empty")
    intensities = [_intensity(metric, p) for p in platforms]
    values = tuple(
        tuple(ia / ib for ib in intensities) for ia in intensities
    )
    return PairwiseMatrix(
        metric=metric,
        platforms=tuple(p.name for p in platforms),
        values=values,
    )
