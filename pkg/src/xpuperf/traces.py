"""Measured-data analytics: power traces, communication energy, benchmarks.

Power-trace segmentation follows the measurement discipline the bundled
dataset was collected with: record idle power, run the prefill burst, let the
system fall back to idle, then run the decode burst. Energy accounting uses
the observed peak power held constant over the phase duration, which
compensates for coarse sampling; mean power is reported alongside for
sensitivity.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .catalog import AcceleratorSpec
from .errors import (
    DegenerateInputsError,
    EmptyInputError,
    MissingBaselineError,
    NegativeDeltaError,
    NoActivityError,
    NoParityError,
    ParseError,
    ValidationError,
)

DEFAULT_IDLE_MULTIPLIER = 1.15
DEFAULT_MERGE_GAP_PERIODS = 2.0


class TracePhase(str, Enum):
    IDLE = "idle"
    PREFILL = "prefill"
    DECODE = "decode"
    TRANSITION = "transition"


@dataclass(frozen=True)
class PowerTrace:
    platform: Optional[str]
    samples: tuple[tuple[float, float], ...]  # (timestamp_s, power_w)
    sample_period: float

    def __post_init__(self) -> None:
        ts = [t for t, _ in self.samples]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValidationError("trace timestamps must be strictly increasing")
        if any(p < 0 for _, p in self.samples):
            raise ValidationError("trace power must be >= 0")


@dataclass(frozen=True)
class PhaseSegment:
    phase: TracePhase
    start_s: float
    end_s: float
    peak_power_w: float
    mean_power_w: float
    fraction_of_tdp: Optional[float]

    def __post_init__(self) -> None:
        if self.end_s <= self.start_s:
            raise ValidationError("segment end must be after start")

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


@dataclass(frozen=True)
class CommEnergyMeasurement:
    platform: str
    p_benchmark_w: float
    p_idle_w: float
    duration_s: float
    bytes_transferred: int
    distance_mm: Optional[float] = None

    def __post_init__(self) -> None:
        if self.p_benchmark_w < self.p_idle_w:
            raise NegativeDeltaError(
                f"{self.platform}: benchmark power {self.p_benchmark_w} W below "
                f"idle {self.p_idle_w} W"
            )
        if self.duration_s <= 0:
            raise ValidationError("duration must be > 0")
        if self.bytes_transferred <= 0:
            raise ValidationError("bytes_transferred must be > 0")


@dataclass(frozen=True)
class BenchRecord:
    platform: str
    op: str
    shape: str
    latency_s: float
    power_w: Optional[float] = None
    temperature_c: Optional[float] = None
    mem_capacity_util: Optional[float] = None
    clock_hz: Optional[float] = None

    def __post_init__(self) -> None:
        if self.latency_s <= 0:
            raise ValidationError(f"{self.platform}/{self.op}: latency_s must be > 0")


def parse_power_trace_csv(text: str, sample_period: Optional[float] = None) -> PowerTrace:
    """Parse "timestamp_s,power_w" rows; a "# platform: X" comment names the device."""
    platform = None
    rows: list[tuple[float, float]] = []
    reader = csv.reader(io.StringIO(text))
    for lineno, row in enumerate(reader, start=1):
        if not row:
            continue
        first = row[0].strip()
        if first.startswith("#"):
            comment = first.lstrip("#").strip()
            if comment.lower().startswith("platform:"):
                platform = comment.split(":", 1)[1].strip()
            continue
        if first == "timestamp_s":
            continue
        try:
            rows.append((float(row[0]), float(row[1])))
        except (IndexError, ValueError) as e:
            raise ParseError(f"power trace line {lineno}: {e}") from e
    if len(rows) < 2:
        raise ParseError("power trace needs at least 2 samples")
    if sample_period is None:
        gaps = [b[0] - a[0] for a, b in zip(rows, rows[1:])]
        sample_period = statistics.median(gaps)
    return PowerTrace(platform=platform, samples=tuple(rows), sample_period=sample_period)


def load_power_trace(path: str | Path, sample_period: Optional[float] = None) -> PowerTrace:
    return parse_power_trace_csv(Path(path).read_text(encoding="utf-8"), sample_period)


def segment_trace(
    trace: PowerTrace,
    idle_power_hint: Optional[float] = None,
    tdp_w: Optional[float] = None,
    idle_multiplier: float = DEFAULT_IDLE_MULTIPLIER,
    merge_gap_periods: float = DEFAULT_MERGE_GAP_PERIODS,
) -> list[PhaseSegment]:
    """Split a trace into idle and active phases.

    The idle threshold is ``idle_power_hint`` when given, else
    ``idle_multiplier`` times the trace minimum. Contiguous samples above the
    threshold form bursts; bursts separated by no more than
    ``merge_gap_periods`` sample periods are merged. In a two-burst trace the
    first burst is prefill and the second decode; any other burst count leaves
    active segments labeled as transitions.
    """
    if len(trace.samples) < 3:
        raise ValidationError("segmentation needs at least 3 samples")
    threshold = idle_power_hint if idle_power_hint is not None else (
        idle_multiplier * min(p for _, p in trace.samples)
    )
    active = [p > threshold for _, p in trace.samples]
    if not any(active):
        raise NoActivityError(f"no sample exceeds idle threshold {threshold:.1f} W")

    # runs of active samples as index ranges [i, j)
    runs: list[tuple[int, int]] = []
    i = 0
    n = len(trace.samples)
    while i < n:
        if active[i]:
            j = i
            while j < n and active[j]:
                j += 1
            runs.append((i, j))
            i = j
        else:
            i += 1
    merged: list[tuple[int, int]] = [runs[0]]
    max_gap = merge_gap_periods * trace.sample_period
    for start, end in runs[1:]:
        prev_start, prev_end = merged[-1]
        gap = trace.samples[start][0] - trace.samples[prev_end - 1][0]
        if gap <= max_gap:
            merged[-1] = (prev_start, end)
        else:
            merged.append((start, end))

    if len(merged) == 1:
        labels = [TracePhase.PREFILL]
    elif len(merged) == 2:
        labels = [TracePhase.PREFILL, TracePhase.DECODE]
    else:
        labels = [TracePhase.TRANSITION] * len(merged)

    ts = [t for t, _ in trace.samples]
    t_end = ts[-1]

    def make(phase: TracePhase, lo_t: float, hi_t: float) -> PhaseSegment:
        powers = [p for t, p in trace.samples if lo_t <= t < hi_t or (hi_t == t_end and t == hi_t)]
        peak = max(powers)
        return PhaseSegment(
            phase=phase,
            start_s=lo_t,
            end_s=hi_t,
            peak_power_w=peak,
            mean_power_w=sum(powers) / len(powers),
            fraction_of_tdp=None if tdp_w is None else peak / tdp_w,
        )

    segments: list[PhaseSegment] = []
    cursor = ts[0]
    for (start, end), label in zip(merged, labels):
        burst_start = ts[start]
        burst_end = ts[end] if end < n else t_end
        if burst_start > cursor:
            segments.append(make(TracePhase.IDLE, cursor, burst_start))
        segments.append(make(label, burst_start, burst_end))
        cursor = burst_end
    if cursor < t_end:
        segments.append(make(TracePhase.IDLE, cursor, t_end))
    return segments


def idle_level(trace: PowerTrace, idle_power_hint: Optional[float] = None,
               idle_multiplier: float = DEFAULT_IDLE_MULTIPLIER) -> float:
    """Median power of the samples at or below the idle threshold."""
    threshold = idle_power_hint if idle_power_hint is not None else (
        idle_multiplier * min(p for _, p in trace.samples)
    )
    idles = [p for _, p in trace.samples if p <= threshold]
    if not idles:
        raise NoActivityError("no samples at or below the idle threshold")
    return statistics.median(idles)


def phase_energy(segment: PhaseSegment, duration_override: Optional[float] = None) -> float:
    """Joules for the segment: observed peak power held over the duration."""
    duration = segment.duration_s if duration_override is None else duration_override
    if duration <= 0:
        raise ValidationError("duration must be > 0")
    return segment.peak_power_w * duration


def comm_energy(m: CommEnergyMeasurement) -> tuple[float, float]:
    """(joules, joules per byte) for one transfer benchmark.

    Energy is the power delta over idle multiplied by execution time (the
    product form is the dimensionally consistent one), divided by the bytes
    moved for the per-byte figure.
    """
    energy = (m.p_benchmark_w - m.p_idle_w) * m.duration_s
    return energy, energy / m.bytes_transferred


def parse_comm_energy_csv(text: str) -> list[CommEnergyMeasurement]:
    """Parse "platform,p_benchmark_w,p_idle_w,duration_s,bytes,distance_mm" rows."""
    out: list[CommEnergyMeasurement] = []
    reader = csv.reader(io.StringIO(text))
    for lineno, row in enumerate(reader, start=1):
        if not row or row[0].strip().startswith("#") or row[0].strip() == "platform":
            continue
        try:
            out.append(
                CommEnergyMeasurement(
                    platform=row[0].strip(),
                    p_benchmark_w=float(row[1]),
                    p_idle_w=float(row[2]),
                    duration_s=float(row[3]),
                    bytes_transferred=int(float(row[4])),
                    distance_mm=float(row[5]) if len(row) > 5 and row[5].strip() else None,
                )
            )
        except (IndexError, ValueError) as e:
            raise ParseError(f"comm-energy line {lineno}: {e}") from e
    return out


def parse_bench_csv(text: str) -> list[BenchRecord]:
    """Parse "platform,op,shape,latency_s,power_w,temperature_c,mem_util" rows."""

    def opt(row: Sequence[str], idx: int) -> Optional[float]:
        return float(row[idx]) if len(row) > idx and row[idx].strip() else None

    out: list[BenchRecord] = []
    reader = csv.reader(io.StringIO(text))
    for lineno, row in enumerate(reader, start=1):
        if not row or row[0].strip().startswith("#") or row[0].strip() == "platform":
            continue
        try:
            out.append(
                BenchRecord(
                    platform=row[0].strip(),
                    op=row[1].strip(),
                    shape=row[2].strip(),
                    latency_s=float(row[3]),
                    power_w=opt(row, 4),
                    temperature_c=opt(row, 5),
                    mem_capacity_util=opt(row, 6),
                )
            )
        except (IndexError, ValueError) as e:
            raise ParseError(f"benchmark line {lineno}: {e}") from e
    return out


def duty_cycle_parity(
    spec_a: AcceleratorSpec,
    throughput_a: float,
    spec_b: AcceleratorSpec,
    throughput_b: float,
    n_a: int = 1,
    n_b: int = 1,
    active_fraction_a: Optional[float] = None,
    active_fraction_b: Optional[float] = None,
) -> float:
    """Duty cycle d in (0, 1] at which platform A's energy/token equals B's at full duty.

    Average power at duty d is n*tdp*(d*active + (1-d)*idle); tokens accrue
    only while active, so energy/token is avg_power / (d * throughput).
    Closed form: d = idle_a / (T_a*C/(n_a*tdp_a) - (active_a - idle_a)) with
    C the reference energy/token of B.
    """
    if throughput_a <= 0 or throughput_b <= 0:
        raise DegenerateInputsError("throughputs must be > 0")
    if n_a < 1 or n_b < 1:
        raise DegenerateInputsError("cluster sizes must be >= 1")
    a_act = spec_a.decode_power_fraction if active_fraction_a is None else active_fraction_a
    b_act = spec_b.decode_power_fraction if active_fraction_b is None else active_fraction_b
    c_ref = n_b * spec_b.tdp_w * b_act / throughput_b
    denom = throughput_a * c_ref / (n_a * spec_a.tdp_w) - (a_act - spec_a.idle_fraction)
    if spec_a.idle_fraction == 0:
        # zero idle power: parity holds at any duty iff active rates equal
        if math.isclose(denom, 0.0, abs_tol=1e-15):
            return 1.0
        raise NoParityError("zero idle power and unequal active energy rates")
    if denom <= 0:
        raise NoParityError("platform A cannot reach parity at any duty cycle")
    d = spec_a.idle_fraction / denom
    if not 0 < d <= 1 + 1e-12:
        raise NoParityError(f"parity duty {d:.4f} outside (0, 1]")
    return min(d, 1.0)


def speedup_matrix(
    records: Iterable[BenchRecord],
    baseline_platform: str,
    metric: str = "latency",
) -> dict[str, dict[str, float]]:
    """Per-operator ratios versus a baseline platform, shapes matched exactly.

    latency: baseline/platform (speedup over baseline). power:
    platform/baseline (overhead versus baseline). Operators a platform lacks
    are simply absent from its column.
    """
    if metric not in ("latency", "power"):
        raise ValidationError("metric must be 'latency' or 'power'")
    by_key: dict[tuple[str, str, str], BenchRecord] = {}
    ops: dict[str, str] = {}  # op -> shape
    for r in records:
        key = (r.op, r.shape, r.platform)
        if key in by_key:
            raise ValidationError(f"duplicate benchmark record for {key}")
        by_key[key] = r
        if r.op in ops and ops[r.op] != r.shape:
            raise ValidationError(f"operator {r.op!r} recorded at conflicting shapes")
        ops[r.op] = r.shape
    if not ops:
        raise EmptyInputError("no benchmark records")
    missing = [
        (op, shape) for op, shape in ops.items() if (op, shape, baseline_platform) not in by_key
    ]
    if missing:
        raise MissingBaselineError(
            f"baseline {baseline_platform!r} missing for operator/shape pairs: {missing}"
        )
    out: dict[str, dict[str, float]] = {}
    for (op, shape, platform), rec in sorted(by_key.items()):
        base = by_key[(op, shape, baseline_platform)]
        if metric == "latency":
            ratio = base.latency_s / rec.latency_s
        else:
            if rec.power_w is None or base.power_w is None:
                continue  # power not measured for this pair
            ratio = rec.power_w / base.power_w
        out.setdefault(op, {})[platform] = ratio
    return out


def latency_report(
    records: Iterable[BenchRecord], baseline_platform: str
) -> dict[str, float]:
    """Per-platform end-to-end latency/token divided by the baseline's."""
    recs = list(records)
    if not recs:
        raise EmptyInputError("no latency records")
    by_platform = {r.platform: r.latency_s for r in recs}
    if baseline_platform not in by_platform:
        raise MissingBaselineError(f"baseline {baseline_platform!r} absent from records")
    base = by_platform[baseline_platform]
    return {p: lat / base for p, lat in sorted(by_platform.items())}


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r_squared: float


def distance_cycles_fit(rows: Sequence[tuple[float, float]]) -> LinearFit:
    """Least-squares line through (distance_mm, cycles) with its R^2."""
    if len(rows) < 2:
        raise EmptyInputError("need at least 2 (distance, cycles) rows")
    xs = [x for x, _ in rows]
    ys = [y for _, y in rows]
    n = len(rows)
    mx, my = sum(xs) / n, sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0:
        raise ValidationError("distances are all identical")
    sxy = sum((x - mx) * (y - my) for x, y in rows)
    slope = sxy / sxx
    intercept = my - slope * mx
    ss_res = sum((y - (slope * x + intercept)) ** 2 for x, y in rows)
    ss_tot = sum((y - my) ** 2 for y in ys)
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return LinearFit(slope=slope, intercept=intercept, r_squared=r2)
