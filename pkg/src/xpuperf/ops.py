"""Operation layer shared by the CLI and the HTTP service.

Each function validates parameters, runs the corresponding module operation,
and wraps the result in a deterministic output envelope. Both front ends call
these functions, so identical inputs produce field-for-field identical JSON
regardless of the transport.
"""

from __future__ import annotations

from typing import Any, Optional, Sequence

from . import comparator, distmodel, explorer, scenarios, traces
from .catalog import Catalog
from .distmodel import ByteWidths, CommMode, ParallelismPlan
from .errors import ValidationError
from .workload import InferencePoint, Phase


def envelope(
    command: str,
    catalog_version: str,
    parameters: dict[str, Any],
    results: Any,
    warnings: Optional[list[str]] = None,
) -> dict[str, Any]:
    """Deterministic response wrapper; no timestamps, stable field order."""
    return {
        "command": command,
        "catalog_version": catalog_version,
        "parameters": parameters,
        "results": results,
        "warnings": warnings or [],
    }


def _parse_enum(enum_cls, value, what: str):
    try:
        return enum_cls(value)
    except ValueError:
        raise ValidationError(
            f"unknown {what} {value!r}; expected one of {[x.value for x in enum_cls]}"
        ) from None


def _estimate_dict(e: distmodel.ScenarioEstimate) -> dict[str, Any]:
    return {
        "platform": e.platform,
        "model": e.model,
        "point": {
            "model": e.model,
            "batch": e.point.batch,
            "prompt_len": e.point.prompt_len,
            "context_len": e.point.context_len,
            "phase": e.point.phase.value,
        },
        "plan": {"tp": e.plan.tp, "pp": e.plan.pp, "n_devices": e.plan.n_devices},
        "mode": e.mode.value,
        "ttft_s": e.ttft_s,
        "tpot_s": e.tpot_s,
        "comm_prefill_s": e.comm_prefill_s,
        "comm_decode_s": e.comm_decode_s,
        "energy_per_output_token_j": e.energy_per_output_token_j,
        "energy_per_input_token_j": e.energy_per_input_token_j,
        "n_devices_allocated": e.n_devices_allocated,
        "feasible": e.feasible,
        "reason": e.reason,
    }


def _frontier_dict(f: explorer.ParetoFrontier) -> dict[str, Any]:
    return {
        "phase": f.phase.value,
        "axis_x": f.axis_x,
        "axis_y": f.axis_y,
        "points": [
            {
                "x": p.x,
                "y": p.y,
                "platform": p.platform,
                "tp": p.tp,
                "pp": p.pp,
                "n_devices": p.n_devices,
                "mode": p.mode.value,
            }
            for p in f.points
        ],
    }


def _widths_from_spec(raw: Optional[dict[str, Any]]) -> dict[str, ByteWidths]:
    out: dict[str, ByteWidths] = {}
    for platform, fields in (raw or {}).items():
        if not isinstance(fields, dict):
            raise ValidationError("overrides must map platform -> byte-width object")
        allowed = {"bytes_per_param", "bytes_per_kv_elem", "bytes_per_act"}
        unknown = set(fields) - allowed
        if unknown:
            raise ValidationError(f"override for {platform!r}: unknown fields {sorted(unknown)}")
        out[platform] = ByteWidths(
            bytes_per_param=fields.get("bytes_per_param"),
            bytes_per_kv_elem=fields.get("bytes_per_kv_elem"),
            bytes_per_act=fields.get("bytes_per_act", distmodel.DEFAULT_ACTIVATION_BYTES),
        )
    return out


def _widths_dict(w: ByteWidths) -> dict[str, Any]:
    return {
        "bytes_per_param": w.bytes_per_param,
        "bytes_per_kv_elem": w.bytes_per_kv_elem,
        "bytes_per_act": w.bytes_per_act,
    }


def op_platforms(catalog: Catalog) -> dict[str, Any]:
    results = [
        {
            "name": p.name,
            "peak_flops": p.peak_flops,
            "mem_type": p.mem_type.value,
            "mem_capacity_bytes": p.mem_capacity_bytes,
            "mem_bw_bytes_per_s": p.mem_bw_bytes_per_s,
            "tdp_w": p.tdp_w,
            "idle_fraction": p.idle_fraction,
            "prefill_power_fraction": p.prefill_power_fraction,
            "decode_power_fraction": p.decode_power_fraction,
            "die_area_mm2": p.die_area_mm2,
            "interconnect_bw_bytes_per_s": p.interconnect_bw_bytes_per_s,
            "interconnect_latency_s": p.interconnect_latency_s,
            "allocation_quantum": p.allocation_quantum,
            "supported_parallelisms": [x.value for x in p.supported_parallelisms],
            "precision_note": p.precision_note,
        }
        for p in catalog.platforms
    ]
    return envelope("platforms", catalog.version, {}, results)


def op_models(catalog: Catalog) -> dict[str, Any]:
    results = [
        {
            "name": m.name,
            "n_layers": m.n_layers,
            "d_model": m.d_model,
            "n_heads": m.n_heads,
            "n_kv_heads": m.n_kv_heads,
            "d_head": m.d_head,
            "d_ff": m.d_ff,
            "vocab_size": m.vocab_size,
            "n_params": m.n_params,
            "bytes_per_param": m.bytes_per_param,
            "bytes_per_kv_elem": m.bytes_per_kv_elem,
        }
        for m in catalog.models
    ]
    return envelope("models", catalog.version, {}, results)


def op_roofline(
    catalog: Catalog,
    platform: str,
    samples: int = 100,
    min_ai: float = 0.01,
    max_ai: float = 1e5,
) -> dict[str, Any]:
    spec = catalog.get_platform(platform)
    curve = comparator.roofline(spec, comparator.log_spaced_intensities(min_ai, max_ai, samples))
    params = {"platform": platform, "samples": samples, "min_ai": min_ai, "max_ai": max_ai}
    results = {
        "platform": curve.platform,
        "ridge_point": curve.ridge_point,
        "points": [
            {"arithmetic_intensity": p.arithmetic_intensity, "attainable_flops": p.attainable_flops}
            for p in curve.points
        ],
    }
    return envelope("roofline", catalog.version, params, results)


def op_equiv(catalog: Catalog, metric: str, platforms: Sequence[str]) -> dict[str, Any]:
    try:
        m = comparator.Metric(metric)
    except ValueError:
        raise ValidationError(
            f"unknown metric {metric!r}; expected one of "
            f"{[x.value for x in comparator.Metric]}"
        ) from None
    specs = [catalog.get_platform(name) for name in platforms]
    matrix = comparator.equivalency_matrix(m, specs)
    params = {"metric": m.value, "platforms": list(platforms)}
    results = {
        "metric": matrix.metric.value,
        "platforms": list(matrix.platforms),
        "values": [list(row) for row in matrix.values],
    }
    return envelope("equiv", catalog.version, params, results)


def op_scaleout(
    catalog: Catalog,
    platform: str,
    model: str,
    batch: int,
    seqlen: int,
    headroom: float = distmodel.DEFAULT_HEADROOM,
) -> dict[str, Any]:
    p = catalog.get_platform(platform)
    m = catalog.get_model(model)
    n = distmodel.min_devices(p, m, batch, seqlen, headroom)
    report = distmodel.scaleout_report(p, m, batch, seqlen, headroom)
    params = {
        "platform": platform,
        "model": model,
        "batch": batch,
        "seqlen": seqlen,
        "headroom": headroom,
    }
    results = {
        "min_devices": n,
        "settings": [dict(r) for r in report.rows],
        "reported_deployment_devices": report.reported_deployment_devices,
        "note": report.note,
    }
    return envelope("scaleout", catalog.version, params, results)


def op_estimate(
    catalog: Catalog,
    platform: str,
    model: str,
    batch: int,
    seqlen: int,
    tp: int,
    pp: int,
    mode: str = CommMode.REALISTIC.value,
    prompt_len: Optional[int] = None,
    headroom: float = distmodel.DEFAULT_HEADROOM,
    overrides: Optional[dict[str, Any]] = None,
) -> dict[str, Any]:
    p = catalog.get_platform(platform)
    m = catalog.get_model(model)
    widths = _widths_from_spec(overrides).get(platform, ByteWidths())
    point = InferencePoint(
        model=m,
        batch=batch,
        prompt_len=seqlen if prompt_len is None else prompt_len,
        context_len=seqlen,
        phase=Phase.DECODE,
    )
    comm_mode = _parse_enum(CommMode, mode, "mode")
    est = distmodel.estimate(
        p, m, point, ParallelismPlan(tp=tp, pp=pp), comm_mode, headroom, widths
    )
    params = {
        "platform": platform,
        "model": model,
        "batch": batch,
        "seqlen": seqlen,
        "prompt_len": point.prompt_len,
        "tp": tp,
        "pp": pp,
        "mode": comm_mode.value,
        "headroom": headroom,
        "overrides": overrides or {},
    }
    return envelope("estimate", catalog.version, params, _estimate_dict(est))


def _sweep_spec_from_params(
    catalog: Catalog,
    platforms: Optional[Sequence[str]],
    models: Sequence[str],
    batches: Sequence[int],
    seqlens: Sequence[int],
    mode: str,
    headroom: float,
    overrides: Optional[dict[str, Any]],
) -> explorer.SweepSpec:
    if mode == "both":
        modes: tuple[CommMode, ...] = (CommMode.OPTIMISTIC, CommMode.REALISTIC)
    else:
        modes = (_parse_enum(CommMode, mode, "mode"),)
    return explorer.SweepSpec(
        platforms=tuple(platforms) if platforms else tuple(catalog.platform_names),
        models=tuple(models),
        batches=tuple(batches),
        context_lens=tuple(seqlens),
        modes=modes,
        headroom=headroom,
        overrides=_widths_from_spec(overrides),
    )


def _sweep_params(
    spec: explorer.SweepSpec, mode: str, overrides: Optional[dict[str, Any]]
) -> dict[str, Any]:
    return {
        "platforms": list(spec.platforms),
        "models": list(spec.models),
        "batches": list(spec.batches),
        "seqlens": list(spec.context_lens),
        "mode": mode,
        "headroom": spec.headroom,
        "overrides": overrides or {},
    }


def op_sweep(
    catalog: Catalog,
    models: Sequence[str],
    batches: Sequence[int],
    seqlens: Sequence[int],
    platforms: Optional[Sequence[str]] = None,
    mode: str = "both",
    headroom: float = distmodel.DEFAULT_HEADROOM,
    overrides: Optional[dict[str, Any]] = None,
) -> dict[str, Any]:
    spec = _sweep_spec_from_params(
        catalog, platforms, models, batches, seqlens, mode, headroom, overrides
    )
    estimates = explorer.run_sweep(catalog, spec)
    frontiers = {}
    for phase in (Phase.PREFILL, Phase.DECODE):
        for m in spec.modes:
            front = explorer.frontier(estimates, phase, m)
            frontiers[f"{phase.value}_{m.value}"] = _frontier_dict(front)
    results = {
        "estimates": [_estimate_dict(e) for e in estimates],
        "frontiers": frontiers,
    }
    return envelope("sweep", catalog.version, _sweep_params(spec, mode, overrides), results)


def op_frontier(
    catalog: Catalog,
    model: str,
    batch: int,
    seqlen: int,
    phase: str,
    mode: str,
    platforms: Optional[Sequence[str]] = None,
    headroom: float = distmodel.DEFAULT_HEADROOM,
    overrides: Optional[dict[str, Any]] = None,
) -> dict[str, Any]:
    ph = _parse_enum(Phase, phase, "phase")
    cm = _parse_enum(CommMode, mode, "mode")
    spec = _sweep_spec_from_params(
        catalog, platforms, [model], [batch], [seqlen], mode, headroom, overrides
    )
    estimates = explorer.run_sweep(catalog, spec)
    front = explorer.frontier(estimates, ph, cm)
    members = sorted({p.platform for p in front.points})
    infeasible = sorted(
        {(e.platform, e.reason) for e in estimates if not e.feasible and e.mode is cm}
    )
    params = {
        "model": model,
        "batch": batch,
        "seqlen": seqlen,
        "phase": ph.value,
        "mode": cm.value,
        "platforms": list(spec.platforms),
        "headroom": headroom,
        "overrides": overrides or {},
    }
    results = {
        "frontier": _frontier_dict(front),
        "members": members,
        "infeasible": [{"platform": p, "reason": r} for p, r in infeasible],
    }
    return envelope("frontier", catalog.version, params, results)


def op_trace(
    catalog: Catalog,
    csv_text: str,
    platform: Optional[str] = None,
    idle_power_hint: Optional[float] = None,
) -> dict[str, Any]:
    trace = traces.parse_power_trace_csv(csv_text)
    name = platform or trace.platform
    tdp = catalog.get_platform(name).tdp_w if name else None
    segments = traces.segment_trace(trace, idle_power_hint=idle_power_hint, tdp_w=tdp)
    params = {"platform": name, "idle_power_hint": idle_power_hint}
    results = {
        "platform": name,
        "idle_level_w": traces.idle_level(trace, idle_power_hint),
        "segments": [
            {
                "phase": s.phase.value,
                "start_s": s.start_s,
                "end_s": s.end_s,
                "peak_power_w": s.peak_power_w,
                "mean_power_w": s.mean_power_w,
                "fraction_of_tdp": s.fraction_of_tdp,
                "energy_j": traces.phase_energy(s),
            }
            for s in segments
        ],
    }
    return envelope("trace", catalog.version, params, results)


def op_commenergy(
    catalog: Catalog, csv_text: str, cycles_csv_text: Optional[str] = None
) -> dict[str, Any]:
    measurements = traces.parse_comm_energy_csv(csv_text)
    rows = []
    for m in measurements:
        energy, per_byte = traces.comm_energy(m)
        rows.append(
            {
                "platform": m.platform,
                "distance_mm": m.distance_mm,
                "energy_j": energy,
                "joules_per_byte": per_byte,
            }
        )
    results: dict[str, Any] = {
        "rows": rows,
        "note": (
            "energy = (P_benchmark - P_idle) x duration; the product form is "
            "the dimensionally consistent reading of the published expression"
        ),
    }
    if cycles_csv_text is not None:
        table = []
        for line in cycles_csv_text.splitlines():
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("distance"):
                continue
            d, cyc = line.split(",")
            table.append((float(d), float(cyc)))
        fit = traces.distance_cycles_fit(table)
        results["cycles_vs_distance"] = {
            "table": [{"distance_mm": d, "cycles": cyc} for d, cyc in table],
            "fit": {
                "slope_cycles_per_mm": fit.slope,
                "intercept_cycles": fit.intercept,
                "r_squared": fit.r_squared,
            },
        }
    return envelope("commenergy", catalog.version, {}, results)


def op_bench(
    catalog: Catalog,
    csv_text: str,
    baseline: str,
    metric: str = "latency",
    report: str = "speedup",
) -> dict[str, Any]:
    records = traces.parse_bench_csv(csv_text)
    params = {"baseline": baseline, "metric": metric, "report": report}
    if report == "latency":
        results: Any = traces.latency_report(records, baseline)
    elif report == "speedup":
        results = traces.speedup_matrix(records, baseline, metric)
    else:
        raise ValidationError("report must be 'speedup' or 'latency'")
    return envelope("bench", catalog.version, params, results)


def op_dutycycle(
    catalog: Catalog,
    platform_a: str,
    throughput_a: float,
    platform_b: str,
    throughput_b: float,
    cluster_a: int = 1,
    cluster_b: int = 1,
) -> dict[str, Any]:
    a = catalog.get_platform(platform_a)
    b = catalog.get_platform(platform_b)
    duty = traces.duty_cycle_parity(a, throughput_a, b, throughput_b, cluster_a, cluster_b)
    params = {
        "platform_a": platform_a,
        "throughput_a": throughput_a,
        "cluster_a": cluster_a,
        "platform_b": platform_b,
        "throughput_b": throughput_b,
        "cluster_b": cluster_b,
    }
    results = {"duty_cycle": duty}
    return envelope("dutycycle", catalog.version, params, results)
