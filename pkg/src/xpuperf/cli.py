"""Command-line front door: every analysis as a subcommand.

Results go to stdout as JSON (the same envelopes the HTTP service returns);
``--out`` writes a CSV rendering for plotting. Exit codes: 0 success, 1
validation/lookup error, 2 infeasibility.
"""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path
from typing import Any, Optional

import click

from . import ops
from .catalog import Catalog, bundled_catalog_path, load_catalog
from .errors import (
    InfeasibleError,
    InfeasiblePlanError,
    NoParityError,
    XpuPerfError,
)

_EXIT_INFEASIBLE = (InfeasibleError, InfeasiblePlanError, NoParityError)

# Exit codes: 0 success, 1 validation/usage, 2 infeasible. Click defaults
# usage errors to 2, which would collide with the infeasibility code.
click.UsageError.exit_code = 1


def _load(catalog_path: Optional[str]) -> Catalog:
    return load_catalog(catalog_path or bundled_catalog_path())


def _emit(env: dict[str, Any], out: Optional[str], rows: Optional[list[dict[str, Any]]]) -> None:
    click.echo(json.dumps(env, indent=2, sort_keys=False))
    if out:
        if not rows:
            raise click.ClickException("this command has no CSV rendering")
        with open(out, "w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)


def _run(fn, *args, out: Optional[str] = None, to_rows=None, **kwargs) -> None:
    try:
        env = fn(*args, **kwargs)
    except _EXIT_INFEASIBLE as e:
        click.echo(f"infeasible: {e}", err=True)
        sys.exit(2)
    except XpuPerfError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(1)
    _emit(env, out, to_rows(env) if to_rows else None)


def _csv_list(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def _int_list(value: str) -> list[int]:
    return [int(v) for v in _csv_list(value)]


catalog_option = click.option(
    "--catalog",
    "catalog_path",
    envvar="XPU_CATALOG",
    default=None,
    help="Catalog JSON path (default: bundled reference catalog).",
)
out_option = click.option("--out", default=None, help="Also write results as CSV to this path.")


@click.group()
def main() -> None:
    """Analytical accelerator comparison and LLM inference cost modeling."""


@main.command()
@catalog_option
@out_option
@click.option("--platform", required=True)
@click.option("--samples", default=100, show_default=True)
@click.option("--min-ai", default=0.01, show_default=True)
@click.option("--max-ai", default=1e5, show_default=True)
def roofline(catalog_path, out, platform, samples, min_ai, max_ai) -> None:
    """Attainable FLOP/s versus arithmetic intensity, plus the ridge point."""

    def rows(env):
        return [
            {"arithmetic_intensity": p["arithmetic_intensity"], "attainable_flops": p["attainable_flops"]}
            for p in env["results"]["points"]
        ]

    _run(ops.op_roofline, _load(catalog_path), platform, samples, min_ai, max_ai,
         out=out, to_rows=rows)


@main.command()
@catalog_option
@out_option
@click.option("--metric", required=True, type=click.Choice(["power", "bwcap", "area"]))
@click.option("--platforms", default=None, help="Comma-separated platform names (default: all).")
def equiv(catalog_path, out, metric, platforms) -> None:
    """Pairwise FLOPS-equivalent comparison matrix."""
    cat = _load(catalog_path)
    names = _csv_list(platforms) if platforms else cat.platform_names

    def rows(env):
        r = env["results"]
        return [
            {"platform": a, **{b: v for b, v in zip(r["platforms"], row)}}
            for a, row in zip(r["platforms"], r["values"])
        ]

    _run(ops.op_equiv, cat, metric, names, out=out, to_rows=rows)


@main.command()
@catalog_option
@click.option("--platform", required=True)
@click.option("--model", required=True)
@click.option("--batch", default=1, show_default=True)
@click.option("--seqlen", required=True, type=int)
@click.option("--headroom", default=0.9, show_default=True)
def scaleout(catalog_path, platform, model, batch, seqlen, headroom) -> None:
    """Minimum device count and per-precision capacity-division report."""
    _run(ops.op_scaleout, _load(catalog_path), platform, model, batch, seqlen, headroom)


@main.command()
@catalog_option
@click.option("--platform", required=True)
@click.option("--model", required=True)
@click.option("--batch", default=1, show_default=True)
@click.option("--seqlen", required=True, type=int)
@click.option("--prompt-len", default=None, type=int)
@click.option("--tp", default=1, show_default=True)
@click.option("--pp", default=1, show_default=True)
@click.option("--mode", default="realistic", type=click.Choice(["optimistic", "realistic"]))
@click.option("--headroom", default=0.9, show_default=True)
def estimate(catalog_path, platform, model, batch, seqlen, prompt_len, tp, pp, mode, headroom) -> None:
    """TTFT/TPOT/energy estimate for one (platform, model, plan) scenario."""
    _run(
        ops.op_estimate,
        _load(catalog_path),
        platform,
        model,
        batch,
        seqlen,
        tp,
        pp,
        mode,
        prompt_len,
        headroom,
    )


def _estimate_rows(env):
    out = []
    for e in env["results"]["estimates"]:
        out.append(
            {
                "platform": e["platform"],
                "model": e["model"],
                "batch": e["point"]["batch"],
                "context_len": e["point"]["context_len"],
                "mode": e["mode"],
                "tp": e["plan"]["tp"],
                "pp": e["plan"]["pp"],
                "n_devices": e["plan"]["n_devices"],
                "n_devices_allocated": e["n_devices_allocated"],
                "ttft_s": e["ttft_s"],
                "tpot_s": e["tpot_s"],
                "comm_prefill_s": e["comm_prefill_s"],
                "comm_decode_s": e["comm_decode_s"],
                "energy_per_output_token_j": e["energy_per_output_token_j"],
                "energy_per_input_token_j": e["energy_per_input_token_j"],
                "feasible": e["feasible"],
                "reason": e["reason"],
            }
        )
    return out


@main.command()
@catalog_option
@out_option
@click.option("--platforms", default=None, help="Comma-separated (default: all).")
@click.option("--models", required=True, help="Comma-separated model names.")
@click.option("--batches", required=True, help="Comma-separated batch sizes.")
@click.option("--seqlens", required=True, help="Comma-separated context lengths.")
@click.option("--mode", default="both", type=click.Choice(["optimistic", "realistic", "both"]))
@click.option("--headroom", default=0.9, show_default=True)
@click.option("--overrides", default=None, help='JSON, e.g. \'{"Groq": {"bytes_per_param": 1}}\'.')
def sweep(catalog_path, out, platforms, models, batches, seqlens, mode, headroom, overrides) -> None:
    """Grid sweep; returns pareto-relevant estimates plus per-mode frontiers."""
    _run(
        ops.op_sweep,
        _load(catalog_path),
        _csv_list(models),
        _int_list(batches),
        _int_list(seqlens),
        _csv_list(platforms) if platforms else None,
        mode,
        headroom,
        json.loads(overrides) if overrides else None,
        out=out,
        to_rows=_estimate_rows,
    )


@main.command()
@catalog_option
@out_option
@click.option("--platforms", default=None, help="Comma-separated (default: all).")
@click.option("--model", required=True)
@click.option("--batch", default=1, show_default=True)
@click.option("--seqlen", required=True, type=int)
@click.option("--phase", required=True, type=click.Choice(["prefill", "decode"]))
@click.option("--mode", required=True, type=click.Choice(["optimistic", "realistic"]))
@click.option("--headroom", default=0.9, show_default=True)
@click.option("--overrides", default=None, help="JSON per-platform byte widths.")
def frontier(catalog_path, out, platforms, model, batch, seqlen, phase, mode, headroom, overrides) -> None:
    """Pareto frontier membership for one workload point."""

    def rows(env):
        return [
            {
                "x": p["x"],
                "y": p["y"],
                "platform": p["platform"],
                "tp": p["tp"],
                "pp": p["pp"],
                "n_devices": p["n_devices"],
                "mode": p["mode"],
            }
            for p in env["results"]["frontier"]["points"]
        ]

    _run(
        ops.op_frontier,
        _load(catalog_path),
        model,
        batch,
        seqlen,
        phase,
        mode,
        _csv_list(platforms) if platforms else None,
        headroom,
        json.loads(overrides) if overrides else None,
        out=out,
        to_rows=rows,
    )


@main.command()
@catalog_option
@out_option
@click.option("--file", "path", required=True, type=click.Path(exists=True))
@click.option("--platform", default=None, help="Override the trace's platform comment.")
@click.option("--idle-hint", default=None, type=float, help="Idle threshold in watts.")
def trace(catalog_path, out, path, platform, idle_hint) -> None:
    """Segment a power trace CSV into idle/prefill/decode phases."""

    def rows(env):
        return list(env["results"]["segments"])

    _run(
        ops.op_trace,
        _load(catalog_path),
        Path(path).read_text(encoding="utf-8"),
        platform,
        idle_hint,
        out=out,
        to_rows=rows,
    )


@main.command()
@catalog_option
@out_option
@click.option("--file", "path", required=True, type=click.Path(exists=True))
@click.option(
    "--cycles-file",
    default=None,
    type=click.Path(exists=True),
    help="Optional distance_mm,cycles CSV; adds a table and linear fit.",
)
def commenergy(catalog_path, out, path, cycles_file) -> None:
    """Joules and joules-per-byte for transfer benchmark measurements."""

    def rows(env):
        return list(env["results"]["rows"])

    _run(
        ops.op_commenergy,
        _load(catalog_path),
        Path(path).read_text(encoding="utf-8"),
        Path(cycles_file).read_text(encoding="utf-8") if cycles_file else None,
        out=out,
        to_rows=rows,
    )


@main.command()
@catalog_option
@click.option("--file", "path", required=True, type=click.Path(exists=True))
@click.option("--baseline", required=True)
@click.option("--metric", default="latency", type=click.Choice(["latency", "power"]))
@click.option("--report", default="speedup", type=click.Choice(["speedup", "latency"]))
def bench(catalog_path, path, baseline, metric, report) -> None:
    """Speedup/overhead matrices or normalized latency tables from benchmark CSVs."""
    _run(
        ops.op_bench,
        _load(catalog_path),
        Path(path).read_text(encoding="utf-8"),
        baseline,
        metric,
        report,
    )


@main.command()
@catalog_option
@click.option("--platform-a", required=True)
@click.option("--throughput-a", required=True, type=float, help="Tokens/s for cluster A.")
@click.option("--platform-b", required=True)
@click.option("--throughput-b", required=True, type=float, help="Tokens/s for cluster B.")
@click.option("--cluster-a", default=1, show_default=True)
@click.option("--cluster-b", default=1, show_default=True)
def dutycycle(catalog_path, platform_a, throughput_a, platform_b, throughput_b, cluster_a, cluster_b) -> None:
    """Duty cycle at which A's energy/token matches B running at full duty."""
    _run(
        ops.op_dutycycle,
        _load(catalog_path),
        platform_a,
        throughput_a,
        platform_b,
        throughput_b,
        cluster_a,
        cluster_b,
    )


@main.command()
@catalog_option
@click.option("--addr", default="127.0.0.1:8080", show_default=True)
def serve(catalog_path, addr) -> None:
    """Run the HTTP JSON API."""
    import uvicorn

    from .service import create_app

    host, _, port = addr.partition(":")
    app = create_app(_load(catalog_path))
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8080))


if __name__ == "__main__":
    main()
