"""Hardware platform and LLM model database.

The catalog is loaded once from a JSON file (the bundled reference dataset by
default), validated field by field, and treated as immutable afterwards, so it
can be shared read-only across threads and requests.
"""

from __future__ import annotations

import difflib
import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

from .errors import NotFoundError, ParseError, ValidationError

BUNDLED_CATALOG_RESOURCE = "data/reference_catalog.json"


class MemType(str, Enum):
    SRAM = "SRAM"
    DRAM = "DRAM"


class Parallelism(str, Enum):
    TP = "TP"
    PP = "PP"


@dataclass(frozen=True)
class Hierarchy:
    """Block/accelerator abstraction: compute cores with private SRAM."""

    cores_per_block: int
    sram_per_block_bytes: int
    blocks_per_accelerator: int


@dataclass(frozen=True)
class AcceleratorSpec:
    """One platform's compute/memory/power/area/interconnect parameters.

    ``mem_capacity_bytes`` and ``mem_bw_bytes_per_s`` describe the accessible
    working memory: the tier that holds model weights and KV cache (on-chip
    SRAM for wafer/LPU designs, DRAM elsewhere).
    """

    name: str
    peak_flops: float
    mem_type: MemType
    mem_capacity_bytes: float
    mem_bw_bytes_per_s: float
    tdp_w: float
    idle_fraction: float
    prefill_power_fraction: float
    decode_power_fraction: float
    interconnect_bw_bytes_per_s: float
    interconnect_latency_s: float
    allocation_quantum: int
    supported_parallelisms: tuple[Parallelism, ...]
    precision_note: str
    die_area_mm2: Optional[float] = None
    hierarchy: Optional[Hierarchy] = None

    def supports(self, p: Parallelism) -> bool:
        return p in self.supported_parallelisms

    def validate(self) -> None:
        def bad(rule: str) -> ValidationError:
            return ValidationError(f"platform {self.name!r}: {rule}")

        if not self.name:
            raise ValidationError("platform with empty name")
        if not self.peak_flops > 0:
            raise bad("peak_flops must be > 0")
        if not self.mem_capacity_bytes > 0:
            raise bad("mem_capacity_bytes must be > 0")
        if not self.mem_bw_bytes_per_s > 0:
            raise bad("mem_bw_bytes_per_s must be > 0")
        if not self.tdp_w > 0:
            raise bad("tdp_w must be > 0")
        if not 0 <= self.idle_fraction <= self.decode_power_fraction <= 1:
            raise bad("requires 0 <= idle_fraction <= decode_power_fraction <= 1")
        if not 0 < self.prefill_power_fraction <= 1:
            raise bad("prefill_power_fraction must be in (0, 1]")
        if self.allocation_quantum < 1:
            raise bad("allocation_quantum must be >= 1")
        if not self.supported_parallelisms:
            raise bad("supported_parallelisms must be non-empty")
        if self.die_area_mm2 is not None and not self.die_area_mm2 > 0:
            raise bad("die_area_mm2 must be > 0 when present")
        if not self.interconnect_bw_bytes_per_s > 0:
            raise bad("interconnect_bw_bytes_per_s must be > 0")
        if not self.interconnect_latency_s > 0:
            raise bad("interconnect_latency_s must be > 0")


@dataclass(frozen=True)
class LlmModelConfig:
    """Transformer shape parameters and parameter count for a named model."""

    name: str
    n_layers: int
    d_model: int
    n_heads: int
    n_kv_heads: int
    d_head: int
    d_ff: int
    vocab_size: int
    n_params: int
    bytes_per_param: int = 2
    bytes_per_kv_elem: int = 2

    def validate(self) -> None:
        def bad(rule: str) -> ValidationError:
            return ValidationError(f"model {self.name!r}: {rule}")

        if not self.name:
            raise ValidationError("model with empty name")
        counts = {
            "n_layers": self.n_layers,
            "d_model": self.d_model,
            "n_heads": self.n_heads,
            "n_kv_heads": self.n_kv_heads,
            "d_head": self.d_head,
            "d_ff": self.d_ff,
            "vocab_size": self.vocab_size,
            "n_params": self.n_params,
            "bytes_per_param": self.bytes_per_param,
            "bytes_per_kv_elem": self.bytes_per_kv_elem,
        }
        for fname, value in counts.items():
            if value < 1:
                raise bad(f"{fname} must be >= 1")
        if self.d_model != self.n_heads * self.d_head:
            raise bad("d_model must equal n_heads * d_head")
        if self.n_heads % self.n_kv_heads != 0:
            raise bad("n_kv_heads must divide n_heads")
        # The 2% agreement between n_params and the shape-derived count is
        # enforced at catalog load (see Catalog._check_param_counts) so this
        # module stays import-free of the workload arithmetic.


@dataclass(frozen=True)
class Catalog:
    platforms: tuple[AcceleratorSpec, ...]
    models: tuple[LlmModelConfig, ...]
    version: str = "unversioned"
    _platform_index: Mapping[str, AcceleratorSpec] = field(default_factory=dict, repr=False)
    _model_index: Mapping[str, LlmModelConfig] = field(default_factory=dict, repr=False)

    @property
    def platform_names(self) -> list[str]:
        return [p.name for p in self.platforms]

    @property
    def model_names(self) -> list[str]:
        return [m.name for m in self.models]

    def get_platform(self, name: str) -> AcceleratorSpec:
        try:
            return self._platform_index[name]
        except KeyError:
            suggestions = difflib.get_close_matches(name, self.platform_names, n=3)
            hint = f"; did you mean {', '.join(suggestions)}?" if suggestions else ""
            raise NotFoundError(f"unknown platform {name!r}{hint}", suggestions) from None

    def get_model(self, name: str) -> LlmModelConfig:
        try:
            return self._model_index[name]
        except KeyError:
            suggestions = difflib.get_close_matches(name, self.model_names, n=3)
            hint = f"; did you mean {', '.join(suggestions)}?" if suggestions else ""
            raise NotFoundError(f"unknown model {name!r}{hint}", suggestions) from None

    def serialize(self) -> dict[str, Any]:
        return {
            "platforms": [_platform_to_dict(p) for p in self.platforms],
            "models": [_model_to_dict(m) for m in self.models],
        }


_PLATFORM_FIELDS = {
    "name",
    "peak_flops",
    "mem_type",
    "mem_capacity_bytes",
    "mem_bw_bytes_per_s",
    "tdp_w",
    "idle_fraction",
    "prefill_power_fraction",
    "decode_power_fraction",
    "die_area_mm2",
    "interconnect_bw_bytes_per_s",
    "interconnect_latency_s",
    "allocation_quantum",
    "supported_parallelisms",
    "precision_note",
    "hierarchy",
}
_PLATFORM_REQUIRED = _PLATFORM_FIELDS - {"die_area_mm2", "hierarchy"}
_HIERARCHY_FIELDS = {"cores_per_block", "sram_per_block_bytes", "blocks_per_accelerator"}
_MODEL_FIELDS = {
    "name",
    "n_layers",
    "d_model",
    "n_heads",
    "n_kv_heads",
    "d_head",
    "d_ff",
    "vocab_size",
    "n_params",
    "bytes_per_param",
    "bytes_per_kv_elem",
}


def _reject_unknown(record: Mapping[str, Any], allowed: set[str], what: str) -> None:
    unknown = set(record) - allowed
    if unknown:
        raise ValidationError(f"{what}: unknown fields {sorted(unknown)}")


def _parse_platform(record: Mapping[str, Any]) -> AcceleratorSpec:
    if not isinstance(record, Mapping):
        raise ValidationError("platform record must be a JSON object")
    name = record.get("name", "<unnamed>")
    _reject_unknown(record, _PLATFORM_FIELDS, f"platform {name!r}")
    missing = _PLATFORM_REQUIRED - set(record)
    if missing:
        raise ValidationError(f"platform {name!r}: missing fields {sorted(missing)}")
    try:
        mem_type = MemType(record["mem_type"])
    except ValueError:
        raise ValidationError(
            f"platform {name!r}: mem_type must be one of {[m.value for m in MemType]}"
        ) from None
    raw_par = record["supported_parallelisms"]
    if not isinstance(raw_par, Sequence) or isinstance(raw_par, str):
        raise ValidationError(f"platform {name!r}: supported_parallelisms must be a list")
    try:
        parallelisms = tuple(Parallelism(p) for p in raw_par)
    except ValueError:
        raise ValidationError(
            f"platform {name!r}: supported_parallelisms entries must be TP or PP"
        ) from None
    hierarchy = None
    if record.get("hierarchy") is not None:
        hraw = record["hierarchy"]
        if not isinstance(hraw, Mapping):
            raise ValidationError(f"platform {name!r}: hierarchy must be an object")
        _reject_unknown(hraw, _HIERARCHY_FIELDS, f"platform {name!r} hierarchy")
        if set(hraw) != _HIERARCHY_FIELDS:
            raise ValidationError(
                f"platform {name!r}: hierarchy needs fields {sorted(_HIERARCHY_FIELDS)}"
            )
        hierarchy = Hierarchy(
            cores_per_block=int(hraw["cores_per_block"]),
            sram_per_block_bytes=int(hraw["sram_per_block_bytes"]),
            blocks_per_accelerator=int(hraw["blocks_per_accelerator"]),
        )
    spec = AcceleratorSpec(
        name=str(record["name"]),
        peak_flops=float(record["peak_flops"]),
        mem_type=mem_type,
        mem_capacity_bytes=float(record["mem_capacity_bytes"]),
        mem_bw_bytes_per_s=float(record["mem_bw_bytes_per_s"]),
        tdp_w=float(record["tdp_w"]),
        idle_fraction=float(record["idle_fraction"]),
        prefill_power_fraction=float(record["prefill_power_fraction"]),
        decode_power_fraction=float(record["decode_power_fraction"]),
        die_area_mm2=None if record.get("die_area_mm2") is None else float(record["die_area_mm2"]),
        interconnect_bw_bytes_per_s=float(record["interconnect_bw_bytes_per_s"]),
        interconnect_latency_s=float(record["interconnect_latency_s"]),
        allocation_quantum=int(record["allocation_quantum"]),
        supported_parallelisms=parallelisms,
        precision_note=str(record["precision_note"]),
        hierarchy=hierarchy,
    )
    spec.validate()
    return spec


def _parse_model(record: Mapping[str, Any]) -> LlmModelConfig:
    if not isinstance(record, Mapping):
        raise ValidationError("model record must be a JSON object")
    name = record.get("name", "<unnamed>")
    _reject_unknown(record, _MODEL_FIELDS, f"model {name!r}")
    missing = _MODEL_FIELDS - set(record)
    if missing:
        raise ValidationError(f"model {name!r}: missing fields {sorted(missing)}")
    model = LlmModelConfig(
        name=str(record["name"]),
        n_layers=int(record["n_layers"]),
        d_model=int(record["d_model"]),
        n_heads=int(record["n_heads"]),
        n_kv_heads=int(record["n_kv_heads"]),
        d_head=int(record["d_head"]),
        d_ff=int(record["d_ff"]),
        vocab_size=int(record["vocab_size"]),
        n_params=int(record["n_params"]),
        bytes_per_param=int(record["bytes_per_param"]),
        bytes_per_kv_elem=int(record["bytes_per_kv_elem"]),
    )
    model.validate()
    return model


def _platform_to_dict(p: AcceleratorSpec) -> dict[str, Any]:
    out: dict[str, Any] = {
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
    if p.hierarchy is not None:
        out["hierarchy"] = {
            "cores_per_block": p.hierarchy.cores_per_block,
            "sram_per_block_bytes": p.hierarchy.sram_per_block_bytes,
            "blocks_per_accelerator": p.hierarchy.blocks_per_accelerator,
        }
    return out


def _model_to_dict(m: LlmModelConfig) -> dict[str, Any]:
    return {
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


def _check_param_counts(models: Sequence[LlmModelConfig]) -> None:
    # Imported here to keep catalog <-> workload dependencies one-directional
    # at module import time.
    from .workload import param_count_oracle

    for m in models:
        derived = param_count_oracle(m)
        rel = abs(m.n_params - derived) / derived
        if rel > 0.02:
            raise ValidationError(
                f"model {m.name!r}: n_params {m.n_params} deviates "
                f"{rel:.1%} from shape-derived count {derived} (limit 2%)"
            )


def parse_catalog(payload: Any, version: str = "unversioned") -> Catalog:
    """Validate an already-decoded catalog payload into a Catalog."""
    if not isinstance(payload, Mapping):
        raise ValidationError("catalog must be a JSON object")
    _reject_unknown(payload, {"platforms", "models"}, "catalog")
    for key in ("platforms", "models"):
        if key not in payload or not isinstance(payload[key], list):
            raise ValidationError(f"catalog: {key!r} must be a list")
    platforms = [_parse_platform(r) for r in payload["platforms"]]
    models = [_parse_model(r) for r in payload["models"]]
    if not platforms:
        raise ValidationError("catalog: platform list is empty")
    if not models:
        raise ValidationError("catalog: model list is empty")
    for records, what in ((platforms, "platform"), (models, "model")):
        seen: set[str] = set()
        for r in records:
            if r.name in seen:
                raise ValidationError(f"duplicate {what} name {r.name!r}")
            seen.add(r.name)
    _check_param_counts(models)
    return Catalog(
        platforms=tuple(platforms),
        models=tuple(models),
        version=version,
        _platform_index={p.name: p for p in platforms},
        _model_index={m.name: m for m in models},
    )


def load_catalog(path: str | Path) -> Catalog:
    """Load and validate a catalog file (UTF-8 JSON)."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise ParseError(f"cannot read catalog {path}: {e}") from e
    try:
        payload = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ParseError(f"catalog {path} is not valid UTF-8 JSON: {e}") from e
    version = hashlib.sha256(raw).hexdigest()[:12]
    return parse_catalog(payload, version=version)


def save_catalog(catalog: Catalog, path: str | Path) -> None:
    Path(path).write_text(json.dumps(catalog.serialize(), indent=2) + "\n", encoding="utf-8")


def bundled_catalog_path() -> Path:
    """Path of the reference catalog shipped inside the package."""
    return Path(str(resources.files(__package__).joinpath(BUNDLED_CATALOG_RESOURCE)))


def bundled_measurements_dir() -> Path:
    """Directory of the bundled measured-results dataset."""
    return Path(str(resources.files(__package__).joinpath("data/paper_measurements")))


def load_bundled_catalog() -> Catalog:
    return load_catalog(bundled_catalog_path())
