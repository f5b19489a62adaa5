"""Transformer inference arithmetic: FLOP counts, weight bytes, KV-cache bytes.

Conventions, applied uniformly so cross-platform ratios are unaffected:
  * one multiply-accumulate = 2 FLOPs,
  * causal masking halves prefill attention score/value work,
  * the logits projection is folded into ``n_params``.

All counts are Python ints, so there is no overflow at any model scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .catalog import LlmModelConfig
from .errors import MissingShapeError, ValidationError


class Phase(str, Enum):
    PREFILL = "prefill"
    DECODE = "decode"


@dataclass(frozen=True)
class InferencePoint:
    """One workload operating point: model, batch, prompt and context length."""

    model: LlmModelConfig
    batch: int
    prompt_len: int
    context_len: int
    phase: Phase

    def __post_init__(self) -> None:
        if self.batch < 1:
            raise ValidationError("batch must be >= 1")
        if self.prompt_len < 1:
            raise ValidationError("prompt_len must be >= 1")
        if self.context_len < self.prompt_len:
            raise ValidationError("context_len must be >= prompt_len")


def prefill_flops(point: InferencePoint) -> int:
    """FLOPs to process the full prompt once.

    B * (2 * n_params * s  +  2 * n_layers * s^2 * d_model): the weight term
    counts one MAC as 2 FLOPs over all parameters; the attention term covers
    QK^T and score*V with the causal 1/2 factor applied.
    """
    if point.phase is not Phase.PREFILL:
        raise ValidationError("prefill_flops requires a Prefill-phase point")
    m, s = point.model, point.prompt_len
    return point.batch * (2 * m.n_params * s + 2 * m.n_layers * s * s * m.d_model)


def decode_flops_per_token(model: LlmModelConfig, context_len: int) -> int:
    """FLOPs per generated token per sequence at context length t.

    2 * n_params for the weight pass plus 4 * n_layers * t * d_model for
    attention against the cached context.
    """
    if context_len < 1:
        raise ValidationError("context_len must be >= 1")
    return 2 * model.n_params + 4 * model.n_layers * context_len * model.d_model


def weight_bytes(model: LlmModelConfig, bytes_per_param: int | None = None) -> int:
    b = model.bytes_per_param if bytes_per_param is None else bytes_per_param
    return model.n_params * b


def kv_cache_bytes(
    model: LlmModelConfig,
    batch: int,
    context_len: int,
    bytes_per_kv_elem: int | None = None,
) -> int:
    """Bytes of K and V retained across decode steps for the whole batch."""
    if batch < 1 or context_len < 1:
        raise ValidationError("batch and context_len must be >= 1")
    b = model.bytes_per_kv_elem if bytes_per_kv_elem is None else bytes_per_kv_elem
    return 2 * model.n_layers * model.n_kv_heads * model.d_head * context_len * batch * b


def param_count_oracle(model: LlmModelConfig) -> int:
    """Shape-derived parameter count, independent of ``n_params``.

    Sums token embeddings, per-layer attention projections (grouped-query KV),
    gated MLP, per-layer norms, the final norm, and an untied output head.
    Used to enforce the catalog's 2% agreement invariant.
    """
    required = ("n_layers", "d_model", "n_heads", "n_kv_heads", "d_head", "d_ff", "vocab_size")
    for name in required:
        if getattr(model, name, None) is None:
            raise MissingShapeError(f"model {model.name!r}: missing shape field {name}")
    d, kv_dim = model.d_model, model.n_kv_heads * model.d_head
    embed = model.vocab_size * d
    attn = d * d + 2 * d * kv_dim + d * d  # Q, K, V, O projections
    mlp = 3 * d * model.d_ff  # gate, up, down
    norms = 2 * d
    per_layer = attn + mlp + norms
    head = model.vocab_size * d
    return embed + model.n_layers * per_layer + d + head
