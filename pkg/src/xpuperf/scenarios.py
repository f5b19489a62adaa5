"""Documented reference studies used by reports, acceptance checks, and the UI.

These pin the free parameters of the long-context frontier analysis so that
results are reproducible:

* Deployment byte widths: the SRAM-only rack platform (Groq) cannot hold large
  models at 2 bytes/element within its plan limits and serves them quantized,
  so its study precision is 1 byte for weights, KV, and activations. All other
  platforms run at the fp16 defaults.
* Study headroom 0.8: large-batch serving reserves a fifth of working memory
  for activations and runtime state. This is the binding constraint that
  produces the wafer platform's capacity exit from the batch-64 frontier;
  at the sizing default of 0.9 it would still (barely) fit.
"""

from __future__ import annotations

from .catalog import Catalog
from .distmodel import ByteWidths
from .explorer import SweepSpec
from .workload import Phase
from .distmodel import CommMode

DEFAULT_BATCH_GRID = (1, 4, 16, 64, 256)
FRONTIER_STUDY_HEADROOM = 0.8
DEPLOYMENT_WIDTHS: dict[str, ByteWidths] = {
    "Groq": ByteWidths(bytes_per_param=1, bytes_per_kv_elem=1, bytes_per_act=1),
}


def long_context_frontier_spec(
    catalog: Catalog,
    model: str = "Llama-3.1-70B",
    batches: tuple[int, ...] = DEFAULT_BATCH_GRID,
    context_len: int = 131072,
) -> SweepSpec:
    """Batch sweep of one model at long context across the whole catalog."""
    return SweepSpec(
        platforms=tuple(catalog.platform_names),
        models=(model,),
        batches=tuple(batches),
        context_lens=(context_len,),
        phases=(Phase.PREFILL, Phase.DECODE),
        modes=(CommMode.OPTIMISTIC, CommMode.REALISTIC),
        headroom=FRONTIER_STUDY_HEADROOM,
        overrides=dict(DEPLOYMENT_WIDTHS),
    )
