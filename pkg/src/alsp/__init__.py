"""alsp: token-sequence compression for audio language model traces.

Greedy similarity pooling with a lookback window, word-aligned oracle
interventions, budget baselines, WER/cWER scoring, cosine-dynamics
probes, and an analytic prefilling-FLOPs model, all operating on
serialized hidden-state traces so nothing here needs a live model.
"""

from .affinity import (
    AffinityParams,
    CompressionPlan,
    CompressionReport,
    PRESETS,
    Stage,
    affinity_pool,
    budgeted_affinity,
    dual_affinity,
    preset_plan,
)
from .baselines import interpolate
from .core import (
    Alignment,
    GroupMap,
    HiddenSequence,
    SelectionRecord,
    WordUnit,
    apply_groupmap,
    apply_selection,
    cosine,
    mean_pool,
)
from .costmodel import ArchProfile, bench_pooling, flops_ratio, load_profile, prefill_flops
from .kernels import BACKEND
from .metrics import (
    ScoredPair,
    corpus_wer,
    global_mean_similarity,
    levenshtein,
    max_within_words,
    neighbor_similarity,
    retention_report,
    tokenize,
)
from .oracle import InterventionSpec, random_drop, uniform_drop, uniform_merge
from .traceio import (
    SynthSpec,
    TraceFile,
    WordStamp,
    generate_synthetic,
    read_trace,
    timestamps_to_alignment,
    write_trace,
)

__version__ = "0.1.0"
