"""Greedy similarity pooling, its budgeted variant, and multi-stage plans.

The scan itself lives in the kernels module (compiled with pure-python
fallback); this module owns parameter handling, group-map construction,
the exact-budget agglomeration, and multi-layer plan execution over
dumped traces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import (
    GroupMap,
    HiddenSequence,
    SelectionRecord,
    apply_groupmap,
    apply_selection,
)
from .errors import HookFailure, MissingLayer
from .traceio import TraceFile

_ZERO_EPS = 1e-12


@dataclass(frozen=True)
class AffinityParams:
    """Similarity threshold tau plus lookback window size omega (>= 1).

    The lookback compares a candidate token against the last omega RAW
    tokens of the current group, never against the running mean; that
    distinction changes results materially.
    """

    tau: float
    omega: int = 1

    def __post_init__(self):
        if not math.isfinite(self.tau):
            raise ValueError("tau must be finite")
        if self.omega < 1:
            raise ValueError("omega must be >= 1")
        object.__setattr__(self, "omega", int(self.omega))


def affinity_pool(seq: HiddenSequence, params: AffinityParams):
    """One greedy merging pass; returns (pooled sequence, GroupMap).

    Scans left to right: a token joins the current group when its cosine
    against any of the group's last min(size, omega) raw tokens reaches
    tau, otherwise the group is flushed as its mean and a new group opens.
    T=0 yields an empty result, T=1 the identity.
    """
    boundaries = kernels.pool_boundaries(seq.data, float(params.tau), params.omega)
    gm = GroupMap(tuple(int(b) for b in boundaries), seq.rows)
    return apply_groupmap(seq, gm), gm


def _adjacent_cosines(data: np.ndarray) -> np.ndarray:
    """cos(row[t-1], row[t]) for t = 1..T-1, float64, zero-norm rows -> 0."""
    work = data.astype(np.float64)
    norms = np.sqrt(np.einsum("ij,ij->i", work, work))
    dots = np.einsum("ij,ij->i", work[:-1], work[1:])
    denom = norms[:-1] * norms[1:]
    live = (norms[:-1] >= _ZERO_EPS) & (norms[1:] >= _ZERO_EPS)
    return np.where(live, dots / np.where(live, denom, 1.0), 0.0)


def budget_group_count(total: int, k_percent: float) -> int:
    return max(1, int(math.floor(k_percent / 100.0 * total)))


def budgeted_affinity(seq: HiddenSequence, k_percent: float):
    """Merge down to exactly max(1, floor(K/100 * T)) contiguous groups.

    Greedy agglomeration: repeatedly merge the adjacent group pair whose
    boundary similarity (cosine between the last raw token left of the
    boundary and the first raw token right of it) is largest, ties to the
    smaller left index.  Boundary similarities never change as groups
    merge, so the loop collapses to removing the top T-target boundaries
    in one pass.
    """
    if not (0.0 < k_percent <= 100.0):
        raise ValueError("k_percent must lie in (0, 100]")
    if seq.rows < 1:
        raise ValueError("budgeted pooling needs at least one token")
    target = budget_group_count(seq.rows, k_percent)
    sims = _adjacent_cosines(seq.data)
    n_remove = seq.rows - target
    # stable sort on -sim keeps earlier boundaries first within ties
    order = np.argsort(-sims, kind="stable")
    removed = set((order[:n_remove] + 1).tolist())
    boundaries = tuple(t for t in range(seq.rows) if t == 0 or t not in removed)
    gm = GroupMap(boundaries, seq.rows)
    return apply_groupmap(seq, gm), gm


# --- multi-stage plans ------------------------------------------------------

AFFINITY = "affinity"
BUDGETED = "budgeted_affinity"
ORACLE_OP = "oracle_op"
INTERPOLATE = "interpolate"


@dataclass(frozen=True)
class Stage:
    """One compression stage: which layer, which operator, its settings.

    params is an AffinityParams for "affinity", a K percentage for
    "budgeted_affinity" and "interpolate", and an InterventionSpec for
    "oracle_op".
    """

    layer: int
    method: str
    params: object

    def __post_init__(self):
        if self.method not in (AFFINITY, BUDGETED, ORACLE_OP, INTERPOLATE):
            raise ValueError(f"unknown stage method {self.method!r}")


@dataclass(frozen=True)
class CompressionPlan:
    """Ordered compression stages over strictly increasing layer indices.

    Word-aligned oracle stages need original token indices, so they may
    only come first; interpolation produces no merge record, so nothing
    may follow it.
    """

    stages: tuple

    def __post_init__(self):
        stages = tuple(self.stages)
        object.__setattr__(self, "stages", stages)
        layers = [s.layer for s in stages]
        if any(b <= a for a, b in zip(layers, layers[1:])):
            raise ValueError("stage layers must be strictly increasing")
        for pos, stage in enumerate(stages):
            if stage.method == ORACLE_OP and pos > 0:
                raise ValueError("oracle stages must come first in a plan")
            if stage.method == INTERPOLATE and pos != len(stages) - 1:
                raise ValueError("nothing may follow an interpolate stage")

    @classmethod
    def dual(cls, tau_in: float, tau_deep: float, l_in: int = 0, l_deep: int = 29,
             omega_in: int = 1, omega_deep: int = 3) -> "CompressionPlan":
        """Two-stage plan: tight window at the input, wider window deep."""
        return cls(
            (
                Stage(l_in, AFFINITY, AffinityParams(tau_in, omega_in)),
                Stage(l_deep, AFFINITY, AffinityParams(tau_deep, omega_deep)),
            )
        )


# threshold pairs for the two shipped operating points
PRESETS = {
    "aggressive": {"tau_in": 0.80, "tau_deep": 0.70},
    "conservative": {"tau_in": 0.90, "tau_deep": 0.80},
}


def preset_plan(name: str, l_in: int = 0, l_deep: int = 29,
                omega_in: int = 1, omega_deep: int = 3) -> CompressionPlan:
    taus = PRESETS[name]
    return CompressionPlan.dual(
        taus["tau_in"], taus["tau_deep"], l_in=l_in, l_deep=l_deep,
        omega_in=omega_in, omega_deep=omega_deep,
    )


def project_pipeline(seq: HiddenSequence, ops) -> HiddenSequence:
    """Apply a sequence of GroupMap / SelectionRecord ops to full-length rows."""
    out = seq
    for op in ops:
        if isinstance(op, GroupMap):
            out = apply_groupmap(out, op)
        elif isinstance(op, SelectionRecord):
            out = apply_selection(out, op)
        else:
            raise HookFailure(f"stage record {type(op).__name__} cannot be replayed")
    return out


@dataclass(frozen=True)
class StageResult:
    layer: int
    method: str
    rows_before: int
    rows_after: int
    record: object     # GroupMap / SelectionRecord over the stage's input rows
    approx: bool       # True when the input was replayed, not dumped


@dataclass(frozen=True)
class CompressionReport:
    """Outcome of running a plan over one trace."""

    original_len: int
    final_len: int
    per_layer_lengths: tuple   # audio length of the layer-l stream, l = 0..L
    stage_results: tuple
    pipeline: tuple            # stage records, in application order
    final_sequence: HiddenSequence | None

    @property
    def frr_percent(self) -> float:
        """Final retention ratio: surviving / original audio tokens, in %."""
        if self.original_len == 0:
            return 100.0
        return 100.0 * self.final_len / self.original_len

    def block_lengths(self, text_len: int = 0) -> list:
        """Total sequence length consumed by each transformer block.

        per_layer_lengths[l] is the inter-block stream l before any stage
        at l applies; a stage at layer l is first consumed by block l+1
        (blocks 1..L), and block b's input length equals
        per_layer_lengths[b].  Returns those L entries plus text_len each.
        """
        return [a + text_len for a in self.per_layer_lengths[1:]]


def dual_affinity(trace: TraceFile, plan: CompressionPlan, forward=None,
                  total_layers: int | None = None) -> CompressionReport:
    """Run a multi-stage plan over a dumped trace.

    `forward`, when given, must produce the audio states at a requested
    layer from the compression state so far: forward(trace, layer,
    pipeline) -> HiddenSequence.  Without it, later stages are replayed by
    pushing the dumped (uncompressed) layer through the records of the
    stages already applied; replay-fed stages are flagged approx (a dumped
    trace cannot know what a live model would have produced downstream of
    a merge).

    Records the audio length of every inter-block stream l = 0..L as it
    stood before any stage at that index; a stage at layer l therefore
    takes effect from entry l+1 on (see CompressionReport.block_lengths).
    """
    if not trace.layers:
        raise MissingLayer("trace declares no layers")
    first_layer = trace.layer_indices[0]
    original = trace.layers[first_layer].rows
    if total_layers is None:
        candidates = [s.layer for s in plan.stages] + trace.layer_indices
        total_layers = max(candidates) + 1

    by_layer = {s.layer: s for s in plan.stages}
    if by_layer and max(by_layer) > total_layers:
        raise MissingLayer(
            f"stage layer {max(by_layer)} beyond model depth {total_layers}"
        )

    pipeline: list = []
    stage_results: list = []
    lengths: list = []
    current_len = original
    current_seq: HiddenSequence | None = None

    for l in range(total_layers + 1):
        lengths.append(current_len)
        stage = by_layer.get(l)
        if stage is None:
            continue
        if not pipeline and l in trace.layers:
            seq = trace.layers[l]
            approx = False
        elif forward is not None:
            try:
                seq = forward(trace, l, tuple(pipeline))
            except MissingLayer:
                raise
            except Exception as exc:
                raise HookFailure(f"layer hook failed at layer {l}: {exc}") from exc
            approx = False
        elif l in trace.layers:
            seq = project_pipeline(trace.layers[l], pipeline)
            approx = True
        else:
            raise MissingLayer(f"trace has no layer {l} and no hook was supplied")
        if seq.rows != current_len:
            raise HookFailure(
                f"stage input at layer {l} has {seq.rows} rows, expected {current_len}"
            )
        pooled, record = _run_stage(seq, stage, trace)
        pipeline.append(record)
        stage_results.append(
            StageResult(l, stage.method, seq.rows, pooled.rows, record, approx)
        )
        current_len = pooled.rows
        current_seq = pooled

    return CompressionReport(
        original_len=original,
        final_len=current_len,
        per_layer_lengths=tuple(lengths),
        stage_results=tuple(stage_results),
        pipeline=tuple(pipeline),
        final_sequence=current_seq,
    )


class _NotReplayable:
    """Placeholder record for stages without a merge/selection structure."""

    def __repr__(self):
        return "<not replayable>"


def _run_stage(seq: HiddenSequence, stage: Stage, trace: TraceFile):
    from . import baselines, oracle  # local import to avoid a cycle

    if stage.method == AFFINITY:
        return affinity_pool(seq, stage.params)
    if stage.method == BUDGETED:
        return budgeted_affinity(seq, float(stage.params))
    if stage.method == INTERPOLATE:
        pooled = baselines.interpolate(seq, float(stage.params))
        return pooled, _NotReplayable()
    if stage.method == ORACLE_OP:
        spec = stage.params
        align = trace.alignment(stage.layer)
        return oracle.apply_intervention(seq, align, spec)
    raise ValueError(stage.method)
