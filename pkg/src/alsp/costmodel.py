"""Analytic prefilling-FLOPs model and pooling-kernel microbenchmarks.

Convention: one multiply-accumulate counts as 2 flops; softmax, norms and
rotary embeddings are excluded (sub-percent), as are the embedding table,
LM head and audio encoder, none of which compression touches.  Ratios,
the quantity that matters, are insensitive to those additive terms.
"""

from __future__ import annotations

import configparser
import statistics
import time
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import kernels
from .errors import LengthCountMismatch

STANDARD = "standard"  # 2 matmuls: up, down
GATED = "gated"        # 3 matmuls: gate, up, down


@dataclass(frozen=True)
class ArchProfile:
    """Transformer shape parameters feeding the flops model."""

    name: str
    layers: int
    d_model: int
    heads: int
    head_dim: int
    ffn_dim: int
    ffn_kind: str = GATED
    kv_heads: int | None = None

    def __post_init__(self):
        for field_name in ("layers", "d_model", "heads", "head_dim", "ffn_dim"):
            if getattr(self, field_name) < 1:
                raise ValueError(f"{field_name} must be >= 1")
        if self.ffn_kind not in (STANDARD, GATED):
            raise ValueError(f"ffn_kind must be standard or gated, got {self.ffn_kind!r}")
        if self.kv_heads is None and self.heads * self.head_dim != self.d_model:
            raise ValueError(
                "heads * head_dim must equal d_model unless kv_heads is set explicitly"
            )

    @property
    def ffn_matmuls(self) -> int:
        return 3 if self.ffn_kind == GATED else 2


def load_profile(path_or_name) -> ArchProfile:
    """Read an ArchProfile from an INI file; bare names load shipped presets."""
    cp = configparser.ConfigParser()
    text = None
    name = str(path_or_name)
    if "/" not in name and not name.endswith(".ini"):
        preset = resources.files("alsp").joinpath(f"profiles/{name}.ini")
        if preset.is_file():
            text = preset.read_text()
    if text is None:
        with open(path_or_name) as fh:
            text = fh.read()
    cp.read_string(text)
    if "arch" not in cp:
        raise ValueError("profile must contain an [arch] section")
    sec = cp["arch"]
    kv = sec.get("kv_heads", fallback=None)
    return ArchProfile(
        name=sec.get("name", fallback="unnamed"),
        layers=sec.getint("layers"),
        d_model=sec.getint("d_model"),
        heads=sec.getint("heads"),
        head_dim=sec.getint("head_dim"),
        ffn_dim=sec.getint("ffn_dim"),
        ffn_kind=sec.get("ffn_kind", fallback=GATED),
        kv_heads=int(kv) if kv is not None else None,
    )


def prefill_flops(arch: ArchProfile, lengths, include_quadratic: bool = True) -> float:
    """Total prompt-processing flops given per-block sequence lengths.

    Per block with input length T: attention projections 8*T*d^2 (or the
    grouped-KV variant when kv_heads is set), attention scores and values
    4*T^2*d, and the FFN (4 or 6)*T*d*ffn.  include_quadratic=False drops
    the T^2 term (diagnostic: makes the total exactly linear in lengths).
    """
    lengths = list(lengths)
    if len(lengths) != arch.layers:
        raise LengthCountMismatch(
            f"expected {arch.layers} lengths, got {len(lengths)}"
        )
    if any(t < 0 for t in lengths):
        raise ValueError("sequence lengths must be >= 0")
    d = arch.d_model
    if arch.kv_heads is None:
        proj_per_token = 8 * d * d
    else:
        kv_dim = arch.kv_heads * arch.head_dim
        proj_per_token = 4 * d * d + 4 * d * kv_dim
    ffn_per_token = 2 * arch.ffn_matmuls * d * arch.ffn_dim
    total = 0.0
    for t in lengths:
        total += t * (proj_per_token + ffn_per_token)
        if include_quadratic:
            total += 4.0 * t * t * d
    return total


def flops_ratio(plan_lengths, vanilla_lengths, arch: ArchProfile,
                include_quadratic: bool = True) -> float:
    """100 * prefill_flops(plan) / prefill_flops(vanilla)."""
    if len(list(plan_lengths)) != len(list(vanilla_lengths)):
        raise LengthCountMismatch("plan and vanilla length lists differ in size")
    plan = prefill_flops(arch, plan_lengths, include_quadratic)
    vanilla = prefill_flops(arch, vanilla_lengths, include_quadratic)
    return 100.0 * plan / vanilla


def reported_ratio(plan_gflops: float, vanilla_gflops: float) -> float:
    """Ratio in percent straight from two already-measured GFLOPs figures."""
    return 100.0 * plan_gflops / vanilla_gflops


# --- microbenchmark of the pooling kernel ------------------------------------


@dataclass(frozen=True)
class BenchRow:
    backend: str
    rows: int
    dim: int
    omega: int
    tau: float
    median_ns: int
    p95_ns: int


def bench_pooling(sizes, tau: float = 0.8, omega: int = 3, repetitions: int = 9,
                  seed: int = 0, backends=None, warmup: int = 2) -> list:
    """Wall-clock medians for the pooling scan at each (T, d) cell.

    Inputs are deterministic from the seed; the measured region runs the
    selected kernel single-threaded on a monotonic clock.  By default only
    the production backend is timed; pass backends=("compiled", "python")
    to compare both (the repo ships a compiled kernel and a pure-python
    fallback precisely so this comparison stays honest).
    """
    if repetitions < 5:
        raise ValueError("need at least 5 repetitions")
    available = kernels.available_backends()
    if backends is None:
        names = [kernels.BACKEND]
    else:
        names = [b for b in backends if b in available]
    rng = np.random.default_rng(seed)
    rows_out = []
    for (t_rows, dim) in sizes:
        data = rng.standard_normal((t_rows, dim)).astype(np.float32)
        for name in names:
            fn = available[name]
            for _ in range(warmup):
                fn(data, tau, omega)
            samples = []
            for _ in range(repetitions):
                t0 = time.perf_counter_ns()
                fn(data, tau, omega)
                samples.append(time.perf_counter_ns() - t0)
            samples.sort()
            median = int(statistics.median(samples))
            p95 = samples[min(len(samples) - 1, int(np.ceil(0.95 * len(samples))) - 1)]
            rows_out.append(BenchRow(name, t_rows, dim, omega, tau, median, int(p95)))
    return rows_out
