"""Command-line surface tying the toolkit together.

Exit codes: 0 success, 2 usage error, 3 missing layer, 4 missing
alignment, 5 corpus mismatch, 6 config error.  All tabular output is
RFC-4180 CSV with a header row preceded by a schema-version comment;
every subcommand taking a --seed is byte-deterministic across runs.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import costmodel, metrics, oracle, viz
from .affinity import (
    AffinityParams,
    CompressionPlan,
    PRESETS,
    affinity_pool,
    budgeted_affinity,
    dual_affinity,
    preset_plan,
)
from .errors import (
    AlignmentMismatch,
    AlspError,
    EmptyReferenceCorpus,
    MissingLayer,
)
from .traceio import SynthSpec, TraceFile, generate_synthetic, read_trace, write_trace

EXIT_USAGE = 2
EXIT_MISSING_LAYER = 3
EXIT_MISSING_ALIGNMENT = 4
EXIT_CORPUS_MISMATCH = 5
EXIT_CONFIG = 6


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _fail(message: str, code: int):
    raise CliError(message, code)


# --- CSV helpers -------------------------------------------------------------


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _write_csv(path, schema: str, header, rows, comments=()):
    stream, owned = _open_out(path)
    try:
        stream.write(f"# schema: alsp.{schema}.v1\r\n")
        for line in comments:
            stream.write(f"# {line}\r\n")
        writer = csv.writer(stream, lineterminator="\r\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if owned:
            stream.close()


def _ratio(x: float) -> str:
    return f"{x:.4f}"


def _pct(x: float) -> str:
    return f"{x:.2f}"


def _int_list(text: str):
    return [int(x) for x in text.split(",") if x != ""]


def _float_list(text: str):
    return [float(x) for x in text.split(",") if x != ""]


def _load_trace(path) -> TraceFile:
    return read_trace(path)


def _need_layer(trace: TraceFile, layer: int):
    if layer not in trace.layers:
        _fail(
            f"trace has no layer {layer} (available: {trace.layer_indices})",
            EXIT_MISSING_LAYER,
        )
    return trace.layers[layer]


def _need_alignment(trace: TraceFile, layer: int):
    if not trace.words:
        _fail("trace carries no word timestamps", EXIT_MISSING_ALIGNMENT)
    return trace.alignment(layer)


# --- subcommands -------------------------------------------------------------


def cmd_synth(args) -> int:
    try:
        spec = SynthSpec(
            word_count=args.words,
            dim=args.dim,
            seed=args.seed,
            tokens_per_word=(args.tokens_min, args.tokens_max),
            within_word_similarity=args.within,
            across_word_similarity=args.across,
            noise_sigma=args.noise_sigma,
            frame_rate=args.frame_rate,
            layers=tuple(_int_list(args.layers)),
        )
    except ValueError as exc:
        _fail(f"invalid synthesis spec: {exc}", EXIT_USAGE)
    trace = generate_synthetic(spec)
    write_trace(args.out, trace)
    total = trace.layers[spec.layers[0]].rows
    print(f"wrote {args.out}: {len(spec.layers)} layer(s), {total} tokens, dim {spec.dim}")
    return 0


def _compressed_trace(trace: TraceFile, layer: int, seq) -> TraceFile:
    # word timestamps no longer index the merged tokens, so they are dropped
    return trace.with_layers({layer: seq}, drop_words=True)


def cmd_compress(args) -> int:
    if (args.tau is None) == (args.budget is None):
        _fail("exactly one of --tau or --budget is required", EXIT_USAGE)
    trace = _load_trace(args.trace)
    seq = _need_layer(trace, args.layer)
    if args.tau is not None:
        pooled, gm = affinity_pool(seq, AffinityParams(args.tau, args.omega))
        tau_s, omega_s = repr(args.tau), str(args.omega)
    else:
        pooled, gm = budgeted_affinity(seq, args.budget)
        tau_s, omega_s = "", ""
    if args.out:
        write_trace(args.out, _compressed_trace(trace, args.layer, pooled))
    row = [args.layer, tau_s, omega_s, seq.rows, pooled.rows, _ratio(gm.retention_ratio)]
    _write_csv(
        args.report, "compress",
        ["layer", "tau", "omega", "t_before", "t_after", "retention"], [row],
    )
    return 0


def cmd_intervene(args) -> int:
    op = args.op.replace("-", "_")
    if op == oracle.RANDOM_DROP and args.seed is None:
        _fail("--seed is required for random-drop", EXIT_USAGE)
    trace = _load_trace(args.trace)
    seq = _need_layer(trace, args.layer)
    align = _need_alignment(trace, args.layer)
    spec = oracle.InterventionSpec(op, args.budget, args.layer, args.seed or 0)
    compressed, record = oracle.apply_intervention(seq, align, spec)
    if args.out:
        write_trace(args.out, _compressed_trace(trace, args.layer, compressed))
    report = metrics.retention_report(record, align)
    rows = [
        [i, u.label, u.size, kept]
        for i, (u, kept) in enumerate(zip(align.units, report.per_unit_lengths))
    ]
    _write_csv(
        args.report, "intervene",
        ["unit", "label", "n_tokens", "kept"], rows,
        comments=[
            f"operator={args.op} budget={args.budget}",
            f"retention_incl_gaps={_ratio(report.gap_inclusive_ratio)} "
            f"retention_excl_gaps={_ratio(report.gap_exclusive_ratio)}",
        ],
    )
    return 0


def cmd_dap(args) -> int:
    trace = _load_trace(args.trace)
    if args.preset:
        plan = preset_plan(
            args.preset, l_in=args.l_in, l_deep=args.l_deep,
            omega_in=args.omega_in, omega_deep=args.omega_deep,
        )
    elif args.tau_in is not None and args.tau_deep is not None:
        plan = CompressionPlan.dual(
            args.tau_in, args.tau_deep, l_in=args.l_in, l_deep=args.l_deep,
            omega_in=args.omega_in, omega_deep=args.omega_deep,
        )
    else:
        plan = CompressionPlan(())
    arch = None
    if args.arch:
        try:
            arch = costmodel.load_profile(args.arch)
        except (OSError, ValueError, KeyError) as exc:
            _fail(f"cannot load arch profile {args.arch!r}: {exc}", EXIT_CONFIG)
    total_layers = arch.layers if arch else None
    report = dual_affinity(trace, plan, total_layers=total_layers)

    comments = [f"frr_percent={_pct(report.frr_percent)}", f"text_len={trace.text_len}"]
    stage_bits = []
    for sr in report.stage_results:
        flag = "approx" if sr.approx else "exact"
        stage_bits.append(f"{sr.layer}:{sr.method}:{sr.rows_before}->{sr.rows_after}:{flag}")
    comments.append("stages=" + (";".join(stage_bits) if stage_bits else "none"))
    ratio = None
    if arch is not None:
        vanilla = [report.original_len + trace.text_len] * arch.layers
        ratio = costmodel.flops_ratio(report.block_lengths(trace.text_len), vanilla, arch)
        comments.append(f"flops_ratio={_pct(ratio)}")
    rows = [[l, n] for l, n in enumerate(report.per_layer_lengths)]
    _write_csv(args.report, "dap", ["layer", "audio_tokens"], rows, comments=comments)

    if args.out and report.final_sequence is not None:
        last_layer = report.stage_results[-1].layer
        write_trace(args.out, _compressed_trace(trace, last_layer, report.final_sequence))
    print(f"FRR {_pct(report.frr_percent)}")
    for bit in stage_bits:
        print(f"stage {bit}")
    if ratio is not None:
        print(f"FLOPs ratio {_pct(ratio)}")
    return 0


def cmd_dynamics(args) -> int:
    trace = _load_trace(args.trace)
    ks = _int_list(args.k)
    if not ks:
        _fail("need at least one k", EXIT_USAGE)
    want_within = not args.no_within
    missing_alignment = want_within and not trace.words
    rows = []
    for layer, seq in trace.layers.items():
        for k in ks:
            val = metrics.neighbor_similarity(seq, k, mode=args.mode)
            rows.append([layer, "neighbor", k, _ratio(val)])
        rows.append([layer, "global_mean", "", _ratio(metrics.global_mean_similarity(seq))])
        if want_within and trace.words:
            align = trace.alignment(layer)
            try:
                val = metrics.max_within_words(seq, align)
            except AlspError:
                continue
            rows.append([layer, "max_within_words", "", _ratio(val)])
    _write_csv(
        args.report, "dynamics",
        ["layer", "metric", "k", "value"], rows,
        comments=[f"mode={args.mode}"],
    )
    if missing_alignment:
        print("trace carries no word timestamps; within-word metric omitted", file=sys.stderr)
        return EXIT_MISSING_ALIGNMENT
    return 0


def _sweep_cell(traces, layer, tau, om):
    total_tokens = 0
    total_groups = 0
    t0 = time.perf_counter_ns()
    for trace in traces:
        seq = trace.layers[layer]
        _, gm = affinity_pool(seq, AffinityParams(tau, om))
        total_tokens += seq.rows
        total_groups += gm.group_count
    wall = time.perf_counter_ns() - t0
    retention = total_groups / total_tokens if total_tokens else 1.0
    return [layer, repr(tau), om, _ratio(retention), total_groups, wall]


def cmd_sweep(args) -> int:
    layers = _int_list(args.layers)
    taus = _float_list(args.taus)
    omegas = _int_list(args.omegas)
    if not layers or not taus or not omegas:
        _fail("sweep grid is empty", EXIT_USAGE)
    if args.dir:
        paths = sorted(Path(args.dir).glob("*.trc"))
        if not paths:
            _fail(f"no .trc files under {args.dir}", EXIT_USAGE)
    else:
        paths = [Path(args.trace)]
    traces = [_load_trace(p) for p in paths]
    for trace, p in zip(traces, paths):
        for layer in layers:
            if layer not in trace.layers:
                _fail(f"{p}: trace has no layer {layer}", EXIT_MISSING_LAYER)

    cells = sorted((l, t, o) for l in layers for t in taus for o in omegas)
    workers = int(os.environ.get("ALSP_THREADS", "1") or "1")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = dict(
                zip(cells, pool.map(lambda c: _sweep_cell(traces, *c), cells))
            )
    else:
        results = {c: _sweep_cell(traces, *c) for c in cells}
    rows = [results[c] for c in cells]
    _write_csv(
        args.report, "sweep",
        ["layer", "tau", "omega", "retention", "groups", "wall_ns"], rows,
        comments=[f"traces={len(traces)}"],
    )
    return 0


def cmd_score(args) -> int:
    try:
        ref_lines = Path(args.ref).read_text(encoding="utf-8").splitlines()
        hyp_lines = Path(args.hyp).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        _fail(str(exc), EXIT_USAGE)
    if len(ref_lines) != len(hyp_lines):
        _fail(
            f"line counts differ: {len(ref_lines)} references vs {len(hyp_lines)} hypotheses",
            EXIT_CORPUS_MISMATCH,
        )
    pairs = [
        metrics.ScoredPair.from_texts(r, h, mode=args.mode)
        for r, h in zip(ref_lines, hyp_lines)
    ]
    try:
        wer = metrics.corpus_wer(pairs, clamp=False)
        cwer = metrics.corpus_wer(pairs, clamp=True)
    except AlspError as exc:
        _fail(str(exc), EXIT_CORPUS_MISMATCH)
    if args.clamp:
        print(f"cWER {_pct(100.0 * cwer)}")
    else:
        print(f"WER {_pct(100.0 * wer)}")
        print(f"cWER {_pct(100.0 * cwer)}")
    return 0


def cmd_viz(args) -> int:
    trace = _load_trace(args.trace)
    seq = _need_layer(trace, args.layer)
    if args.budget is not None:
        _, gm = budgeted_affinity(seq, args.budget)
    else:
        _, gm = affinity_pool(seq, AffinityParams(args.tau, args.omega))
    align = trace.alignment(args.layer) if trace.words else None
    if args.format == "svg":
        rendered = viz.render_svg(gm, align)
    else:
        rendered = viz.render_text(gm, align)
    stream, owned = _open_out(args.out)
    try:
        stream.write(rendered)
    finally:
        if owned:
            stream.close()
    return 0


def _read_lengths(path):
    values = []
    for tok in Path(path).read_text().split():
        values.append(int(tok))
    return values


def _parse_dap_report(path):
    lengths = []
    frr = None
    text_len = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line.startswith("#"):
                body = line.lstrip("# ")
                if body.startswith("text_len="):
                    text_len = int(body.split("=", 1)[1])
                continue
            if not line or line.startswith("layer"):
                continue
            _, audio = line.split(",")
            lengths.append(int(audio))
    return lengths, text_len


def cmd_cost(args) -> int:
    if args.ratio_only:
        plan_g, vanilla_g = args.ratio_only
        print(f"FLOPs ratio {_pct(costmodel.reported_ratio(plan_g, vanilla_g))}")
        return 0
    try:
        arch = costmodel.load_profile(args.arch)
    except (OSError, ValueError, KeyError, configparser.Error) as exc:
        _fail(f"cannot load arch profile {args.arch!r}: {exc}", EXIT_CONFIG)
    if args.from_dap:
        audio_lengths, text_len = _parse_dap_report(args.from_dap)
        if len(audio_lengths) != arch.layers + 1:
            _fail(
                f"report has {len(audio_lengths)} per-layer lengths, "
                f"profile {arch.name} expects {arch.layers + 1}",
                EXIT_CONFIG,
            )
        plan = [a + text_len for a in audio_lengths[1:]]
        vanilla = [audio_lengths[0] + text_len] * arch.layers
    elif args.lengths:
        plan = _read_lengths(args.lengths)
        vanilla = _read_lengths(args.vanilla) if args.vanilla else None
    else:
        _fail("one of --ratio-only, --lengths, --from-dap is required", EXIT_USAGE)
    try:
        plan_flops = costmodel.prefill_flops(arch, plan)
    except AlspError as exc:
        _fail(str(exc), EXIT_CONFIG)
    print(f"GFLOPs {plan_flops / 1e9:.2f}")
    if args.from_dap or (args.lengths and args.vanilla):
        vanilla_flops = costmodel.prefill_flops(arch, vanilla)
        print(f"vanilla GFLOPs {vanilla_flops / 1e9:.2f}")
        print(f"FLOPs ratio {_pct(100.0 * plan_flops / vanilla_flops)}")
    return 0


def cmd_bench(args) -> int:
    sizes = []
    for chunk in args.sizes.split(","):
        t, d = chunk.lower().split("x")
        sizes.append((int(t), int(d)))
    backends = ("compiled", "python") if args.compare else None
    rows = costmodel.bench_pooling(
        sizes, tau=args.tau, omega=args.omega,
        repetitions=args.reps, seed=args.seed, backends=backends,
    )
    header = ["T", "d", "omega", "tau", "median_ns", "p95_ns"]
    out_rows = []
    for r in rows:
        base = [r.rows, r.dim, r.omega, repr(r.tau), r.median_ns, r.p95_ns]
        if args.compare:
            base.append(r.backend)
        out_rows.append(base)
    if args.compare:
        header = header + ["backend"]
    _write_csv(args.report, "bench", header, out_rows)
    return 0


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="alsp",
        description="Token-sequence compression toolkit for audio language model traces.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic trace")
    p.add_argument("--words", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--tokens-min", type=int, default=2)
    p.add_argument("--tokens-max", type=int, default=6)
    p.add_argument("--within", type=float, default=0.9)
    p.add_argument("--across", type=float, default=0.1)
    p.add_argument("--noise-sigma", type=float, default=1.0)
    p.add_argument("--frame-rate", type=float, default=25.0)
    p.add_argument("--layers", default="0", help="comma-separated layer indices")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("compress", help="similarity pooling on one layer")
    p.add_argument("--trace", required=True)
    p.add_argument("--layer", type=int, required=True)
    p.add_argument("--tau", type=float)
    p.add_argument("--omega", type=int, default=1)
    p.add_argument("--budget", type=float, help="exact retention budget K%%")
    p.add_argument("-o", "--out", help="write the compressed trace here")
    p.add_argument("--report", help="CSV report path (default stdout)")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("intervene", help="word-aligned oracle operator")
    p.add_argument("--trace", required=True)
    p.add_argument("--layer", type=int, default=0)
    p.add_argument("--op", required=True,
                   choices=["random-drop", "uniform-drop", "uniform-merge"])
    p.add_argument("--budget", type=int, required=True, help="tokens per unit R")
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--out")
    p.add_argument("--report")
    p.set_defaults(func=cmd_intervene)

    p = sub.add_parser("dap", help="dual-stage pooling plan over a trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--tau-in", type=float)
    p.add_argument("--tau-deep", type=float)
    p.add_argument("--l-in", type=int, default=0)
    p.add_argument("--l-deep", type=int, default=29)
    p.add_argument("--omega-in", type=int, default=1)
    p.add_argument("--omega-deep", type=int, default=3)
    p.add_argument("--arch", help="arch profile for the FLOPs ratio")
    p.add_argument("-o", "--out")
    p.add_argument("--report")
    p.set_defaults(func=cmd_dap)

    p = sub.add_parser("dynamics", help="cosine-dynamics metrics per layer")
    p.add_argument("--trace", required=True)
    p.add_argument("--k", default="1,3,5,10")
    p.add_argument("--mode", choices=[metrics.TEMPORAL, metrics.FEATURE],
                   default=metrics.TEMPORAL)
    p.add_argument("--no-within", action="store_true",
                   help="skip the within-word metric")
    p.add_argument("--report")
    p.set_defaults(func=cmd_dynamics)

    p = sub.add_parser("sweep", help="grid of pooling runs")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--trace")
    group.add_argument("--dir", help="directory of .trc files")
    p.add_argument("--layers", required=True)
    p.add_argument("--taus", required=True)
    p.add_argument("--omegas", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("score", help="corpus WER / clamped WER")
    p.add_argument("--ref", required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--clamp", action="store_true")
    p.add_argument("--mode", choices=[metrics.WORD, metrics.CHAR], default=metrics.WORD)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("viz", help="render token groups for one layer")
    p.add_argument("--trace", required=True)
    p.add_argument("--layer", type=int, required=True)
    p.add_argument("--tau", type=float, default=0.7)
    p.add_argument("--omega", type=int, default=3)
    p.add_argument("--budget", type=float)
    p.add_argument("--format", choices=["svg", "text"], default="svg")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_viz)

    p = sub.add_parser("cost", help="prefilling FLOPs and ratio accounting")
    p.add_argument("--arch")
    p.add_argument("--lengths", help="file of per-block total lengths")
    p.add_argument("--vanilla", help="baseline lengths file")
    p.add_argument("--from-dap", help="dap report CSV")
    p.add_argument("--ratio-only", nargs=2, type=float, metavar=("PLAN", "VANILLA"),
                   help="ratio of two already-measured GFLOPs figures")
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("bench", help="pooling kernel microbenchmark")
    p.add_argument("--sizes", default="1000x64,2000x64",
                   help="comma list of TxD cells")
    p.add_argument("--tau", type=float, default=0.8)
    p.add_argument("--omega", type=int, default=3)
    p.add_argument("--reps", type=int, default=9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--compare", action="store_true",
                   help="time both the compiled and pure-python backends")
    p.add_argument("--report")
    p.set_defaults(func=cmd_bench)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "cost" and not (args.ratio_only or args.arch):
        ap.error("cost requires --arch (or --ratio-only)")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"alsp {args.command}: {exc}", file=sys.stderr)
        return exc.code
    except (AlspError, ValueError) as exc:
        code = EXIT_USAGE
        if isinstance(exc, MissingLayer):
            code = EXIT_MISSING_LAYER
        elif isinstance(exc, AlignmentMismatch):
            code = EXIT_MISSING_ALIGNMENT
        elif isinstance(exc, EmptyReferenceCorpus):
            code = EXIT_CORPUS_MISMATCH
        print(f"alsp {args.command}: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
