"""Command-line entry point: one utterance in, one trace file out."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .export import HookAttachmentError, ModelLoadError, export_trace
from .traceformat import FormatWriteError


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="alsp-export",
        description="Dump per-layer audio hidden states into an alsp trace file.",
    )
    ap.add_argument("--model", required=True, help="model directory or hub id")
    ap.add_argument("--audio", required=True, help="16 kHz mono WAV file")
    group = ap.add_mutually_exclusive_group(required=True)
    group.add_argument("--transcript", help="reference text")
    group.add_argument("--transcript-file", help="file holding the reference text")
    ap.add_argument("--timestamps",
                    help="tabular (label, start_s, end_s) word alignment file")
    ap.add_argument("--layers", required=True,
                    help="comma-separated decoder layer indices to dump")
    ap.add_argument("--frame-rate", type=float,
                    help="override the recorded tokens/s (default: measured)")
    ap.add_argument("--device", default="cpu")
    ap.add_argument("-o", "--out", required=True)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    transcript = args.transcript
    if transcript is None:
        transcript = Path(args.transcript_file).read_text(encoding="utf-8").strip()
    layers = [int(x) for x in args.layers.split(",") if x != ""]
    if not layers:
        print("alsp-export: --layers is empty", file=sys.stderr)
        return 2
    try:
        summary = export_trace(
            args.model,
            args.audio,
            transcript,
            args.timestamps,
            layers,
            args.out,
            frame_rate=args.frame_rate,
            device=args.device,
        )
    except ModelLoadError as exc:
        print(f"alsp-export: model load failed: {exc}", file=sys.stderr)
        return 3
    except HookAttachmentError as exc:
        print(f"alsp-export: hook attachment failed: {exc}", file=sys.stderr)
        return 4
    except FormatWriteError as exc:
        print(f"alsp-export: trace write failed: {exc}", file=sys.stderr)
        return 5
    print(
        f"wrote {summary['out']}: layers {summary['layers']}, "
        f"{summary['audio_tokens']} audio + {summary['text_tokens']} text tokens, "
        f"{summary['frame_rate']:.2f} tokens/s"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
