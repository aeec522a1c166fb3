"""Standalone writer for the alsp trace file format, version 1.

This module deliberately re-implements the on-disk contract instead of
importing the consumer package: the byte layout IS the interface between
the exporter and the analysis toolkit.

    bytes 0..7    magic ``ALSPTRC1``
    bytes 8..11   u32 little-endian version (= 1)
    bytes 12..19  u64 little-endian header byte length H
    bytes 20..    UTF-8 JSON header (sorted keys, compact separators),
                  then the payload: per-layer row-major float32
                  little-endian matrices at header-declared offsets
                  relative to the payload start.
"""

from __future__ import annotations

import json
import struct

import numpy as np

MAGIC = b"ALSPTRC1"
VERSION = 1


class FormatWriteError(Exception):
    """Trace serialization failed (I/O or inconsistent inputs)."""


def write_trace_file(
    path,
    *,
    model: str,
    frame_rate: float,
    text_len: int,
    words,
    transcript: str,
    layers: dict,
    extra_header: dict | None = None,
) -> None:
    """Serialize per-layer float32 matrices plus metadata.

    `layers` maps layer index -> (rows, dim) numpy array; all layers must
    share one feature dimension.  `words` is an iterable of
    (label, start_s, end_s).  `extra_header` entries are merged into the
    JSON header (consumers ignore unknown keys).
    """
    if not layers:
        raise FormatWriteError("no layers to write")
    mats = {}
    dims = set()
    for idx in sorted(layers):
        arr = np.ascontiguousarray(layers[idx], dtype="<f4")
        if arr.ndim != 2:
            raise FormatWriteError(f"layer {idx} is not a matrix")
        if not np.all(np.isfinite(arr)):
            raise FormatWriteError(f"layer {idx} contains non-finite values")
        mats[int(idx)] = arr
        dims.add(arr.shape[1])
    if len(dims) != 1:
        raise FormatWriteError(f"layers disagree on feature dim: {sorted(dims)}")
    (dim,) = dims

    layer_ids = sorted(mats)
    rows = [mats[i].shape[0] for i in layer_ids]
    offsets = []
    cursor = 0
    for r in rows:
        offsets.append(cursor)
        cursor += r * dim * 4
    header = {
        "model": model,
        "dim": dim,
        "frame_rate": frame_rate,
        "text_len": int(text_len),
        "layers": layer_ids,
        "rows": rows,
        "offsets": offsets,
        "words": [[str(l), float(s), float(e)] for l, s, e in words],
        "transcript": transcript,
    }
    if extra_header:
        for key, value in extra_header.items():
            header.setdefault(key, value)
    blob = json.dumps(
        header, sort_keys=True, separators=(",", ":"), ensure_ascii=False
    ).encode("utf-8")
    try:
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<I", VERSION))
            fh.write(struct.pack("<Q", len(blob)))
            fh.write(blob)
            for i in layer_ids:
                fh.write(mats[i].tobytes())
    except OSError as exc:
        raise FormatWriteError(f"cannot write {path}: {exc}") from exc
