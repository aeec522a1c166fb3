"""Token-group strip renderings: SVG and plain-text.

One row per call: colored spans for merged groups, vertical ticks at word
boundaries, and the group count on the right axis.  Output is a pure
function of the inputs (fixed palette, fixed geometry), so renders are
byte-stable across runs.
"""

from __future__ import annotations

from .core import Alignment, GroupMap

PALETTE = (
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
)

_STRIP_X = 10.0
_STRIP_W = 800.0
_STRIP_Y = 18.0
_STRIP_H = 28.0
_WIDTH = 880
_HEIGHT = 64


def _x(token: int, total: int) -> float:
    return _STRIP_X + (_STRIP_W * token / total if total else 0.0)


def render_svg(gm: GroupMap, align: Alignment | None = None) -> str:
    """SVG strip for one layer's grouping; valid (empty) for T = 0."""
    total = gm.original_len
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect x="{_STRIP_X}" y="{_STRIP_Y}" width="{_STRIP_W}" '
        f'height="{_STRIP_H}" fill="none" stroke="#333" stroke-width="1"/>',
    ]
    for g, (start, end) in enumerate(gm.intervals()):
        x0 = _x(start, total)
        x1 = _x(end, total)
        color = PALETTE[g % len(PALETTE)]
        parts.append(
            f'<rect x="{x0:.3f}" y="{_STRIP_Y}" width="{x1 - x0:.3f}" '
            f'height="{_STRIP_H}" fill="{color}"/>'
        )
    if align is not None:
        ticks = sorted({u.start for u in align.units} | {u.end for u in align.units})
        for t in ticks:
            x = _x(t, total)
            parts.append(
                f'<line x1="{x:.3f}" y1="{_STRIP_Y - 6}" x2="{x:.3f}" '
                f'y2="{_STRIP_Y + _STRIP_H + 6}" stroke="#000" stroke-width="1"/>'
            )
    label_x = _STRIP_X + _STRIP_W + 8
    parts.append(
        f'<text x="{label_x:.0f}" y="{_STRIP_Y + _STRIP_H / 2 + 4:.0f}" '
        f'font-family="monospace" font-size="13">{gm.group_count}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_text(gm: GroupMap, align: Alignment | None = None) -> str:
    """Two-line text strip: bracketed group spans over word-boundary ticks.

    One character per token: a singleton group prints '#', larger groups
    print '[', interior '-', ']'.  The tick line marks unit starts/ends
    with '|'.
    """
    total = gm.original_len
    cells = []
    for start, end in gm.intervals():
        size = end - start
        if size == 1:
            cells.append("#")
        else:
            cells.append("[" + "-" * (size - 2) + "]")
    strip = "".join(cells) + f"  <{gm.group_count}>"
    if align is None:
        return strip + "\n"
    ticks = [" "] * (total + 1)
    for u in align.units:
        ticks[u.start] = "|"
        ticks[u.end] = "|"
    return strip + "\n" + "".join(ticks).rstrip() + "\n"
