"""SVG and CSV emitters for flow views and IIET graphs.

Output depends only on the inputs: fixed palette, fixed number formatting, no
timestamps. Exact band and piece geometry is carried in ``data-*`` attributes
with 17 significant digits; drawing coordinates are rounded to 0.001 px.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Literal, Mapping
from xml.sax.saxutils import quoteattr

from .address import address_to_word, format_address
from .subst import DEFAULT_MAX_WORD
from .iet import FiniteIET
from .partition import DEFAULT_MAX_ADDRESSES, PhiConfig, enumerate_addresses, interval_of

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")
AXIS_COLOR = "#000000"
SEGMENT_COLOR = "#1f4e9c"
JUMP_COLOR = "#6fa8dc"


@dataclass(frozen=True)
class RenderSpec:
    level: int = 2
    window: float = 10.0
    width: int = 800
    height: int = 600
    lengths: Literal["unit", "natural"] = "unit"
    palette: Mapping[str, str] | None = None
    connectors: bool = True
    max_addresses: int = DEFAULT_MAX_ADDRESSES
    max_word: int = DEFAULT_MAX_WORD

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window half-width must be at least 1")
        if self.level < 0:
            raise ValueError("level must be nonnegative")
        if self.lengths not in ("unit", "natural"):
            raise ValueError("lengths must be 'unit' or 'natural'")

    def colors(self, alphabet) -> dict[str, str]:
        base = {a: PALETTE[i % len(PALETTE)] for i, a in enumerate(alphabet)}
        base.update(self.palette or {})
        return base


@dataclass
class Band:
    address: str
    y: float
    height: float
    word: str
    origin: int
    cells: list[tuple[float, float, str]] = field(default_factory=list)


def _g17(x: float) -> str:
    return f"{float(x):.17g}"


def _px(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


def tile_widths(config: PhiConfig, lengths: str) -> dict[str, float]:
    if lengths == "unit":
        return {a: 1.0 for a in config.rule.alphabet}
    l = config.perron.l
    return {a: float(l[i]) for i, a in enumerate(config.rule.alphabet)}


def _cells(word: str, origin: int, widths: Mapping[str, float], window: float) -> list[tuple[float, float, str]]:
    cells = []
    # walk right from the origin letter, then left
    x = 0.0
    for c in word[origin - 1 :]:
        if x >= window:
            break
        x1 = x + widths[c]
        cells.append((x, min(x1, window), c))
        x = x1
    x = 0.0
    for c in reversed(word[: origin - 1]):
        if x <= -window:
            break
        x0 = x - widths[c]
        cells.append((max(x0, -window), x, c))
        x = x0
    cells = [cell for cell in cells if cell[1] - cell[0] > 1e-12]
    cells.sort()
    return cells


def flow_view_bands(config: PhiConfig, spec: RenderSpec) -> list[Band]:
    """One band per level-n address: its supertile word laid out around the origin."""
    rule = config.rule
    widths = tile_widths(config, spec.lengths)
    bands = []
    if spec.level == 0:
        for a in rule.alphabet:
            bands.append(Band(a, config.phi0[a], config.mu(a), a, 1, _cells(a, 1, widths, spec.window)))
    else:
        for p in enumerate_addresses(rule, spec.level, spec.max_addresses):
            iv = interval_of(config, p)
            word, origin = address_to_word(rule, p, spec.max_word)
            bands.append(Band(format_address(p), iv.left, iv.length, word, origin, _cells(word, origin, widths, spec.window)))
    bands.sort(key=lambda b: b.y)
    return bands


def _svg_open(width: int, height: int, title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<title>{title}</title>",
        f'<rect class="background" x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]


def flow_view_svg(config: PhiConfig, spec: RenderSpec) -> str:
    bands = flow_view_bands(config, spec)
    colors = spec.colors(config.rule.alphabet)
    w, h, win = spec.width, spec.height, spec.window

    def sx(x):
        return (x + win) / (2 * win) * w

    def sy(y):
        return (1.0 - y) * h

    out = _svg_open(w, h, f"flow view, level {spec.level}, {spec.lengths} lengths")
    for b in bands:
        out.append(
            f'<g class="band" data-address={quoteattr(b.address)} data-y="{_g17(b.y)}" '
            f'data-height="{_g17(b.height)}" data-origin="{b.origin}">'
        )
        top, bottom = sy(b.y + b.height), sy(b.y)
        for x0, x1, c in b.cells:
            out.append(
                f'<rect x="{_px(sx(x0))}" y="{_px(top)}" width="{_px(sx(x1) - sx(x0))}" '
                f'height="{_px(bottom - top)}" fill="{colors[c]}" stroke="none" data-letter={quoteattr(c)}/>'
            )
        out.append("</g>")
    out.append(
        f'<line class="axis" x1="{_px(sx(0))}" y1="{_px(sy(0))}" x2="{_px(sx(0))}" y2="{_px(sy(1))}" '
        f'stroke="{AXIS_COLOR}" stroke-width="1.5"/>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def flow_view_csv(config: PhiConfig, spec: RenderSpec) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["address", "y", "height", "x0", "x1", "letter"])
    for b in flow_view_bands(config, spec):
        for x0, x1, c in b.cells:
            writer.writerow([b.address, _g17(b.y), _g17(b.height), _g17(x0), _g17(x1), c])
    return buf.getvalue()


def iet_segments(iet: FiniteIET) -> list[tuple[float, float, float, float]]:
    return [
        (float(a), float(a + t), float(a + ln), float(a + ln + t))
        for a, ln, t in zip(iet.lefts, iet.lengths, iet.translations)
    ]


def iet_jumps(iet: FiniteIET, tol: float = 1e-12) -> list[tuple[float, float, float]]:
    """(x, y_from, y_to) for each jump discontinuity between consecutive pieces."""
    segs = iet_segments(iet)
    jumps = []
    for s0, s1 in zip(segs, segs[1:]):
        if abs(s0[3] - s1[1]) > tol:
            jumps.append((s1[0], s0[3], s1[1]))
    return jumps


def iet_graph_svg(iet: FiniteIET, spec: RenderSpec) -> str:
    side = min(spec.width, spec.height)

    def sx(x):
        return x * side

    def sy(y):
        return (1.0 - y) * side

    label = "" if iet.level is None else f" level {iet.level}"
    out = _svg_open(side, side, f"interval exchange{label}, {len(iet)} pieces")
    out.append(
        f'<rect class="frame" x="0" y="0" width="{side}" height="{side}" fill="none" stroke="{AXIS_COLOR}" '
        'stroke-width="1"/>'
    )
    if spec.connectors:
        for x, y0, y1 in iet_jumps(iet):
            out.append(
                f'<line class="jump" x1="{_px(sx(x))}" y1="{_px(sy(y0))}" x2="{_px(sx(x))}" y2="{_px(sy(y1))}" '
                f'stroke="{JUMP_COLOR}" stroke-width="0.5"/>'
            )
    for (x0, y0, x1, y1), t in zip(iet_segments(iet), iet.translations):
        out.append(
            f'<line class="piece" x1="{_px(sx(x0))}" y1="{_px(sy(y0))}" x2="{_px(sx(x1))}" y2="{_px(sy(y1))}" '
            f'stroke="{SEGMENT_COLOR}" stroke-width="1" data-left="{_g17(x0)}" data-translation="{_g17(t)}"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def iet_graph_csv(iet: FiniteIET) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x0", "y0", "x1", "y1"])
    for seg in iet_segments(iet):
        writer.writerow([_g17(v) for v in seg])
    return buf.getvalue()
