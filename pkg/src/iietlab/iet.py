"""Finite interval exchanges: approximants of the IIET, evaluation, composition."""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .address import Label, extremal_address, format_address, is_final, vershik
from .errors import CapExceeded, MaxDepthExceeded
from .partition import (
    PhiConfig,
    count_dual_orders,
    default_config,
    enumerate_dual_orders,
    interval_of,
    iter_digits,
    phi_n,
)

TILE_TOL = 1e-10
SLIVER = 1e-14
TRANSLATION_TOL = 1e-12
DEFAULT_MAX_PIECES = 10**6
DEFAULT_MAX_DEPTH = 64


@dataclass(frozen=True, eq=False)
class FiniteIET:
    """Pieces ``[left, left + length) -> + translation``, sorted by left."""

    lefts: np.ndarray
    lengths: np.ndarray
    translations: np.ndarray
    level: int | None = None
    addresses: tuple[str, ...] | None = None
    source: str = ""

    def __post_init__(self):
        for name in ("lefts", "lengths", "translations"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (len(self.lefts) == len(self.lengths) == len(self.translations)) or len(self.lefts) == 0:
            raise ValueError("a FiniteIET needs matching, nonempty piece arrays")

    def __len__(self):
        return len(self.lefts)

    @property
    def rights(self) -> np.ndarray:
        return self.lefts + self.lengths

    def __call__(self, x):
        return evaluate(self, x)

    def tiling_errors(self) -> tuple[float, float]:
        """Worst gap/overlap of the domain tiling and of the image tiling of [0, 1)."""
        return _tiling_error(self.lefts, self.lengths), _tiling_error(self.lefts + self.translations, self.lengths)

    def is_exchange(self, tol: float = TILE_TOL) -> bool:
        dom, img = self.tiling_errors()
        return dom <= tol and img <= tol

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["left", "length", "translation", "level", "address"])
        level = "" if self.level is None else str(self.level)
        for i in range(len(self)):
            addr = self.addresses[i] if self.addresses is not None else ""
            writer.writerow([_g17(self.lefts[i]), _g17(self.lengths[i]), _g17(self.translations[i]), level, addr])
        return buf.getvalue()


def _g17(x: float) -> str:
    return f"{float(x):.17g}"


def _tiling_error(lefts: np.ndarray, lengths: np.ndarray) -> float:
    order = np.argsort(lefts, kind="stable")
    lo, ln = lefts[order], lengths[order]
    ends = lo + ln
    err = max(abs(lo[0]), abs(ends[-1] - 1.0), abs(ln.sum() - 1.0))
    if len(lo) > 1:
        err = max(err, float(np.max(np.abs(lo[1:] - ends[:-1]))))
    return float(err)


def identity_iet() -> FiniteIET:
    return FiniteIET(np.array([0.0]), np.array([1.0]), np.array([0.0]), level=0, source="identity")


def from_pieces(pieces, level=None, source="") -> FiniteIET:
    """Build from ``(left, length, translation[, address])`` tuples in any order."""
    pieces = sorted(pieces, key=lambda p: p[0])
    addrs = tuple(p[3] for p in pieces) if pieces and len(pieces[0]) > 3 else None
    return FiniteIET(
        np.array([p[0] for p in pieces]),
        np.array([p[1] for p in pieces]),
        np.array([p[2] for p in pieces]),
        level=level,
        addresses=addrs,
        source=source,
    )


def build_approximant(config: PhiConfig, n: int) -> FiniteIET:
    """The level-n approximant: exact on all but the maximal level-n intervals,
    which are sent onto the minimal ones of the same type."""
    if n < 1:
        raise ValueError("level must be at least 1")
    rule = config.rule
    pieces = []
    for k in range(1, n + 1):
        for a in rule.alphabet:
            image = rule[a]
            for j in range(1, len(image)):
                p = extremal_address(rule, k - 1, image[j - 1], "max") + (Label(a, j),)
                iv = interval_of(config, p)
                t = phi_n(config, vershik(rule, p)) - iv.left
                pieces.append((iv.left, iv.length, t, format_address(p)))
    for a in rule.alphabet:
        pmax = extremal_address(rule, n, a, "max")
        pmin = extremal_address(rule, n, a, "min")
        iv = interval_of(config, pmax)
        pieces.append((iv.left, iv.length, phi_n(config, pmin) - iv.left, format_address(pmax)))
    return from_pieces(pieces, level=n, source=config.identity())


def piece_index(iet: FiniteIET, x) -> np.ndarray:
    idx = np.searchsorted(iet.lefts, x, side="right") - 1
    return np.clip(idx, 0, len(iet) - 1)


def evaluate(iet: FiniteIET, x):
    """x plus the translation of the half-open piece containing x (vectorized)."""
    xa = np.asarray(x, dtype=float)
    out = xa + iet.translations[piece_index(iet, xa)]
    return float(out) if out.ndim == 0 else out


def evaluate_exact(config: PhiConfig, x: float, max_depth: int = DEFAULT_MAX_DEPTH) -> float:
    """One step of the infinite exchange at x, reading address digits until one can be increased."""
    result = exact_step(config, x, max_depth)
    return result[0]


def exact_step(config: PhiConfig, x: float, max_depth: int = DEFAULT_MAX_DEPTH) -> tuple[float, int]:
    """Like :func:`evaluate_exact`, also returning the depth N at which the address was increased."""
    if not 0.0 <= x < 1.0:
        raise ValueError(f"x = {x} is outside [0, 1)")
    rule = config.rule
    digits = []
    for k, (d, left) in enumerate(iter_digits(config, x), start=1):
        digits.append(d)
        if not is_final(rule, d):
            return x - left + phi_n(config, vershik(rule, digits)), k
        if k >= max_depth:
            break
    raise MaxDepthExceeded(f"x = {x!r} lies in a maximal interval down to depth {max_depth}")


def compose(f: FiniteIET, g: FiniteIET) -> FiniteIET:
    """h = g o f, i.e. h(x) = g(f(x))."""
    # preimages under f of g's interior breakpoints
    img_lefts = f.lefts + f.translations
    order = np.argsort(img_lefts, kind="stable")
    sorted_img = img_lefts[order]
    gb = g.lefts[1:]
    which = order[np.clip(np.searchsorted(sorted_img, gb, side="right") - 1, 0, len(f) - 1)]
    pre = gb - f.translations[which]
    pts = np.concatenate([f.lefts, pre, [1.0]])
    pts = np.sort(np.clip(pts, 0.0, 1.0))
    gaps = np.diff(pts)
    dropped = float(gaps[gaps < SLIVER].sum())
    if dropped >= TILE_TOL:
        raise ArithmeticError(f"composition produced slivers of total length {dropped:.3g}")
    keep = np.concatenate([[True], gaps >= SLIVER])
    if not keep[-1]:
        # keep 1.0 as the right end; drop the breakpoint just before it instead
        keep[-1] = True
        prev = np.flatnonzero(keep[:-1])[-1]
        if prev > 0:
            keep[prev] = False
    pts = pts[keep]
    lefts, lengths = pts[:-1], np.diff(pts)
    mids = lefts + lengths / 2
    tf = f.translations[piece_index(f, mids)]
    tg = g.translations[piece_index(g, mids + tf)]
    return FiniteIET(lefts, lengths, tf + tg, level=None, addresses=None, source="composed")


def power(f: FiniteIET, j: int, max_pieces: int = DEFAULT_MAX_PIECES) -> FiniteIET:
    """f composed with itself j times, by repeated squaring."""
    if j < 0:
        raise ValueError("negative powers are not supported")
    result = identity_iet()
    base = f
    first = True
    while j:
        if j & 1:
            result = base if first else compose(result, base)
            first = False
            _check_budget(result, max_pieces)
        j >>= 1
        if j:
            base = compose(base, base)
            _check_budget(base, max_pieces)
    return result


def _check_budget(f: FiniteIET, max_pieces: int) -> None:
    if len(f) > max_pieces:
        raise CapExceeded(f"composition produced {len(f)} pieces, over the budget of {max_pieces}")


def merge_adjacent(f: FiniteIET, tol: float = 0.0) -> FiniteIET:
    """Fuse neighbouring pieces whose translations agree within tol."""
    lefts, lengths, trans = [f.lefts[0]], [f.lengths[0]], [f.translations[0]]
    merged = False
    for i in range(1, len(f)):
        abutting = abs(lefts[-1] + lengths[-1] - f.lefts[i]) <= TILE_TOL
        if abutting and abs(f.translations[i] - trans[-1]) <= tol:
            lengths[-1] = f.lefts[i] + f.lengths[i] - lefts[-1]
            merged = True
        else:
            lefts.append(f.lefts[i])
            lengths.append(f.lengths[i])
            trans.append(f.translations[i])
    if not merged:
        return f
    return FiniteIET(np.array(lefts), np.array(lengths), np.array(trans), level=f.level, source=f.source)


def disagreement(f: FiniteIET, g: FiniteIET, tol: float = TRANSLATION_TOL) -> float:
    """Lebesgue measure of {x : f(x) != g(x)} over the common refinement."""
    pts = np.unique(np.concatenate([f.lefts, g.lefts, [1.0]]))
    lefts, lengths = pts[:-1], np.diff(pts)
    mids = lefts + lengths / 2
    diff = np.abs(f.translations[piece_index(f, mids)] - g.translations[piece_index(g, mids)])
    return float(lengths[diff > tol].sum())


def breakpoints(f: FiniteIET) -> np.ndarray:
    """Interior domain breakpoints (left endpoints other than 0)."""
    return f.lefts[1:].copy()


@dataclass(frozen=True)
class SearchResult:
    config: PhiConfig
    pieces: int
    merged_pieces: int


def search_configurations(
    rule, perron, level: int = 8, tol: float = 1e-9, max_configs: int = 10**5
) -> list[SearchResult]:
    """Merged piece count of the level approximant for every initial order and dual order.

    Sorted best first; ties keep enumeration order.
    """
    total = count_dual_orders(rule) * math.factorial(rule.size)
    if total > max_configs:
        raise CapExceeded(f"{total} configurations exceed the cap {max_configs}")
    results = []
    _, duals = enumerate_dual_orders(rule)
    for dual in duals:
        for init in itertools.permutations(rule.alphabet):
            config = default_config(rule, perron, init, dual)
            f = build_approximant(config, level)
            results.append(SearchResult(config, len(f), len(merge_adjacent(f, tol))))
    results.sort(key=lambda r: r.merged_pieces)
    return results
