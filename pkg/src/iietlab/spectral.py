"""Spectral coefficients of the coordinate map, coincidences, and convergence diagnostics."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import AssumptionError
from .iet import DEFAULT_MAX_PIECES, FiniteIET, breakpoints, build_approximant, evaluate, power
from .partition import PhiConfig
from .subst import SubstitutionRule, supertile_lengths


@dataclass(frozen=True)
class SpectralEstimate:
    j: int
    value: float
    error_bound: float
    level: int


def integrate_against_identity(f: FiniteIET, centered: bool = False) -> float:
    """Closed form of int_0^1 x f(x) dx, or of int (x - 1/2)(f(x) - 1/2) dx when centered."""
    a, b, c = f.lefts, f.lefts + f.lengths, f.translations
    if centered:
        a, b = a - 0.5, b - 0.5
    # int_a^b u (u + c) du = (b - a) [(a^2 + ab + b^2)/3 + c (a + b)/2]
    return float(np.sum((b - a) * ((a * a + a * b + b * b) / 3.0 + c * (a + b) / 2.0)))


def spectral_coefficient(
    config: PhiConfig, level: int, j: int, centered: bool = False, max_pieces: int = DEFAULT_MAX_PIECES
) -> SpectralEstimate:
    if j < 0:
        raise ValueError("j must be nonnegative")
    f = power(build_approximant(config, level), j, max_pieces)
    bound = 2.0 * j * config.lam**-level
    return SpectralEstimate(j, integrate_against_identity(f, centered), bound, level)


@dataclass(frozen=True)
class CoincidenceWitness:
    power: int
    position: int
    letter: str
    path: tuple[int, ...] = ()


def coincidence_check(rule: SubstitutionRule) -> CoincidenceWitness | None:
    """Breadth-first search over letter sets under the position maps of a constant-length rule."""
    if not rule.is_constant_length():
        raise AssumptionError("coincidence is defined for constant-length substitutions only")
    k = len(rule[rule.alphabet[0]])
    start = frozenset(rule.alphabet)
    seen = {start: ()}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        path = seen[current]
        if len(current) == 1:
            if not path:  # a one-letter alphabet coincides trivially at the first position
                path = (1,)
            position = 1 + sum((jj - 1) * k ** (len(path) - i - 1) for i, jj in enumerate(path))
            return CoincidenceWitness(len(path), position, next(iter(current)), path)
        for j in range(k):
            nxt = frozenset(rule[a][j] for a in current)
            if nxt not in seen:
                seen[nxt] = path + (j + 1,)
                queue.append(nxt)
    return None


def _cluster_count(values: np.ndarray, radius: float) -> int:
    v = np.sort(np.asarray(values))
    return 1 + int(np.sum(np.diff(v) > radius)) if len(v) else 0


def sample_grid(samples: int) -> np.ndarray:
    return (2 * np.arange(samples) + 1) / (2.0 * samples)


def level_for_bound(lam: float, j: int, target: float = 1e-3) -> int:
    """Smallest level N >= 1 with 2 j lambda^-N < target."""
    if j == 0:
        return 1
    return max(1, math.floor(math.log(2.0 * j / target) / math.log(lam)) + 1)


@dataclass
class ConvergenceTable:
    xs: np.ndarray
    exponents: list[int]
    powers: list[int]
    levels: list[int]
    values: np.ndarray  # shape (len(exponents), len(xs))
    cluster_radius: float
    distances: np.ndarray = field(init=False)

    def __post_init__(self):
        self.distances = np.abs(self.values - self.xs[None, :])

    def medians(self) -> list[float]:
        return [float(np.median(row)) for row in self.distances]

    def cluster_counts(self) -> np.ndarray:
        return np.array([_cluster_count(self.values[:, i], self.cluster_radius) for i in range(len(self.xs))])

    def rows(self):
        for e_i, e in enumerate(self.exponents):
            for x_i, x in enumerate(self.xs):
                yield x, e, self.powers[e_i], self.values[e_i, x_i], self.distances[e_i, x_i]


def default_schedule(rule: SubstitutionRule) -> Callable[[int], int]:
    """K^e for constant length K, otherwise the length of the e-supertile of the first letter."""
    if rule.is_constant_length():
        k = len(rule[rule.alphabet[0]])
        return lambda e: k**e
    return lambda e: supertile_lengths(rule, e)[0]


def convergence_diagnostic(
    config: PhiConfig,
    samples: int,
    exponents: Sequence[int],
    schedule: Callable[[int], int] | None = None,
    target: float = 1e-3,
    cluster_radius: float = 0.02,
    max_pieces: int = DEFAULT_MAX_PIECES,
) -> ConvergenceTable:
    """Distances |F^{schedule(e)}(x) - x| on a midpoint grid, each power taken from an approximant
    deep enough that its error bound is below ``target``."""
    schedule = schedule or default_schedule(config.rule)
    xs = sample_grid(samples)
    powers, levels, values = [], [], []
    for e in exponents:
        j = schedule(e)
        n = level_for_bound(config.lam, j, target)
        f = power(build_approximant(config, n), j, max_pieces)
        powers.append(j)
        levels.append(n)
        values.append(evaluate(f, xs))
    return ConvergenceTable(xs, list(exponents), powers, levels, np.array(values), cluster_radius)


@dataclass(frozen=True)
class SelfSimilarityReport:
    kappa: float
    lam: float
    level: int
    points_used: int
    max_dev_plus: float
    max_dev_minus: float
    tol: float

    @property
    def plus_passes(self) -> bool:
        return self.max_dev_plus <= self.tol

    @property
    def minus_passes(self) -> bool:
        return self.max_dev_minus <= self.tol

    @property
    def passing_sign(self) -> str | None:
        if self.plus_passes and not self.minus_passes:
            return "+"
        if self.minus_passes and not self.plus_passes:
            return "-"
        return "both" if self.plus_passes else None

    def summary(self) -> str:
        return (
            f"kappa = {self.kappa:.12g}, lambda = {self.lam:.12g}, level {self.level}, {self.points_used} points\n"
            f"F(x) = lambda (F(x/lambda) + kappa): max deviation {self.max_dev_plus:.3g} "
            f"{'PASS' if self.plus_passes else 'FAIL'}\n"
            f"F(x) = lambda (F(x/lambda) - kappa): max deviation {self.max_dev_minus:.3g} "
            f"{'PASS' if self.minus_passes else 'FAIL'}\n"
            f"passing sign: {self.passing_sign or 'none'}"
        )


def self_similarity_check(
    config: PhiConfig, kappa: float, level: int, grid: int, tol: float, margin: float = 1e-6
) -> SelfSimilarityReport:
    """Test F(x) = lambda (F(x/lambda) +/- kappa) on a grid in [1/lambda, 1) using the level approximant."""
    lam = config.lam
    f = build_approximant(config, level)
    lo = 1.0 / lam
    xs = lo + (1.0 - lo) * sample_grid(grid)
    bps = breakpoints(f)

    def near_breakpoint(x):
        idx = np.searchsorted(bps, x)
        d_right = np.abs(bps[np.clip(idx, 0, len(bps) - 1)] - x)
        d_left = np.abs(bps[np.clip(idx - 1, 0, len(bps) - 1)] - x)
        return np.minimum(d_left, d_right) < margin

    if len(bps):
        xs = xs[~(near_breakpoint(xs) | near_breakpoint(xs / lam))]
    fx = evaluate(f, xs)
    fs = evaluate(f, xs / lam)
    dev_plus = float(np.max(np.abs(fx - lam * (fs + kappa)))) if len(xs) else math.inf
    dev_minus = float(np.max(np.abs(fx - lam * (fs - kappa)))) if len(xs) else math.inf
    return SelfSimilarityReport(kappa, lam, level, len(xs), dev_plus, dev_minus, tol)
