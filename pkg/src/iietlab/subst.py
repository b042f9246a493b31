"""Substitution rules, transition matrices, Perron data and supertiles."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import AssumptionError, CapExceeded, ConvergenceError, SubstitutionError

DEFAULT_MAX_WORD = 10**7

_LINE = re.compile(r"^\s*([A-Za-z0-9])\s*->\s*(\S*)\s*$")
_LETTER = re.compile(r"^[A-Za-z0-9]$")


@dataclass(frozen=True)
class SubstitutionRule:
    alphabet: tuple[str, ...]
    images: Mapping[str, str]

    def __post_init__(self):
        if not self.alphabet:
            raise SubstitutionError("alphabet is empty")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise SubstitutionError(f"duplicate letters in alphabet {self.alphabet}")
        for a in self.alphabet:
            if not _LETTER.match(a):
                raise SubstitutionError(f"letter {a!r} is not a single character from [A-Za-z0-9]")
            if a not in self.images:
                raise SubstitutionError(f"letter {a!r} has no image")
        for a, w in self.images.items():
            if a not in self.alphabet:
                raise SubstitutionError(f"image given for undeclared letter {a!r}")
            if not w:
                raise SubstitutionError(f"empty image for {a!r}")
            for c in w:
                if c not in self.alphabet:
                    raise SubstitutionError(f"image of {a!r} uses undeclared letter {c!r}")
        # freeze the mapping so the rule is immutable and hashable by value
        object.__setattr__(self, "images", _FrozenImages((a, self.images[a]) for a in self.alphabet))

    @classmethod
    def from_dict(cls, images: Mapping[str, str]) -> "SubstitutionRule":
        return cls(tuple(images), dict(images))

    def __getitem__(self, letter: str) -> str:
        return self.images[letter]

    @property
    def size(self) -> int:
        return len(self.alphabet)

    def index(self, letter: str) -> int:
        return self.alphabet.index(letter)

    def image_lengths(self) -> list[int]:
        return [len(self.images[a]) for a in self.alphabet]

    def is_constant_length(self) -> bool:
        return len(set(self.image_lengths())) == 1

    def apply(self, word: str) -> str:
        return "".join(self.images[c] for c in word)

    def square(self) -> "SubstitutionRule":
        """The rule S o S on the same alphabet."""
        return SubstitutionRule(self.alphabet, {a: self.apply(self.images[a]) for a in self.alphabet})

    def to_text(self) -> str:
        return "".join(f"{a} -> {self.images[a]}\n" for a in self.alphabet)

    def __str__(self):
        return ", ".join(f"{a}->{self.images[a]}" for a in self.alphabet)


class _FrozenImages(dict):
    def __hash__(self):
        return hash(tuple(self.items()))

    def _readonly(self, *args, **kwargs):
        raise TypeError("substitution images are read-only")

    __setitem__ = __delitem__ = update = pop = popitem = clear = setdefault = _readonly


def parse_substitution(text: str) -> SubstitutionRule:
    """Parse ``LETTER -> WORD`` lines; ``#`` starts a comment, blank lines are skipped.

    The alphabet is ordered by first appearance on a left-hand side.
    """
    images: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if m is None:
            raise SubstitutionError(f"line {lineno}: expected 'LETTER -> WORD', got {raw.strip()!r}")
        letter, word = m.groups()
        if letter in images:
            raise SubstitutionError(f"line {lineno}: duplicate left-hand letter {letter!r}")
        if not word:
            raise SubstitutionError(f"line {lineno}: empty image for {letter!r}")
        images[letter] = word
    if not images:
        raise SubstitutionError("no substitution rules found")
    return SubstitutionRule(tuple(images), images)


def transition_matrix(rule: SubstitutionRule) -> np.ndarray:
    """M[i, j] = number of occurrences of letter i in the image of letter j."""
    s = rule.size
    m = np.zeros((s, s), dtype=np.int64)
    for j, a in enumerate(rule.alphabet):
        for c in rule[a]:
            m[rule.index(c), j] += 1
    return m


def supertile_lengths(rule: SubstitutionRule, n: int) -> list[int]:
    """Row vector (1 ... 1) M^n, in exact integers."""
    lengths = [1] * rule.size
    m = transition_matrix(rule).tolist()
    for _ in range(n):
        lengths = [sum(lengths[i] * m[i][j] for i in range(rule.size)) for j in range(rule.size)]
    return lengths


@dataclass(frozen=True)
class PerronData:
    lam: float
    r: np.ndarray
    l: np.ndarray
    iterations: int = 0

    def frequency(self, rule: SubstitutionRule, letter: str) -> float:
        return float(self.r[rule.index(letter)])


def _power_iteration(m: np.ndarray, rtol: float, max_iter: int) -> tuple[float, np.ndarray, int]:
    s = m.shape[0]
    x = np.full(s, 1.0 / s)
    for it in range(1, max_iter + 1):
        y = m @ x
        total = y.sum()
        if not total > 0:
            raise ConvergenceError("power iteration collapsed to the zero vector")
        y /= total
        if np.max(np.abs(y - x)) <= rtol * np.max(np.abs(y)):
            return float((m @ y).sum()), y, it
        x = y
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} steps "
        "(eigenvalues of equal modulus to the dominant one?)"
    )


def perron_data(matrix: np.ndarray, rtol: float = 1e-14, max_iter: int = 10**6) -> PerronData:
    """Dominant eigenvalue with right probability vector r and left vector l, l.r = 1.

    Both vectors come from power iteration started at the uniform vector.
    """
    m = np.asarray(matrix, dtype=float)
    lam, r, it_r = _power_iteration(m, rtol, max_iter)
    lam_t, l, it_l = _power_iteration(m.T, rtol, max_iter)
    if np.any(r <= 0):
        raise AssumptionError(f"right eigenvector has a nonpositive entry {r.tolist()}: a letter has zero frequency")
    l = l / float(l @ r)
    res_r = np.max(np.abs(m @ r - lam * r))
    res_l = np.max(np.abs(l @ m - lam * l))
    scale = max(1.0, lam)
    if res_r > 1e-12 * scale or res_l > 1e-12 * scale or abs(lam - lam_t) > 1e-12 * scale:
        raise ConvergenceError(f"Perron residuals too large: right {res_r:.3g}, left {res_l:.3g}")
    return PerronData(lam=lam, r=r, l=l, iterations=max(it_r, it_l))


def primitivity_check(matrix: np.ndarray) -> tuple[bool, int | None]:
    """Smallest k <= (s-1)^2 + 1 with M^k entrywise positive, if any."""
    pattern = np.asarray(matrix) > 0
    s = pattern.shape[0]
    power = pattern.copy()
    for k in range(1, (s - 1) ** 2 + 2):
        if power.all():
            return True, k
        power = (power.astype(np.int64) @ pattern.astype(np.int64)) > 0
    return False, None


def supertile(rule: SubstitutionRule, letter: str, n: int, max_length: int = DEFAULT_MAX_WORD) -> str:
    if letter not in rule.alphabet:
        raise SubstitutionError(f"{letter!r} is not in the alphabet")
    if n < 0:
        raise ValueError("level must be nonnegative")
    predicted = supertile_lengths(rule, n)[rule.index(letter)]
    if predicted > max_length:
        raise CapExceeded(f"|S^{n}({letter})| = {predicted} exceeds the word-length cap {max_length}")
    word = letter
    for _ in range(n):
        word = rule.apply(word)
    return word


def cylinder_measure(perron: PerronData, rule: SubstitutionRule, letter: str, n: int = 0) -> float:
    """mu(S^n([letter])) = r(letter) / lambda^n."""
    return perron.frequency(rule, letter) / perron.lam**n


@dataclass(frozen=True)
class System:
    """A rule with its matrix and Perron data, after the standing assumptions were checked."""

    rule: SubstitutionRule
    matrix: np.ndarray
    perron: PerronData
    primitive: bool

    @property
    def lam(self) -> float:
        return self.perron.lam


def load_system(rule: SubstitutionRule, assume_minimal: bool = False) -> System:
    """Check primitivity (or an explicit minimality assertion) and expansion, then compute Perron data.

    Recognizability is taken on trust.
    """
    m = transition_matrix(rule)
    primitive, _ = primitivity_check(m)
    if not primitive and not assume_minimal:
        raise AssumptionError(
            "transition matrix is not primitive; pass assume_minimal if the subshift is known to be minimal"
        )
    perron = perron_data(m)
    if perron.lam <= 1.0 + 1e-12:
        raise AssumptionError(f"expansion factor {perron.lam} <= 1: the subshift is periodic")
    return System(rule, m, perron, primitive)
