"""The canonical partition sequence of [0, 1) and the coordinate map.

All intervals are half-open ``[left, left + length)``. Left endpoints of
level-n intervals are accumulated digit by digit in one fixed order, so that
:func:`phi_n`, :func:`locate` and the approximants built from them agree to
the last bit on which side of an endpoint a point falls.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from .address import (
    Address,
    Label,
    count_addresses,
    domain,
    origin_letter,
    parent_set,
    parse_label,
    require_address,
)
from .errors import AssumptionError, CapExceeded, ConfigError
from .subst import PerronData, SubstitutionRule

DEFAULT_MAX_ADDRESSES = 10**5
DEFAULT_MAX_DUALS = 10**6


@dataclass(frozen=True)
class PhiConfig:
    rule: SubstitutionRule
    perron: PerronData
    initial_order: tuple[str, ...]
    phi0: Mapping[str, float]
    dual_order: Mapping[str, tuple[Label, ...]]
    phi: Mapping[Label, float]
    # powers of lambda, filled lazily
    _scales: list = field(default_factory=list, repr=False, compare=False)

    @property
    def lam(self) -> float:
        return self.perron.lam

    def mu(self, letter: str) -> float:
        return self.perron.frequency(self.rule, letter)

    def scale(self, k: int) -> float:
        """lambda^k, computed once per k."""
        while len(self._scales) <= k:
            self._scales.append(self.lam ** len(self._scales))
        return self._scales[k]

    def term(self, label: Label, k: int) -> float:
        """Contribution of digit k (1-based) to the left endpoint."""
        return self.phi[label] / self.scale(k - 1)

    def length(self, letter: str, n: int) -> float:
        return self.mu(letter) / self.scale(n)

    def identity(self) -> str:
        init = "".join(self.initial_order)
        dual = ",".join(f"{a}:{'/'.join(map(str, self.dual_order[a]))}" for a in self.rule.alphabet)
        return f"init={init};dual={dual}"

    def dual_substitution(self) -> dict[str, str]:
        """The dual order written as a substitution on parent letters, e.g. A -> ABB."""
        return {a: "".join(b.letter for b in self.dual_order[a]) for a in self.rule.alphabet}


@dataclass(frozen=True)
class AddressedInterval:
    left: float
    length: float
    address: Address

    @property
    def right(self) -> float:
        return self.left + self.length

    def __contains__(self, x: float) -> bool:
        return self.left <= x < self.left + self.length


def _check_permutation(got: Sequence, expected: Sequence, what: str) -> None:
    if sorted(map(str, got)) != sorted(map(str, expected)) or len(got) != len(expected):
        raise ConfigError(f"{what} {[str(g) for g in got]} is not a permutation of {[str(e) for e in expected]}")


def default_config(
    rule: SubstitutionRule,
    perron: PerronData,
    initial_order: Sequence[str] | None = None,
    dual_order: Mapping[str, Sequence[Label | str]] | None = None,
) -> PhiConfig:
    """Initial partition and dual order to PhiConfig.

    Missing pieces default to alphabet order for the initial partition and to
    the canonical parent-set order for every letter of the dual.
    """
    init = tuple(initial_order) if initial_order is not None else rule.alphabet
    _check_permutation(init, rule.alphabet, "initial order")
    phi0: dict[str, float] = {}
    acc = 0.0
    for a in init:
        phi0[a] = acc
        acc += perron.frequency(rule, a)

    dual: dict[str, tuple[Label, ...]] = {}
    given = dict(dual_order or {})
    for key in given:
        if key not in rule.alphabet:
            raise ConfigError(f"dual order given for unknown letter {key!r}")
    for a in rule.alphabet:
        canonical = parent_set(rule, a)
        if a in given:
            order = tuple(parse_label(b) if isinstance(b, str) else Label(*b) for b in given[a])
            _check_permutation(order, canonical, f"dual order for {a!r}")
        else:
            order = canonical
        dual[a] = order

    phi: dict[Label, float] = {}
    for a in rule.alphabet:
        acc = 0.0
        for b in dual[a]:
            phi[b] = acc
            acc += perron.frequency(rule, b.letter) / perron.lam
    return PhiConfig(rule, perron, init, phi0, dual, phi)


def config_from_json(rule: SubstitutionRule, perron: PerronData, data: Mapping) -> PhiConfig:
    """Build a config from the JSON config-file object (``initial_order``, ``dual_order``)."""
    unknown = set(data) - {"initial_order", "dual_order", "assume_minimal"}
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    init = data.get("initial_order")
    if init is not None and (not isinstance(init, list) or not all(isinstance(a, str) for a in init)):
        raise ConfigError("initial_order must be an array of letters")
    dual = data.get("dual_order")
    if dual is not None:
        if not isinstance(dual, dict) or not all(isinstance(v, list) for v in dual.values()):
            raise ConfigError("dual_order must map letters to arrays of labels")
        try:
            dual = {k: [parse_label(s) for s in v] for k, v in dual.items()}
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return default_config(rule, perron, init, dual)


def phi_n(config: PhiConfig, address: Sequence[Label]) -> float:
    """Left endpoint of the interval of a valid address."""
    address = require_address(config.rule, address)
    x = config.phi0[origin_letter(config.rule, address[0])]
    for k, d in enumerate(address, start=1):
        x += config.term(d, k)
    return x


def interval_of(config: PhiConfig, address: Sequence[Label]) -> AddressedInterval:
    address = require_address(config.rule, address)
    return AddressedInterval(phi_n(config, address), config.length(address[-1].letter, len(address)), address)


def _pick(children: Sequence[tuple[float, Label]], x: float) -> tuple[float, Label]:
    # last child whose left endpoint is <= x; the first child if none is
    chosen = children[0]
    for child in children:
        if child[0] <= x:
            chosen = child
        else:
            break
    return chosen


def iter_digits(config: PhiConfig, x: float) -> Iterator[tuple[Label, float]]:
    """Lazily yield (digit k, left endpoint of the level-k interval) for the point x."""
    rule = config.rule
    level0 = sorted((config.phi0[a], a) for a in rule.alphabet)
    _, letter = _pick(level0, x)
    left = config.phi0[letter]
    k = 1
    while True:
        children = [(left + config.term(b, k), b) for b in config.dual_order[letter]]
        left, digit = _pick(children, x)
        yield digit, left
        letter = digit.letter
        k += 1


def locate(config: PhiConfig, x: float, depth: int) -> Address:
    """The depth-n address whose interval contains x."""
    if not 0.0 <= x < 1.0:
        raise ValueError(f"x = {x} is outside [0, 1)")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    return tuple(d for d, _ in itertools.islice(iter_digits(config, x), depth))


def enumerate_addresses(rule: SubstitutionRule, n: int, cap: int = DEFAULT_MAX_ADDRESSES) -> list[Address]:
    if n < 1:
        raise ValueError("n must be at least 1")
    total = count_addresses(rule, n)
    if total > cap:
        raise CapExceeded(f"{total} addresses of length {n} exceed the cap {cap}")
    level: list[Address] = [(b,) for b in domain(rule)]
    for _ in range(n - 1):
        level = [p + (b,) for p in level for b in parent_set(rule, p[-1].letter)]
    return level


def count_dual_orders(rule: SubstitutionRule) -> int:
    return math.prod(math.factorial(len(parent_set(rule, a))) for a in rule.alphabet)


def enumerate_dual_orders(
    rule: SubstitutionRule, cap: int = DEFAULT_MAX_DUALS
) -> tuple[int, Iterator[dict[str, tuple[Label, ...]]]]:
    count = count_dual_orders(rule)
    if count > cap:
        raise CapExceeded(f"{count} dual orders exceed the cap {cap}")
    per_letter = [list(itertools.permutations(parent_set(rule, a))) for a in rule.alphabet]

    def gen():
        for combo in itertools.product(*per_letter):
            yield dict(zip(rule.alphabet, combo))

    return count, gen()


def self_similar_config(rule: SubstitutionRule, perron: PerronData) -> tuple[PhiConfig, float]:
    """Config for which the IIET rescales onto itself, when every image starts with one
    letter and ends with one letter.

    Returns the config and kappa, the left end of the block of minimal labels.
    Raises AssumptionError when the hypothesis fails.
    """
    firsts = {rule[a][0] for a in rule.alphabet}
    lasts = {rule[a][-1] for a in rule.alphabet}
    if len(firsts) != 1 or len(lasts) != 1:
        raise AssumptionError("images do not share a common first letter and a common last letter")
    (beta,), (gamma,) = firsts, lasts
    if beta == gamma and any(len(rule[a]) == 1 for a in rule.alphabet):
        raise AssumptionError("a length-1 image makes one label both first and last; no self-similar layout")

    init = (gamma,) + tuple(a for a in rule.alphabet if a != gamma)
    maximal = [Label(a, len(rule[a])) for a in init]
    minimal = [Label(a, 1) for a in init]
    dual: dict[str, tuple[Label, ...]] = {}
    for a in rule.alphabet:
        rest = [b for b in parent_set(rule, a) if not (a == gamma and b in maximal) and not (a == beta and b in minimal)]
        head = maximal if a == gamma else []
        tail = minimal if a == beta else []
        dual[a] = tuple(head + rest + tail)
    config = default_config(rule, perron, init, dual)
    kappa = config.phi0[beta] + config.phi[minimal[0]]
    if kappa < 1.0 / perron.lam - 1e-12:
        raise AssumptionError(f"kappa = {kappa} < 1/lambda; layout is not self-similar")
    return config, kappa


def describe_config(config: PhiConfig) -> str:
    lines = ["initial order: " + " ".join(config.initial_order)]
    for a in config.rule.alphabet:
        labels = " ".join(f"{b}@{config.phi[b]:.6g}" for b in config.dual_order[a])
        lines.append(f"  T_{a}: {labels}")
    return "\n".join(lines)
