"""Address combinatorics on the label domain of a substitution.

A label ``(letter, position)`` says that a supertile of some level sits at
``position`` (1-based) inside the image of ``letter``. An address is a tuple of
labels, least level first; digit ``k`` records how the (k-1)-supertile at the
origin sits in its k-supertile.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Literal, NamedTuple, Sequence

from .errors import InvalidAddress, SaturatedAddress
from .subst import DEFAULT_MAX_WORD, SubstitutionRule, supertile, supertile_lengths


class Label(NamedTuple):
    letter: str
    position: int

    def __str__(self):
        return f"{self.letter}{self.position}"


Address = tuple[Label, ...]


def parse_label(text: str) -> Label:
    text = text.strip()
    if len(text) < 2 or not text[1:].isdigit():
        raise InvalidAddress(f"cannot parse label {text!r}; expected a letter followed by a position, e.g. 'B2'")
    return Label(text[0], int(text[1:]))


def parse_address(text: str) -> Address:
    """``'B2.A2.A1'`` -> ``(Label('B', 2), Label('A', 2), Label('A', 1))``."""
    return tuple(parse_label(part) for part in text.split("."))


def format_address(address: Sequence[Label]) -> str:
    return ".".join(str(Label(*d)) for d in address)


def origin_letter(rule: SubstitutionRule, label: Label) -> str:
    """The letter in position ``label.position`` of the image of ``label.letter``."""
    return rule[label.letter][label.position - 1]


def domain(rule: SubstitutionRule) -> list[Label]:
    return [Label(a, j) for a in rule.alphabet for j in range(1, len(rule[a]) + 1)]


@lru_cache(maxsize=None)
def _parent_sets(rule: SubstitutionRule) -> dict[str, tuple[Label, ...]]:
    parents: dict[str, list[Label]] = {a: [] for a in rule.alphabet}
    for b in domain(rule):
        parents[origin_letter(rule, b)].append(b)
    return {a: tuple(v) for a, v in parents.items()}


def parent_set(rule: SubstitutionRule, letter: str) -> tuple[Label, ...]:
    """All labels whose origin letter is ``letter``, in alphabet-then-position order."""
    return _parent_sets(rule)[letter]


def _check_labels(rule: SubstitutionRule, digits: Sequence[Label]) -> None:
    for d in digits:
        if d.letter not in rule.alphabet or not 1 <= d.position <= len(rule[d.letter]):
            raise InvalidAddress(f"{d} is not a label of {rule}")


def validate_address(rule: SubstitutionRule, digits: Sequence[Label]) -> bool:
    if not digits:
        return False
    try:
        _check_labels(rule, digits)
    except InvalidAddress:
        return False
    return all(origin_letter(rule, cur) == prev.letter for prev, cur in zip(digits, digits[1:]))


def require_address(rule: SubstitutionRule, digits: Sequence[Label]) -> Address:
    digits = tuple(Label(*d) for d in digits)
    if not validate_address(rule, digits):
        raise InvalidAddress(f"{format_address(digits)} is not a valid address for {rule}")
    return digits


def extremal_address(rule: SubstitutionRule, n: int, letter: str, which: Literal["min", "max"]) -> Address:
    """Address of the first (``min``) or last (``max``) position of the n-supertile of ``letter``."""
    if which not in ("min", "max"):
        raise ValueError("which must be 'min' or 'max'")
    digits: list[Label] = []
    a = letter
    for _ in range(n):
        image = rule[a]
        if which == "min":
            digits.append(Label(a, 1))
            a = image[0]
        else:
            digits.append(Label(a, len(image)))
            a = image[-1]
    return tuple(reversed(digits))


def is_final(rule: SubstitutionRule, label: Label) -> bool:
    return label.position == len(rule[label.letter])


def first_increasable(rule: SubstitutionRule, address: Sequence[Label]) -> int | None:
    """Smallest k whose k-prefix is not a maximal address; None when every known prefix is maximal."""
    address = require_address(rule, address)
    # For a valid address the k-prefix is maximal iff every digit up to k is final.
    for k, d in enumerate(address, start=1):
        if not is_final(rule, d):
            return k
    return None


def vershik(rule: SubstitutionRule, address: Sequence[Label]) -> Address:
    address = require_address(rule, address)
    n = first_increasable(rule, address)
    if n is None:
        raise SaturatedAddress(f"{format_address(address)} is maximal; its successor is not determined by known digits")
    a, j = address[n - 1]
    beta = rule[a][j]  # the (j+1)-th letter, 0-based index j
    return extremal_address(rule, n - 1, beta, "min") + (Label(a, j + 1),) + address[n:]


def address_to_word(
    rule: SubstitutionRule, address: Sequence[Label], max_length: int = DEFAULT_MAX_WORD
) -> tuple[str, int]:
    """The n-supertile addressed by ``address`` and the 1-based index of its origin letter."""
    address = require_address(rule, address)
    n = len(address)
    word = supertile(rule, address[-1].letter, n, max_length)
    index = 1
    for k in range(n, 0, -1):
        a, j = address[k - 1]
        sizes = supertile_lengths(rule, k - 1)
        index += sum(sizes[rule.index(c)] for c in rule[a][: j - 1])
    return word, index


def shift_oracle(rule: SubstitutionRule, address: Sequence[Label], max_length: int = DEFAULT_MAX_WORD) -> Address:
    """Address of the shifted point, read off the supertile word itself.

    Builds the addressed n-supertile, moves the origin one letter right, then
    walks back down the block decomposition of that word to recover every digit.
    Shares no code with :func:`vershik`.
    """
    word, index = address_to_word(rule, address, max_length)
    if index >= len(word):
        raise SaturatedAddress("origin is the last letter of the supertile; the shift leaves it")
    pos = index + 1
    n = len(address)
    top = address[-1].letter
    digits: list[Label] = []
    letter = top
    offset = 0  # start of the current block in ``word``, 0-based
    for k in range(n, 0, -1):
        sizes = supertile_lengths(rule, k - 1)
        start = offset
        for j, c in enumerate(rule[letter], start=1):
            size = sizes[rule.index(c)]
            if start < pos <= start + size:
                digits.append(Label(letter, j))
                letter, offset = c, start
                break
            start += size
        else:  # pragma: no cover - pos always lies inside the word
            raise AssertionError("position outside the supertile")
    if word[pos - 1] != letter:  # pragma: no cover - block structure and word disagree
        raise AssertionError("supertile word disagrees with its block decomposition")
    return tuple(reversed(digits))


def count_addresses(rule: SubstitutionRule, n: int) -> int:
    """|Addr^n|: number of valid addresses of length n."""
    if n < 1:
        return rule.size
    counts = {a: 0 for a in rule.alphabet}
    for b in domain(rule):
        counts[b.letter] += 1
    for _ in range(n - 1):
        nxt = {a: 0 for a in rule.alphabet}
        for beta, c in counts.items():
            for b in parent_set(rule, beta):
                nxt[b.letter] += c
        counts = nxt
    return sum(counts.values())
