"""Coset sections, the transfer cocycle, coinduced actions, and the
conjugacy between group-indexed and coset-indexed configurations.

Everything is instantiated for the concrete subgroup H = <a> inside the
rank-2 free group, where the coset normal form is exact: the canonical
representative of gH is g with its maximal trailing a-power stripped, and
H-elements are integer a-exponents.  The full-group subgroup H = F2 is
the degenerate one-coset case and needs no machinery (see
``full_group_act``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import Alphabet, Configuration, alphabet_by_name, translate
from .freegroup import GEN_A, SiteSet, Word, gen_power, inv, mul


class NotInSubgroup(ValueError):
    """A cocycle value failed to reduce to an a-power (implementation bug
    by construction; surfaced as a runtime check rather than trusted)."""


def a_power_decomposition(g: Word) -> tuple[Word, int]:
    """Split g = rep * a^n where rep has no trailing a-family letter.

    In a reduced word the trailing a-run has a single sign, so n is just
    the signed run length.
    """
    letters = g.letters
    i = len(letters)
    while i > 0 and letters[i - 1] in (0, 1):
        i -= 1
    run = letters[i:]
    n = len(run) if (not run or run[0] == 0) else -len(run)
    return Word._from_reduced(letters[:i]), n


def coset_of(g: Word) -> Word:
    """Canonical representative of the coset g<a> (also the section value)."""
    return a_power_decomposition(g)[0]


def cocycle(g: Word, c: Word) -> int:
    """The transfer cocycle rep(c)^-1 * g * rep(g^-1 c) as an a-exponent.

    The product always lies in <a>; if it does not reduce to a pure
    a-power the coset arithmetic is broken and we refuse to continue.
    """
    c = coset_of(c)
    rep2 = coset_of(mul(inv(g), c))
    prod = mul(mul(inv(c), g), rep2)
    letters = prod.letters
    if not letters:
        return 0
    if all(s == 0 for s in letters):
        return len(letters)
    if all(s == 1 for s in letters):
        return -len(letters)
    raise NotInSubgroup(f"cocycle({g}, {c}) reduced to {prod}, not an a-power")


@dataclass(frozen=True)
class CosetConfiguration:
    """Per-coset windows over H = <a>: entry (c, j) is the value at the
    a-power position j in the coset with representative c.

    Rows are indexed by the canonical (shortlex-sorted) representative
    list; each row covers positions -window..window, with None marking
    undefined slots.
    """

    alphabet: Alphabet
    cosets: tuple[Word, ...]
    window: int
    values: tuple[tuple[int | None, ...], ...]

    def __post_init__(self):
        if list(self.cosets) != sorted(set(self.cosets), key=lambda w: w.shortlex_key):
            raise ValueError("cosets must be distinct and shortlex-sorted")
        width = 2 * self.window + 1
        if any(len(row) != width for row in self.values):
            raise ValueError(f"each row must have {width} slots")
        for c in self.cosets:
            if coset_of(c) != c:
                raise ValueError(f"{c} is not a canonical coset representative")

    def coset_index(self, c: Word) -> int | None:
        lo, hi = 0, len(self.cosets)
        key = c.shortlex_key
        while lo < hi:
            mid = (lo + hi) // 2
            if self.cosets[mid].shortlex_key < key:
                lo = mid + 1
            else:
                hi = mid
        if lo < len(self.cosets) and self.cosets[lo] == c:
            return lo
        return None

    def value_at(self, c: Word, j: int) -> int | None:
        i = self.coset_index(coset_of(c))
        if i is None or abs(j) > self.window:
            return None
        return self.values[i][j + self.window]

    @property
    def defined_count(self) -> int:
        return sum(1 for row in self.values for v in row if v is not None)

    def to_json(self) -> dict:
        return {
            "alphabet": self.alphabet.name,
            "cosets": [str(c) for c in self.cosets],
            "window": self.window,
            "values": [list(row) for row in self.values],
        }

    @classmethod
    def from_json(cls, data: dict, alphabet: Alphabet | None = None) -> "CosetConfiguration":
        alpha = alphabet if alphabet is not None else alphabet_by_name(data["alphabet"])
        cosets = tuple(Word.parse(s) for s in data["cosets"])
        values = tuple(tuple(row) for row in data["values"])
        return cls(alpha, cosets, data["window"], values)


def coinduced_act(g: Word, y: CosetConfiguration) -> CosetConfiguration:
    """The coinduced action: the entry at coset c is the a-shift, by the
    cocycle exponent, of the entry at coset g^-1 c.

    Cosets whose source falls outside the stored list become undefined,
    as do window positions shifted off the edge.
    """
    w = y.window
    rows: list[tuple[int | None, ...]] = []
    empty: tuple[int | None, ...] = (None,) * (2 * w + 1)
    for c in y.cosets:
        src = coset_of(mul(inv(g), c))
        i = y.coset_index(src)
        if i is None:
            rows.append(empty)
            continue
        n = cocycle(g, c)
        old = y.values[i]
        # (a^n v)(a^j) = v(a^(j-n))
        rows.append(
            tuple(
                old[j - n + w] if -w <= j - n <= w else None for j in range(-w, w + 1)
            )
        )
    return CosetConfiguration(y.alphabet, y.cosets, w, tuple(rows))


class ZBlockMap:
    """A sliding block code over H = <a>: output at position j is
    table[v(j + o1), ..., v(j + ok)] for integer offsets o."""

    def __init__(
        self,
        name: str,
        input_alphabet: Alphabet,
        output_alphabet: Alphabet,
        offsets: Sequence[int],
        table: np.ndarray,
    ):
        self.name = name
        self.input_alphabet = input_alphabet
        self.output_alphabet = output_alphabet
        self.offsets = tuple(offsets)
        self.table = np.asarray(table)
        if self.table.shape != (input_alphabet.size,) * len(self.offsets):
            raise ValueError("table shape must be (size,) * len(offsets)")

    def apply_window(self, row: Sequence[int | None], w: int) -> tuple[int | None, ...]:
        out: list[int | None] = []
        for j in range(-w, w + 1):
            args = []
            for o in self.offsets:
                jj = j + o
                v = row[jj + w] if -w <= jj <= w else None
                if v is None:
                    args = None
                    break
                args.append(v)
            out.append(None if args is None else int(self.table[tuple(args)]))
        return tuple(out)

    def is_bijective_relabel(self) -> bool:
        return (
            self.offsets == (0,)
            and self.input_alphabet.size == self.output_alphabet.size
            and len(set(self.table.tolist())) == self.input_alphabet.size
        )

    def inverse(self) -> "ZBlockMap":
        if not self.is_bijective_relabel():
            raise ValueError(f"{self.name} is not an invertible relabeling")
        inv_table = np.empty_like(self.table)
        inv_table[self.table] = np.arange(self.table.size)
        return ZBlockMap(f"{self.name}^-1", self.output_alphabet, self.input_alphabet, (0,), inv_table)

    def __repr__(self) -> str:
        return f"<ZBlockMap {self.name}>"


def z_relabel(name: str, a_in: Alphabet, a_out: Alphabet, mapping: Sequence[int]) -> ZBlockMap:
    return ZBlockMap(name, a_in, a_out, (0,), np.asarray(mapping))


def coinduce_factor(phi: ZBlockMap, y: CosetConfiguration) -> CosetConfiguration:
    """Coset-wise application of a per-coset map: row c of the result is
    phi applied to row c of the input."""
    if y.alphabet != phi.input_alphabet:
        raise ValueError(f"{phi.name} expects {phi.input_alphabet.name}, got {y.alphabet.name}")
    rows = tuple(phi.apply_window(row, y.window) for row in y.values)
    return CosetConfiguration(phi.output_alphabet, y.cosets, y.window, rows)


def to_coset_config(x: Configuration, window: int | None = None) -> CosetConfiguration:
    """Split a group-indexed configuration along <a>-cosets: the entry at
    (c, j) is the value of x at rep(c) * a^j.

    This is the conjugacy between the shift on group-indexed points and
    the coinduced action on coset-indexed ones; on finite windows it is a
    pure re-indexing bijection of sites.
    """
    w = window if window is not None else max((len(s) for s in x.sites), default=0)
    cosets = sorted({coset_of(s) for s in x.sites}, key=lambda c: c.shortlex_key)
    rows = []
    for c in cosets:
        rows.append(tuple(x.value_at(gen_power(c, GEN_A, j)) for j in range(-w, w + 1)))
    return CosetConfiguration(x.alphabet, tuple(cosets), w, tuple(rows))


def from_coset_config(y: CosetConfiguration) -> Configuration:
    """Merge coset windows back to a group-indexed configuration: the
    value at g is the entry at (gH, a-exponent of g)."""
    w = y.window
    pairs: list[tuple[Word, int | None]] = []
    for i, c in enumerate(y.cosets):
        row = y.values[i]
        for j in range(-w, w + 1):
            pairs.append((gen_power(c, GEN_A, j), row[j + w]))
    sites = SiteSet(word for word, _ in pairs)
    values: list[int | None] = [None] * len(sites)
    for word, v in pairs:
        values[sites.position(word)] = v  # type: ignore[index]
    return Configuration(y.alphabet, sites, values)


def coset_configs_agree(y1: CosetConfiguration, y2: CosetConfiguration) -> dict | None:
    """First disagreement on the common defined slots, or None."""
    w = min(y1.window, y2.window)
    for c in y1.cosets:
        if y2.coset_index(c) is None:
            continue
        for j in range(-w, w + 1):
            v1 = y1.value_at(c, j)
            v2 = y2.value_at(c, j)
            if v1 is not None and v2 is not None and v1 != v2:
                return {"coset": str(c), "position": j, "lhs": v1, "rhs": v2}
    return None


def full_group_act(g: Word, x: Configuration) -> Configuration:
    """Degenerate subgroup H = F2: one coset, the section is the identity,
    the cocycle is g itself, and the coinduced action is the shift."""
    return translate(g, x)
