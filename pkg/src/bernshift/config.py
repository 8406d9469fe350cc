"""Alphabets, finite distributions, and partial configurations on site sets.

A configuration is the finite shadow of a point of the full shift: a
partial assignment of alphabet symbols to an ordered site set.  Missing
values are an explicit ``None`` marker (window-boundary effects are data,
not errors).  Everything here is an immutable value.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .freegroup import SiteSet, Word, translated_sites

DEFAULT_ENUMERATION_CAP = 2**24


class EnumerationTooLarge(ValueError):
    """The requested exhaustive enumeration exceeds the configured cap."""


@dataclass(frozen=True)
class Alphabet:
    """A finite symbol set, optionally with bit-plane or star structure.

    tag "z2_product": 2^planes symbols identified with bit vectors; the
    label spells the planes in order (i1 i2 ... im) and plane 1 is the
    least significant bit of the symbol index.
    tag "star_extended": the 2^planes pair symbols plus a final `*`.
    """

    name: str
    symbols: tuple[str, ...]
    tag: str = "plain"
    planes: int | None = None

    def __post_init__(self):
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("alphabet symbols must be distinct")
        if self.tag == "z2_product":
            if self.planes is None or len(self.symbols) != 2**self.planes:
                raise ValueError("z2_product alphabet needs exactly 2^planes symbols")
        elif self.tag == "star_extended":
            if self.planes is None or len(self.symbols) != 2**self.planes + 1:
                raise ValueError("star_extended alphabet needs 2^planes + 1 symbols")
        elif self.tag != "plain":
            raise ValueError(f"unknown alphabet tag {self.tag!r}")

    @property
    def size(self) -> int:
        return len(self.symbols)

    @property
    def star_index(self) -> int:
        if self.tag != "star_extended":
            raise ValueError(f"{self.name} has no star symbol")
        return len(self.symbols) - 1

    def index_to_bits(self, index: int) -> tuple[int, ...]:
        """Symbol index -> bit vector (i1, ..., im); plane 1 is the LSB."""
        m = self._require_planes()
        if not 0 <= index < 2**m:
            raise ValueError(f"index {index} out of bit range for {self.name}")
        return tuple((index >> (j - 1)) & 1 for j in range(1, m + 1))

    def bits_to_index(self, bits: Sequence[int]) -> int:
        m = self._require_planes()
        if len(bits) != m:
            raise ValueError(f"expected {m} bits")
        return sum((b & 1) << j for j, b in enumerate(bits))

    def _require_planes(self) -> int:
        if self.planes is None:
            raise ValueError(f"{self.name} has no bit-plane structure")
        return self.planes


def _bit_labels(m: int) -> tuple[str, ...]:
    return tuple("".join(str((i >> (j - 1)) & 1) for j in range(1, m + 1)) for i in range(2**m))


def bit_alphabet(m: int) -> Alphabet:
    """The 2^m-symbol alphabet of m-bit vectors, named U2, U4, U8, ..."""
    if m < 1:
        raise ValueError("need at least one bit plane")
    return Alphabet(f"U{2**m}", _bit_labels(m), tag="z2_product", planes=m)


def star_alphabet(m: int = 1) -> Alphabet:
    """2^m bit-vector symbols plus a distinguished `*`, named e.g. U2*."""
    if m < 1:
        raise ValueError("need at least one bit plane")
    return Alphabet(f"U{2**m}*", _bit_labels(m) + ("*",), tag="star_extended", planes=m)


def plain_alphabet(name: str, symbols: Iterable[str]) -> Alphabet:
    return Alphabet(name, tuple(symbols), tag="plain")


def product_alphabet(a1: Alphabet, a2: Alphabet) -> Alphabet:
    """Pair alphabet for independent splittings; index = i1 + |a1| * i2."""
    symbols = tuple(f"({s1},{s2})" for s2 in a2.symbols for s1 in a1.symbols)
    return Alphabet(f"{a1.name}x{a2.name}", symbols, tag="plain")


_ALPHABET_NAME_RE = re.compile(r"^U(\d+)(\*?)$")


def alphabet_by_name(name: str) -> Alphabet:
    """Resolve the standard alphabet names used in JSON dumps and the CLI."""
    m = _ALPHABET_NAME_RE.match(name)
    if m:
        n = int(m.group(1))
        planes = n.bit_length() - 1
        if 2**planes == n and planes >= 1:
            return star_alphabet(planes) if m.group(2) else bit_alphabet(planes)
    raise ValueError(f"unknown alphabet name {name!r}")


@dataclass(frozen=True)
class Distribution:
    """A probability vector over an alphabet.

    Weights are either all `Fraction` (exact mode, used by enumeration
    checks) or floats (entropy arithmetic).  The vector must sum to 1,
    exactly in rational mode and within 1e-12 otherwise.
    """

    alphabet: Alphabet
    weights: tuple

    def __post_init__(self):
        if len(self.weights) != self.alphabet.size:
            raise ValueError("one weight per symbol required")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonnegative")
        total = sum(self.weights)
        if self.is_exact:
            if total != 1:
                raise ValueError(f"rational weights sum to {total}, not 1")
        elif abs(float(total) - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {total!r}, not 1")

    @property
    def is_exact(self) -> bool:
        return all(isinstance(w, (Fraction, int)) for w in self.weights)

    @property
    def is_trivial(self) -> bool:
        return any(w == 1 for w in self.weights)

    def float_weights(self) -> tuple[float, ...]:
        return tuple(float(w) for w in self.weights)


def uniform(alphabet: Alphabet) -> Distribution:
    n = alphabet.size
    return Distribution(alphabet, tuple(Fraction(1, n) for _ in range(n)))


def point_mass(alphabet: Alphabet, symbol_index: int) -> Distribution:
    w = [Fraction(0)] * alphabet.size
    w[symbol_index] = Fraction(1)
    return Distribution(alphabet, tuple(w))


def star_base(p) -> Distribution:
    """The three-symbol law (p, p, 1-2p) on {0, 1, *}."""
    if not 0 < p <= Fraction(1, 2):
        raise ValueError("p must lie in (0, 1/2]")
    return Distribution(star_alphabet(1), (p, p, 1 - 2 * p))


def star_image(p) -> Distribution:
    """The star-map output law (p/2 on each pair, 1-2p on *)."""
    if not 0 < p <= Fraction(1, 2):
        raise ValueError("p must lie in (0, 1/2]")
    half = p / 2
    return Distribution(star_alphabet(2), (half, half, half, half, 1 - 2 * p))


def product_distribution(d1: Distribution, d2: Distribution) -> Distribution:
    alpha = product_alphabet(d1.alphabet, d2.alphabet)
    weights = tuple(w2 * w1 for w2 in d2.weights for w1 in d1.weights)
    return Distribution(alpha, weights)


class Configuration:
    """A partial symbol assignment on a site set.

    ``values[i]`` is the symbol index at ``sites[i]`` or None where the
    configuration is undefined.  Immutable.
    """

    __slots__ = ("alphabet", "sites", "values")

    def __init__(self, alphabet: Alphabet, sites: SiteSet, values: Sequence[int | None]):
        values = tuple(values)
        if len(values) != len(sites):
            raise ValueError("one value per site required")
        size = alphabet.size
        for v in values:
            if v is not None and not 0 <= v < size:
                raise ValueError(f"symbol index {v} out of range for {alphabet.name}")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "values", values)

    def __setattr__(self, name, value):
        raise AttributeError("Configuration is immutable")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Configuration)
            and self.alphabet == other.alphabet
            and self.sites == other.sites
            and self.values == other.values
        )

    def __hash__(self) -> int:
        return hash((self.alphabet.name, self.sites, self.values))

    def __repr__(self) -> str:
        return f"Configuration({self.alphabet.name}, {len(self.sites)} sites, {self.defined_count} defined)"

    def value_at(self, w: Word) -> int | None:
        i = self.sites.position(w)
        return None if i is None else self.values[i]

    @property
    def defined_count(self) -> int:
        return sum(1 for v in self.values if v is not None)

    @property
    def is_total(self) -> bool:
        return all(v is not None for v in self.values)

    def as_index_array(self) -> np.ndarray:
        """Values as int64 with -1 for undefined (the batch convention)."""
        return np.fromiter(
            (-1 if v is None else v for v in self.values), dtype=np.int64, count=len(self.values)
        )

    def packed_bits(self) -> int | None:
        """Bit-packed form for total binary configurations.

        One bit per site in shortlex order, little-endian: site j is bit
        j.  This is the same integer as the enumeration index.
        """
        if self.alphabet.size != 2 or not self.is_total:
            return None
        acc = 0
        for j, v in enumerate(self.values):
            acc |= v << j
        return acc

    def to_json(self) -> dict:
        out = {
            "alphabet": self.alphabet.name,
            "sites": [str(w) for w in self.sites],
            "values": list(self.values),
        }
        packed = self.packed_bits()
        if packed is not None:
            out["packed"] = packed
        return out

    @classmethod
    def from_json(cls, data: dict, alphabet: Alphabet | None = None) -> "Configuration":
        alpha = alphabet if alphabet is not None else alphabet_by_name(data["alphabet"])
        words = [Word.parse(s) for s in data["sites"]]
        sites = SiteSet(words)
        if len(sites) != len(words):
            raise ValueError("duplicate sites in configuration dump")
        values: list[int | None] = [None] * len(sites)
        for w, v in zip(words, data["values"]):
            values[sites.position(w)] = v  # type: ignore[index]
        return cls(alpha, sites, values)


def translate(g: Word, x: Configuration) -> Configuration:
    """The shift action on configurations: value of the result at g*f is
    the value of x at f, i.e. (g.x)(h) = x(g^-1 h)."""
    new_sites, perm = translated_sites(x.sites, g)
    values: list[int | None] = [None] * len(new_sites)
    for i, v in enumerate(x.values):
        values[perm[i]] = v
    return Configuration(x.alphabet, new_sites, values)


def restrict(x: Configuration, sub: SiteSet) -> Configuration:
    """Restriction to a site set; sites absent from x become undefined."""
    return Configuration(x.alphabet, sub, [x.value_at(w) for w in sub])


def sample(
    dist: Distribution, sites: SiteSet, seed: int | np.random.Generator
) -> Configuration:
    """One i.i.d. draw of a total configuration; deterministic given seed."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    values = sample_matrix(dist, len(sites), 1, rng)[0]
    return Configuration(dist.alphabet, sites, [int(v) for v in values])


def sample_matrix(
    dist: Distribution, n_sites: int, n_draws: int, rng: np.random.Generator
) -> np.ndarray:
    """(n_draws, n_sites) i.i.d. symbol indices with law ``dist``.

    Inversion sampling against the cumulative weights, so one uniform
    stream drives every alphabet identically.
    """
    cdf = np.cumsum(np.asarray(dist.float_weights(), dtype=np.float64))
    cdf[-1] = 1.0
    u = rng.random((n_draws, n_sites))
    return np.searchsorted(cdf, u, side="right").astype(np.int64)


def enumeration_size(alphabet: Alphabet, sites: SiteSet) -> int:
    return alphabet.size ** len(sites)


def config_from_index(alphabet: Alphabet, sites: SiteSet, index: int) -> Configuration:
    """Configuration number ``index``: site j holds (index // size^j) % size."""
    size = alphabet.size
    values = []
    q = index
    for _ in range(len(sites)):
        values.append(q % size)
        q //= size
    if q:
        raise ValueError(f"index {index} out of range")
    return Configuration(alphabet, sites, values)


def enumerate_configurations(
    alphabet: Alphabet, sites: SiteSet, cap: int = DEFAULT_ENUMERATION_CAP
) -> Iterator[Configuration]:
    """Every total configuration exactly once, in index order.

    Index order is lexicographic over the shortlex site order with site 0
    varying fastest, matching ``config_from_index``.
    """
    total = enumeration_size(alphabet, sites)
    if total > cap:
        raise EnumerationTooLarge(f"{total} configurations exceed cap {cap}")
    n = len(sites)
    for rev in itertools.product(range(alphabet.size), repeat=n):
        yield Configuration(alphabet, sites, rev[::-1])


def index_matrix(size: int, n_sites: int, lo: int, hi: int) -> np.ndarray:
    """Rows lo..hi-1 of the enumeration as a (hi-lo, n_sites) index matrix."""
    idx = np.arange(lo, hi, dtype=np.int64)
    out = np.empty((hi - lo, n_sites), dtype=np.int64)
    if size == 2:
        for j in range(n_sites):
            out[:, j] = (idx >> j) & 1
    else:
        q = idx.copy()
        for j in range(n_sites):
            out[:, j] = q % size
            q //= size
    return out
