"""Windowed local rules on configurations: the doubling map, iterated
bit-plane expansion, the star map, and their compositions.

Every map is a descriptor object: it knows its alphabets, its window cost
(the radius a single application shaves off the defined region, or None
for unbounded ray lookahead), how to apply itself to one configuration,
and how to evaluate itself on a whole batch of value matrices at once.
Descriptors are immutable and shareable across threads.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .config import (
    Alphabet,
    Configuration,
    Distribution,
    bit_alphabet,
    star_alphabet,
)
from .freegroup import GEN_A, GEN_B, IDENTITY, SiteSet, Word, ball, mul


class AlphabetMismatch(ValueError):
    """A map was applied to a configuration over the wrong alphabet."""


class InsufficientRadius(ValueError):
    """The input window is too small to define any output site."""


class FactorMap:
    """Base descriptor.  Subclasses fill in the evaluation strategy."""

    name: str
    input_alphabet: Alphabet | None
    output_alphabet: Alphabet | None
    window_cost: int | None  # None = unbounded lookahead

    def apply(self, x: Configuration) -> Configuration:
        self.check_alphabet(x)
        out = self.apply_batch(x.as_index_array()[None, :], x.sites, x.sites)[0]
        values = [None if v < 0 else int(v) for v in out]
        return Configuration(self.output_alphabet, x.sites, values)

    def apply_batch(
        self, values: np.ndarray, sites: SiteSet, out_sites: SiteSet
    ) -> np.ndarray:
        """Evaluate on a (n, |sites|) index matrix (-1 = undefined).

        Returns a (n, |out_sites|) matrix with -1 where the output is
        undefined.  Must be overridden.
        """
        raise NotImplementedError

    def check_alphabet(self, x: Configuration) -> None:
        if self.input_alphabet is not None and x.alphabet != self.input_alphabet:
            raise AlphabetMismatch(
                f"{self.name} expects {self.input_alphabet.name}, got {x.alphabet.name}"
            )

    def pushforward(self, dist: Distribution) -> Distribution:
        """Single-site output law under an i.i.d. input law."""
        raise NotImplementedError

    def dependency_sites(self, out_sites: SiteSet, budget_radius: int) -> SiteSet:
        """Input sites that can influence the outputs on ``out_sites``.

        For bounded maps this is the window closure; unbounded maps clip
        their ray scans to words of length <= budget_radius.
        """
        if self.window_cost is None:
            raise NotImplementedError
        closure = ball(self.window_cost, cap=max(self.window_cost, 12))
        return SiteSet(mul(g, w) for g in out_sites for w in closure)

    def describe(self) -> dict:
        return {
            "name": self.name,
            "input_alphabet": None if self.input_alphabet is None else self.input_alphabet.name,
            "output_alphabet": None if self.output_alphabet is None else self.output_alphabet.name,
            "window_cost": "unbounded_lookahead" if self.window_cost is None else self.window_cost,
        }

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


def _safe_gather(values: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """values[:, idx] treating idx == -1 as undefined (-1)."""
    gathered = values[:, np.clip(idx, 0, None)]
    if np.ndim(idx) == 0:
        if idx < 0:
            gathered = np.full_like(gathered, -1)
    else:
        gathered = np.where(idx >= 0, gathered, -1)
    return gathered


class BlockMap(FactorMap):
    """A sliding block code: output at g is table[x(g*w1), ..., x(g*wk)].

    ``offsets`` is the memory set (w1, ..., wk); the window cost is the
    longest offset.  The table is a k-dimensional integer array.
    """

    def __init__(
        self,
        name: str,
        input_alphabet: Alphabet,
        output_alphabet: Alphabet,
        offsets: Sequence[Word],
        table: np.ndarray,
    ):
        self.name = name
        self.input_alphabet = input_alphabet
        self.output_alphabet = output_alphabet
        self.offsets = tuple(offsets)
        table = np.asarray(table)
        if table.shape != (input_alphabet.size,) * len(self.offsets):
            raise ValueError("table shape must be (size,) * len(offsets)")
        if table.min() < 0 or table.max() >= output_alphabet.size:
            raise ValueError("table entries out of output range")
        self.table = table
        self.table.setflags(write=False)
        self.window_cost = max((len(w) for w in self.offsets), default=0)

    def apply_batch(self, values, sites, out_sites):
        n = values.shape[0]
        out = np.full((n, len(out_sites)), -1, dtype=np.int64)
        same = out_sites is sites or out_sites == sites
        for j, g in enumerate(out_sites.words):
            if same:
                cols = [_safe_gather(values, sites.neighbor_indices(off)[j]) for off in self.offsets]
            else:
                idxs = [sites.position(mul(g, off)) for off in self.offsets]
                cols = [
                    values[:, i] if i is not None else np.full(n, -1, dtype=np.int64)
                    for i in idxs
                ]
            valid = np.ones(n, dtype=bool)
            for c in cols:
                valid &= c >= 0
            looked = self.table[tuple(np.clip(c, 0, None) for c in cols)]
            out[:, j] = np.where(valid, looked, -1)
        return out

    def apply(self, x: Configuration) -> Configuration:
        # Vectorized over the whole site set via cached neighbor indices.
        self.check_alphabet(x)
        values = x.as_index_array()
        valid = np.ones(len(values), dtype=bool)
        cols = []
        for off in self.offsets:
            nb = x.sites.neighbor_indices(off)
            col = np.where(nb >= 0, values[np.clip(nb, 0, None)], -1)
            valid = valid & (col >= 0)
            cols.append(np.clip(col, 0, None))
        looked = self.table[tuple(cols)]
        out = np.where(valid, looked, -1)
        return Configuration(
            self.output_alphabet, x.sites, [None if v < 0 else int(v) for v in out]
        )

    def dependency_sites(self, out_sites, budget_radius):
        return SiteSet(mul(g, off) for g in out_sites for off in self.offsets)

    def pushforward(self, dist: Distribution) -> Distribution:
        if dist.alphabet != self.input_alphabet:
            raise AlphabetMismatch(f"{self.name} expects {self.input_alphabet.name}")
        probs = np.array([1.0])
        for _ in self.offsets:
            probs = np.multiply.outer(probs, np.asarray(dist.float_weights())).ravel()
        flat = self.table.ravel()
        out = np.bincount(flat, weights=probs, minlength=self.output_alphabet.size)
        return Distribution(self.output_alphabet, tuple(float(w) for w in out))

    def is_bijective_relabel(self) -> bool:
        return (
            len(self.offsets) == 1
            and self.offsets[0].is_identity
            and self.input_alphabet.size == self.output_alphabet.size
            and len(set(self.table.tolist())) == self.input_alphabet.size
        )

    def inverse(self) -> "BlockMap":
        if not self.is_bijective_relabel():
            raise ValueError(f"{self.name} is not an invertible relabeling")
        inv_table = np.empty_like(self.table)
        inv_table[self.table] = np.arange(self.table.size)
        return BlockMap(
            f"{self.name}^-1", self.output_alphabet, self.input_alphabet, (IDENTITY,), inv_table
        )


_A_WORD = Word((GEN_A,))
_B_WORD = Word((GEN_B,))


def ow() -> BlockMap:
    """The Ornstein-Weiss doubling rule on binary configurations.

    Output at g is the pair (x(g)+x(ga), x(g)+x(gb)) over Z/2 x Z/2; a
    pointwise GF(2) homomorphism that pushes the fair coin law onto the
    uniform four-symbol law.
    """
    v = np.arange(2)
    c1 = v[:, None, None] ^ v[None, :, None]
    c2 = v[:, None, None] ^ v[None, None, :]
    table = c1 + 2 * c2
    return BlockMap("ow", bit_alphabet(1), bit_alphabet(2), (IDENTITY, _A_WORD, _B_WORD), table)


MAX_TIMAR_PLANES = 6


def timar_stage(n: int) -> BlockMap:
    """One bit-plane expansion stage: planes 1..n copied, the last plane
    doubled by the Ornstein-Weiss rule into planes n+1 and n+2.

    Stage 0 is exactly the doubling rule under the identification of the
    four-symbol alphabet with bit pairs.
    """
    if not 0 <= n <= MAX_TIMAR_PLANES - 1:
        raise ValueError(f"stage must be in [0, {MAX_TIMAR_PLANES - 1}]")
    a_in = bit_alphabet(n + 1)
    a_out = bit_alphabet(n + 2)
    size = a_in.size
    v = np.arange(size)
    low = v & ((1 << n) - 1)
    top = (v >> n) & 1
    c1 = top[:, None, None] ^ top[None, :, None]
    c2 = top[:, None, None] ^ top[None, None, :]
    table = low[:, None, None] + (c1 << n) + (c2 << (n + 1))
    return BlockMap(f"timar_stage{n}", a_in, a_out, (IDENTITY, _A_WORD, _B_WORD), table)


def plane_projection(planes_in: int, planes_out: int) -> BlockMap:
    """Keep the first ``planes_out`` bit planes; an independent-splitting
    projection (single-site, window cost 0)."""
    if not 1 <= planes_out <= planes_in:
        raise ValueError("need 1 <= planes_out <= planes_in")
    table = np.arange(2**planes_in) & ((1 << planes_out) - 1)
    return BlockMap(
        f"project{planes_in}to{planes_out}",
        bit_alphabet(planes_in),
        bit_alphabet(planes_out),
        (IDENTITY,),
        table,
    )


def relabel(name: str, a_in: Alphabet, a_out: Alphabet, mapping: Sequence[int]) -> BlockMap:
    """A single-site recoding given by a symbol table."""
    return BlockMap(name, a_in, a_out, (IDENTITY,), np.asarray(mapping))


def swap_bits() -> BlockMap:
    """The 0 <-> 1 relabeling on the binary alphabet."""
    return relabel("swap", bit_alphabet(1), bit_alphabet(1), [1, 0])


def identity_map(alphabet: Alphabet) -> BlockMap:
    return relabel(f"identity_{alphabet.name}", alphabet, alphabet, np.arange(alphabet.size))


def first_factor_projection(a1: Alphabet, a2: Alphabet) -> BlockMap:
    """Projection of the pair alphabet a1 x a2 onto a1 (drop the second
    independent coordinate)."""
    from .config import product_alphabet

    prod = product_alphabet(a1, a2)
    table = np.arange(prod.size) % a1.size
    return BlockMap(f"project_{prod.name}_to_{a1.name}", prod, a1, (IDENTITY,), table)


class StarMap(FactorMap):
    """The star-extended doubling rule with generator-ray lookahead.

    At a site g holding `*` the output is `*`.  Otherwise the rule scans
    g*a, g*a^2, ... for the first non-star bit (and likewise along b
    powers) and emits the pair of mod-2 sums.  If a scan runs off the
    defined region the output at g is undefined; that truncation is a
    finite-window artifact and is counted by the verifier.
    """

    def __init__(self, p: float = 0.25):
        self.name = f"star:{p:g}"
        self.p = p
        self.input_alphabet = star_alphabet(1)
        self.output_alphabet = star_alphabet(2)
        self.window_cost = None

    def _scan(self, values: np.ndarray, ray_idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """First non-star bit along padded rays.

        values: (n, s) matrix; ray_idx: (m, L) site indices (-1 padding).
        Returns (found (n, m) bool, bit (n, m)).
        """
        if ray_idx.size == 0:
            n, m = values.shape[0], ray_idx.shape[0]
            return np.zeros((n, m), dtype=bool), np.zeros((n, m), dtype=np.int64)
        star = self.input_alphabet.star_index
        # (n, m, L) ray values; -1 where the ray has left the site set or
        # the configuration is undefined there.
        ray_vals = values[:, np.clip(ray_idx, 0, None)]
        ray_vals = np.where(ray_idx[None, :, :] >= 0, ray_vals, -1)
        is_bit = (ray_vals == 0) | (ray_vals == 1)
        is_stop = ray_vals < 0
        event = is_bit | is_stop
        # First event along each ray; rays that run out of entries while
        # still seeing stars count as stopped (the next power is absent).
        pos = np.argmax(event, axis=2)
        any_event = event.any(axis=2)
        take = np.take_along_axis(ray_vals, pos[:, :, None], axis=2)[:, :, 0]
        hit = np.take_along_axis(is_bit, pos[:, :, None], axis=2)[:, :, 0]
        found = any_event & hit
        return found, np.clip(take, 0, None)

    def apply(self, x: Configuration) -> Configuration:
        self.check_alphabet(x)
        values = x.as_index_array()[None, :]
        a_idx, _ = x.sites.ray_indices(GEN_A)
        b_idx, _ = x.sites.ray_indices(GEN_B)
        out = self._evaluate(values, values[0], a_idx, b_idx)[0]
        return Configuration(
            self.output_alphabet, x.sites, [None if v < 0 else int(v) for v in out]
        )

    def _evaluate(self, values, centers, a_idx, b_idx):
        star_in = self.input_alphabet.star_index
        found_a, bit_a = self._scan(values, a_idx)
        found_b, bit_b = self._scan(values, b_idx)
        if centers.ndim == 1:
            centers = np.broadcast_to(centers, (values.shape[0], centers.shape[0]))
        center_star = centers == star_in
        center_bit = (centers == 0) | (centers == 1)
        pair = ((centers + bit_a) % 2) + 2 * ((centers + bit_b) % 2)
        out = np.where(
            center_star,
            self.output_alphabet.star_index,
            np.where(center_bit & found_a & found_b, pair, -1),
        )
        return out

    def apply_batch(self, values, sites, out_sites):
        n = values.shape[0]
        centers = np.full((n, len(out_sites)), -1, dtype=np.int64)
        a_rows, b_rows = [], []
        for j, g in enumerate(out_sites.words):
            i = sites.position(g)
            if i is not None:
                centers[:, j] = values[:, i]
            a_rows.append(self._ray_row(sites, g, GEN_A))
            b_rows.append(self._ray_row(sites, g, GEN_B))
        a_idx = _pad_rows(a_rows)
        b_idx = _pad_rows(b_rows)
        return self._evaluate(values, centers, a_idx, b_idx)

    @staticmethod
    def _ray_row(sites: SiteSet, g: Word, letter: int) -> list[int]:
        row: list[int] = []
        cur = g
        step = Word((letter,))
        while True:
            cur = mul(cur, step)
            i = sites.position(cur)
            if i is None:
                return row
            row.append(i)

    def dependency_sites(self, out_sites, budget_radius):
        words: set[Word] = set(out_sites.words)
        for g in out_sites.words:
            for letter in (GEN_A, GEN_B):
                cur = g
                step = Word((letter,))
                while True:
                    cur = mul(cur, step)
                    if len(cur) > budget_radius:
                        break
                    words.add(cur)
        return SiteSet(words)

    def pushforward(self, dist: Distribution) -> Distribution:
        """Output law for an i.i.d. star-alphabet input.

        Conditioned on a non-star center, the first non-star symbol on
        each ray is an independent draw from the bit weights renormalized,
        so for the symmetric law (p, p, 1-2p) each pair carries mass p/2.
        """
        if dist.alphabet != self.input_alphabet:
            raise AlphabetMismatch(f"{self.name} expects {self.input_alphabet.name}")
        w0, w1, ws = dist.float_weights()
        if w0 + w1 == 0:
            raise ValueError("star map needs some non-star mass")
        f0, f1 = w0 / (w0 + w1), w1 / (w0 + w1)
        first = (f0, f1)
        weights = [0.0, 0.0, 0.0, 0.0, ws]
        for v, wv in ((0, w0), (1, w1)):
            for c1 in (0, 1):
                for c2 in (0, 1):
                    weights[c1 + 2 * c2] += wv * first[(c1 + v) % 2] * first[(c2 + v) % 2]
        return Distribution(star_alphabet(2), tuple(weights))

    def describe(self) -> dict:
        d = super().describe()
        d["p"] = self.p
        return d


def _pad_rows(rows: list[list[int]]) -> np.ndarray:
    max_len = max((len(r) for r in rows), default=0)
    out = np.full((len(rows), max_len), -1, dtype=np.int64)
    for i, r in enumerate(rows):
        out[i, : len(r)] = r
    return out


class ComposedMap(FactorMap):
    """Left-to-right composition with window bookkeeping.

    The defined region shrinks by the sum of the stage window costs;
    unbounded stages propagate undefinedness exactly as they do alone.
    An empty composition is the identity.
    """

    def __init__(self, stages: Sequence[FactorMap], name: str | None = None):
        self.stages = tuple(stages)
        for k in range(len(self.stages) - 1):
            out_a = self.stages[k].output_alphabet
            in_a = self.stages[k + 1].input_alphabet
            if out_a is not None and in_a is not None and out_a != in_a:
                raise AlphabetMismatch(
                    f"stage {k} emits {out_a.name} but stage {k + 1} expects {in_a.name}"
                )
        self.name = name or ("id" if not self.stages else "+".join(s.name for s in self.stages))
        self.input_alphabet = self.stages[0].input_alphabet if self.stages else None
        self.output_alphabet = self.stages[-1].output_alphabet if self.stages else None
        costs = [s.window_cost for s in self.stages]
        self.window_cost = None if any(c is None for c in costs) else sum(costs)

    def apply(self, x: Configuration) -> Configuration:
        for k, stage in enumerate(self.stages):
            try:
                x = stage.apply(x)
            except AlphabetMismatch as exc:
                raise AlphabetMismatch(f"stage {k} ({stage.name}): {exc}") from exc
        return x

    def apply_batch(self, values, sites, out_sites):
        cur = values
        for stage in self.stages:
            cur = stage.apply_batch(cur, sites, sites)
        cols = [sites.position(g) for g in out_sites.words]
        n = cur.shape[0]
        out = np.full((n, len(cols)), -1, dtype=np.int64)
        for j, i in enumerate(cols):
            if i is not None:
                out[:, j] = cur[:, i]
        return out

    def pushforward(self, dist: Distribution) -> Distribution:
        for stage in self.stages:
            dist = stage.pushforward(dist)
        return dist


def compose(maps: Sequence[FactorMap], x: Configuration) -> Configuration:
    """Apply a list of maps left to right (empty list: identity)."""
    return ComposedMap(maps).apply(x)


def timar(m: int) -> ComposedMap:
    """The first m stabilized bit planes of the iterated expansion.

    Plane m needs exactly m expansion stages, after which it never
    changes, so the total window cost is m.  The final stage's extra
    working plane is dropped by a zero-cost projection.
    """
    if not 1 <= m <= MAX_TIMAR_PLANES:
        raise ValueError(f"plane count must be in [1, {MAX_TIMAR_PLANES}]")
    stages: list[FactorMap] = [timar_stage(n) for n in range(m)]
    stages.append(plane_projection(m + 1, m))
    return ComposedMap(stages, name=f"timar:{m}")


def timar_bits(x: Configuration, m: int) -> Configuration:
    """Apply the m-plane expansion; raises if the output is nowhere defined."""
    out = timar(m).apply(x)
    if out.defined_count == 0:
        raise InsufficientRadius(
            f"timar:{m} needs radius {m} of margin; no output site is defined"
        )
    return out


def star(p: float = 0.25) -> StarMap:
    return StarMap(p)


def parse_map_spec(spec: str) -> FactorMap:
    """Resolve CLI map names: ow, timar:m, star:p, swap, identity,
    project:min:mout, coinduced:identity, coinduced:swap."""
    head, _, rest = spec.partition(":")
    if head == "ow":
        return ow()
    if head == "timar":
        return timar(int(rest))
    if head == "star":
        return star(float(rest) if rest else 0.25)
    if head == "swap":
        return swap_bits()
    if head == "identity":
        return identity_map(bit_alphabet(1))
    if head == "project":
        a, _, b = rest.partition(":")
        return plane_projection(int(a), int(b))
    if head == "coinduced":
        from .pipeline import coinduced_map

        if rest == "identity":
            return coinduced_map(identity_map(bit_alphabet(1)))
        if rest == "swap":
            return coinduced_map(swap_bits())
        raise ValueError(f"unknown coinduced cell map {rest!r}")
    raise ValueError(f"unknown map spec {spec!r}")
