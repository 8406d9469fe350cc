"""The evidence engine: exact pushforward verification by exhaustive
enumeration, seeded Monte Carlo distribution checks, and property-test
drivers for equivariance, the cocycle identity, and the coset-splitting
round trip.

Exact mode uses integer arithmetic only; a pass there is a statement
about the finite window, not a statistical one.  Randomized checks are
fully reproducible: the seed and parameters determine the report, and
chunked runs merge associatively so thread count never changes a tally.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .coinduce import (
    cocycle,
    coinduced_act,
    coset_configs_agree,
    coset_of,
    from_coset_config,
    to_coset_config,
)
from .config import (
    DEFAULT_ENUMERATION_CAP,
    Configuration,
    Distribution,
    EnumerationTooLarge,
    bit_alphabet,
    index_matrix,
    plain_alphabet,
    sample_matrix,
    translate,
)
from .factormaps import FactorMap
from .freegroup import ball, inv, mul, random_word

CHUNK_SIZE = 1 << 16
MC_MIN_SAMPLES = 1000


class WindowTooSmall(ValueError):
    """The input ball cannot cover the output window plus the map cost."""


@dataclass(frozen=True)
class PushforwardReport:
    """Outcome of one pushforward verification run."""

    map_name: str
    mode: str  # "exact" | "monte_carlo"
    input_alphabet: str
    output_alphabet: str
    input_sites: tuple[str, ...]
    output_sites: tuple[str, ...]
    total: int
    n_patterns: int
    counts: tuple[int, ...] | None
    max_deviation: float
    truncation_count: int
    verdict: str  # "pass" | "fail" | "withheld"
    expected_count: int | None = None
    valid_samples: int | None = None
    tv_distance: float | None = None
    threshold: float | None = None
    truncation_rate: float | None = None
    seed: int | None = None

    def to_json(self) -> dict:
        return {
            "map": self.map_name,
            "mode": self.mode,
            "input_alphabet": self.input_alphabet,
            "output_alphabet": self.output_alphabet,
            "input_sites": list(self.input_sites),
            "output_sites": list(self.output_sites),
            "total": self.total,
            "valid_samples": self.valid_samples,
            "n_patterns": self.n_patterns,
            "expected_count": self.expected_count,
            "counts": None if self.counts is None else list(self.counts),
            "max_deviation": self.max_deviation,
            "tv_distance": self.tv_distance,
            "threshold": self.threshold,
            "truncation_count": self.truncation_count,
            "truncation_rate": self.truncation_rate,
            "verdict": self.verdict,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class PropertyReport:
    """Outcome of a randomized property check."""

    name: str
    trials: int
    failures: int
    first_counterexample: dict | None
    seed: int

    @property
    def verdict(self) -> str:
        return "pass" if self.failures == 0 else "fail"

    def to_json(self) -> dict:
        return {
            "property": self.name,
            "trials": self.trials,
            "failures": self.failures,
            "first_counterexample": self.first_counterexample,
            "seed": self.seed,
            "verdict": self.verdict,
        }


def _run_chunks(worker: Callable, chunks: Sequence, threads: int) -> list:
    """Run the worker over chunks, preserving chunk order in the results
    so merges are deterministic regardless of thread count."""
    if threads <= 1:
        return [worker(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, chunks))


def _pattern_counts(out: np.ndarray, out_size: int, n_patterns: int) -> tuple[np.ndarray, int]:
    """Tally output-window patterns; rows containing undefined entries are
    excluded and counted as truncated."""
    valid = (out >= 0).all(axis=1)
    truncated = int(out.shape[0] - valid.sum())
    rows = out[valid]
    pattern = np.zeros(rows.shape[0], dtype=np.int64)
    base = 1
    for j in range(rows.shape[1]):
        pattern += rows[:, j] * base
        base *= out_size
    return np.bincount(pattern, minlength=n_patterns), truncated


def exact_pushforward(
    fmap: FactorMap,
    r_in: int,
    r_out: int,
    *,
    threads: int = 1,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> PushforwardReport:
    """Enumerate every input on ball(r_in) under the uniform product law
    and check the output pattern counts on ball(r_out) are exactly equal.
    """
    if fmap.window_cost is None:
        raise ValueError(f"{fmap.name} has unbounded lookahead; use mc_pushforward")
    if r_out + fmap.window_cost > r_in:
        raise WindowTooSmall(
            f"need r_out + {fmap.window_cost} <= r_in; got r_in={r_in}, r_out={r_out}"
        )
    sites_in = ball(r_in)
    sites_out = ball(r_out)
    size_in = fmap.input_alphabet.size
    size_out = fmap.output_alphabet.size
    total = size_in ** len(sites_in)
    n_patterns = size_out ** len(sites_out)
    if total > cap or n_patterns > cap:
        raise EnumerationTooLarge(f"{total} inputs / {n_patterns} patterns exceed cap {cap}")

    def worker(rng: tuple[int, int]) -> np.ndarray:
        lo, hi = rng
        values = index_matrix(size_in, len(sites_in), lo, hi)
        out = fmap.apply_batch(values, sites_in, sites_out)
        counts, truncated = _pattern_counts(out, size_out, n_patterns)
        if truncated:
            raise AssertionError("bounded map left outputs undefined inside its window")
        return counts

    chunks = [(lo, min(lo + CHUNK_SIZE, total)) for lo in range(0, total, CHUNK_SIZE)]
    counts = sum(_run_chunks(worker, chunks, threads))
    counts = np.asarray(counts, dtype=np.int64)
    divisible = total % n_patterns == 0
    expected = total // n_patterns
    if divisible:
        max_dev = float(np.abs(counts - expected).max())
    else:
        max_dev = float(np.abs(counts - total / n_patterns).max())
    return PushforwardReport(
        map_name=fmap.name,
        mode="exact",
        input_alphabet=fmap.input_alphabet.name,
        output_alphabet=fmap.output_alphabet.name,
        input_sites=tuple(str(w) for w in sites_in),
        output_sites=tuple(str(w) for w in sites_out),
        total=total,
        n_patterns=n_patterns,
        counts=tuple(int(c) for c in counts) if n_patterns <= 4096 else None,
        max_deviation=max_dev,
        truncation_count=0,
        verdict="pass" if (divisible and max_dev == 0.0) else "fail",
        expected_count=expected if divisible else None,
    )


def _target_pattern_probs(target: Distribution, n_out: int) -> np.ndarray:
    """Joint law of the output window under the declared product target;
    pattern index has site 0 least significant."""
    w = np.asarray(target.float_weights())
    probs = np.array([1.0])
    for _ in range(n_out):
        probs = (w[:, None] * probs[None, :]).ravel(order="F")
    return probs


def mc_pushforward(
    fmap: FactorMap,
    input_dist: Distribution,
    r_in: int,
    r_out: int,
    n_samples: int,
    seed: int,
    *,
    threshold: float | None = None,
    threads: int = 1,
    cap: int = DEFAULT_ENUMERATION_CAP,
    min_samples: int = MC_MIN_SAMPLES,
) -> PushforwardReport:
    """Seeded i.i.d. sampling of the map's input dependency sites, with
    the empirical output-window law compared to the declared product
    target by total-variation distance.

    Samples whose output window contains an undefined entry (star-map ray
    truncation at the window edge) are excluded and counted.  The default
    threshold is the 4 * sqrt(n_patterns / N) rule; it is echoed in the
    report either way.  Verdicts are withheld below ``min_samples`` valid
    samples.
    """
    if n_samples < 1:
        raise ValueError("need at least one sample")
    if input_dist.alphabet != fmap.input_alphabet:
        raise ValueError(f"{fmap.name} expects {fmap.input_alphabet.name} inputs")
    out_sites = ball(r_out)
    dep_sites = fmap.dependency_sites(out_sites, r_in)
    size_out = fmap.output_alphabet.size
    n_patterns = size_out ** len(out_sites)
    if n_patterns > cap:
        raise EnumerationTooLarge(f"{n_patterns} output patterns exceed cap {cap}")
    target = fmap.pushforward(input_dist)
    target_probs = _target_pattern_probs(target, len(out_sites))
    if threshold is None:
        threshold = 4.0 * math.sqrt(n_patterns / n_samples)

    bounds = [(lo, min(lo + CHUNK_SIZE, n_samples)) for lo in range(0, n_samples, CHUNK_SIZE)]
    seeds = np.random.SeedSequence(seed).spawn(len(bounds))

    def worker(item) -> tuple[np.ndarray, int]:
        (lo, hi), chunk_seed = item
        rng = np.random.default_rng(chunk_seed)
        values = sample_matrix(input_dist, len(dep_sites), hi - lo, rng)
        out = fmap.apply_batch(values, dep_sites, out_sites)
        return _pattern_counts(out, size_out, n_patterns)

    results = _run_chunks(worker, list(zip(bounds, seeds)), threads)
    counts = sum(r[0] for r in results)
    truncated = sum(r[1] for r in results)
    counts = np.asarray(counts, dtype=np.int64)
    n_valid = int(counts.sum())
    if n_valid > 0:
        emp = counts / n_valid
        tv = 0.5 * float(np.abs(emp - target_probs).sum())
    else:
        tv = 1.0
    if n_valid < min_samples:
        verdict = "withheld"
    else:
        verdict = "pass" if tv <= threshold else "fail"
    return PushforwardReport(
        map_name=fmap.name,
        mode="monte_carlo",
        input_alphabet=fmap.input_alphabet.name,
        output_alphabet=fmap.output_alphabet.name,
        input_sites=tuple(str(w) for w in dep_sites),
        output_sites=tuple(str(w) for w in out_sites),
        total=n_samples,
        n_patterns=n_patterns,
        counts=tuple(int(c) for c in counts) if n_patterns <= 4096 else None,
        max_deviation=float(np.abs(counts / max(n_valid, 1) - target_probs).max()),
        truncation_count=int(truncated),
        verdict=verdict,
        valid_samples=n_valid,
        tv_distance=tv,
        threshold=threshold,
        truncation_rate=truncated / n_samples,
        seed=seed,
    )


def _config_mismatch(lhs: Configuration, rhs: Configuration) -> dict | None:
    """First site where both sides are defined but disagree."""
    for i, w in enumerate(lhs.sites):
        v1 = lhs.values[i]
        v2 = rhs.value_at(w)
        if v1 is not None and v2 is not None and v1 != v2:
            return {"site": str(w), "lhs": v1, "rhs": v2}
    return None


def check_equivariance(
    fmap,
    r: int,
    trials: int,
    seed: int,
    *,
    alphabet=None,
    g_radius: int = 2,
) -> PropertyReport:
    """Translation equivariance: applying the map commutes with the shift
    at every site where both sides are defined (exact symbol equality)."""
    rng = np.random.default_rng(seed)
    sites = ball(r)
    g_pool = ball(g_radius).words
    alpha = alphabet if alphabet is not None else fmap.input_alphabet
    failures = 0
    first = None
    for t in range(trials):
        g = g_pool[int(rng.integers(len(g_pool)))]
        values = rng.integers(0, alpha.size, len(sites))
        x = Configuration(alpha, sites, [int(v) for v in values])
        lhs = fmap.apply(translate(g, x))
        rhs = translate(g, fmap.apply(x))
        mismatch = _config_mismatch(lhs, rhs)
        if mismatch is not None:
            failures += 1
            if first is None:
                first = {"trial": t, "g": str(g), **mismatch, "x": x.to_json()}
    return PropertyReport(f"equivariance[{fmap.name}]", trials, failures, first, seed)


def check_cocycle(trials: int, seed: int, max_len: int = 6) -> PropertyReport:
    """The cocycle identity over random pairs and cosets, as exact
    integer equality of a-exponents."""
    rng = np.random.default_rng(seed)
    failures = 0
    first = None
    for t in range(trials):
        g1 = random_word(rng, max_len)
        g2 = random_word(rng, max_len)
        c = coset_of(random_word(rng, max_len))
        lhs = cocycle(mul(g1, g2), c)
        rhs = cocycle(g1, c) + cocycle(g2, coset_of(mul(inv(g1), c)))
        if lhs != rhs:
            failures += 1
            if first is None:
                first = {"trial": t, "g1": str(g1), "g2": str(g2), "coset": str(c), "lhs": lhs, "rhs": rhs}
    return PropertyReport("cocycle_identity", trials, failures, first, seed)


def check_coset_roundtrip(r: int, trials: int, seed: int, *, g_radius: int = 2) -> PropertyReport:
    """Round trip and equivariance of the coset-splitting conjugacy on
    random binary configurations."""
    rng = np.random.default_rng(seed)
    sites = ball(r)
    g_pool = ball(g_radius).words
    alpha = bit_alphabet(1)
    failures = 0
    first = None
    for t in range(trials):
        values = rng.integers(0, 2, len(sites))
        x = Configuration(alpha, sites, [int(v) for v in values])
        g = g_pool[int(rng.integers(len(g_pool)))]
        y = to_coset_config(x)
        back = from_coset_config(y)
        bad = None
        for i, w in enumerate(x.sites):
            if back.value_at(w) != x.values[i]:
                bad = {"kind": "roundtrip", "site": str(w)}
                break
        if bad is None:
            lhs = to_coset_config(translate(g, x))
            rhs = coinduced_act(g, y)
            mismatch = coset_configs_agree(lhs, rhs)
            if mismatch is not None:
                bad = {"kind": "equivariance", "g": str(g), **mismatch}
        if bad is not None:
            failures += 1
            if first is None:
                first = {"trial": t, **bad, "x": x.to_json()}
    return PropertyReport("coset_conjugacy", trials, failures, first, seed)


def exact_coset_pushforward(r: int = 2, *, threads: int = 1) -> PushforwardReport:
    """Exact-uniformity counting for the coset-splitting map on binary
    inputs over ball(r).

    The slot-to-site table is extracted by splitting an index-valued
    configuration through the real conjugacy (not assumed), then every
    binary input is enumerated and the joint pattern over a fixed slot
    window (representatives of length <= 1, positions |j| <= 1) is
    tallied; the split is measure-preserving iff all counts are equal.
    """
    sites = ball(r)
    n = len(sites)
    if 2**n > DEFAULT_ENUMERATION_CAP:
        raise EnumerationTooLarge(f"2^{n} inputs exceed cap")
    marker = plain_alphabet(f"site_index_{n}", tuple(str(i) for i in range(n)))
    indexed = Configuration(marker, sites, list(range(n)))
    split = to_coset_config(indexed)
    slots: list[tuple[str, int, int]] = []  # (coset, position, site index)
    for c in split.cosets:
        if len(c) > 1:
            continue
        for j in (-1, 0, 1):
            v = split.value_at(c, j)
            if v is not None:
                slots.append((str(c), j, v))
    site_idx = np.array([s[2] for s in slots], dtype=np.int64)
    n_patterns = 1 << len(slots)
    total = 1 << n

    def worker(rng_pair: tuple[int, int]) -> np.ndarray:
        lo, hi = rng_pair
        idx = np.arange(lo, hi, dtype=np.int64)
        pattern = np.zeros(hi - lo, dtype=np.int64)
        for pos, si in enumerate(site_idx):
            pattern |= ((idx >> int(si)) & 1) << pos
        return np.bincount(pattern, minlength=n_patterns)

    chunks = [(lo, min(lo + CHUNK_SIZE, total)) for lo in range(0, total, CHUNK_SIZE)]
    counts = np.asarray(sum(_run_chunks(worker, chunks, threads)), dtype=np.int64)
    expected = total // n_patterns
    max_dev = float(np.abs(counts - expected).max())
    return PushforwardReport(
        map_name="coset_split",
        mode="exact",
        input_alphabet="U2",
        output_alphabet="U2",
        input_sites=tuple(str(w) for w in sites),
        output_sites=tuple(f"{c}.a^{j}" for c, j, _ in slots),
        total=total,
        n_patterns=n_patterns,
        counts=tuple(int(c) for c in counts) if n_patterns <= 4096 else None,
        max_deviation=max_dev,
        truncation_count=0,
        verdict="pass" if max_dev == 0.0 else "fail",
        expected_count=expected,
    )
