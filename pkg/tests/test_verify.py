import json

import numpy as np
import pytest

from bernshift import (
    Configuration,
    EnumerationTooLarge,
    IDENTITY,
    WindowTooSmall,
    ball,
    bit_alphabet,
    check_cocycle,
    check_coset_roundtrip,
    check_equivariance,
    cocycle,
    coset_of,
    exact_coset_pushforward,
    exact_pushforward,
    gen_power,
    identity_map,
    mc_pushforward,
    mul,
    ow,
    star,
    star_base,
    timar,
    uniform,
)
from bernshift.config import enumerate_configurations
from bernshift.freegroup import GEN_A, random_word

from oracles import ow_direct

U2 = bit_alphabet(1)


# ------------------------------------------------------------- exact mode


def test_ow_exact_small_window_against_brute_force():
    rep = exact_pushforward(ow(), 1, 0)
    assert rep.verdict == "pass"
    assert rep.total == 32 and rep.n_patterns == 4 and rep.expected_count == 8
    assert rep.counts == (8, 8, 8, 8)
    # dict-based oracle straight off the defining formula
    tally = {}
    for cfg in enumerate_configurations(U2, ball(1)):
        v = ow_direct(cfg, IDENTITY)
        tally[v] = tally.get(v, 0) + 1
    assert tally == {0: 8, 1: 8, 2: 8, 3: 8}


def test_identity_relabel_trivially_uniform():
    rep = exact_pushforward(identity_map(U2), 1, 1)
    assert rep.verdict == "pass" and rep.max_deviation == 0.0


def test_exact_window_too_small():
    with pytest.raises(WindowTooSmall):
        exact_pushforward(ow(), 1, 1)


def test_exact_enumeration_cap():
    with pytest.raises(EnumerationTooLarge):
        exact_pushforward(ow(), 3, 0)


def test_exact_rejects_unbounded_maps():
    with pytest.raises(ValueError):
        exact_pushforward(star(0.25), 2, 0)


def test_exact_thread_count_does_not_change_the_report():
    r1 = exact_pushforward(ow(), 2, 1, threads=1)
    r4 = exact_pushforward(ow(), 2, 1, threads=4)
    assert r1.to_json() == r4.to_json()
    assert r1.verdict == "pass" and r1.expected_count == 128


def test_exact_report_json_field_order():
    data = exact_pushforward(ow(), 1, 0).to_json()
    assert list(data)[:6] == ["map", "mode", "input_alphabet", "output_alphabet", "input_sites", "output_sites"]


# -------------------------------------------------------------- monte carlo


def test_mc_smoke_run_withholds_verdict():
    rep = mc_pushforward(ow(), uniform(U2), 2, 0, 10, 5)
    assert rep.verdict == "withheld"
    assert rep.total == 10 and rep.valid_samples == 10
    data = rep.to_json()
    assert data["threshold"] is not None and data["tv_distance"] is not None


def test_mc_agrees_with_exact_for_the_doubling_map():
    exact = exact_pushforward(ow(), 2, 1)
    mc = mc_pushforward(ow(), uniform(U2), 2, 1, 50_000, 6)
    assert exact.verdict == mc.verdict == "pass"
    assert mc.truncation_count == 0


def test_mc_star_single_site_law():
    rep = mc_pushforward(star(0.25), star_base(0.25), 12, 0, 100_000, 7, threshold=0.01)
    assert rep.verdict == "pass"
    assert rep.truncation_rate < 1e-3
    target = (0.125, 0.125, 0.125, 0.125, 0.5)
    freq = np.asarray(rep.counts) / rep.valid_samples
    assert np.abs(freq - target).max() < 0.01


def test_mc_seeded_reproducibility_and_thread_independence():
    kw = dict(threshold=0.02)
    r1 = mc_pushforward(star(0.25), star_base(0.25), 10, 0, 20_000, 8, **kw)
    r2 = mc_pushforward(star(0.25), star_base(0.25), 10, 0, 20_000, 8, **kw)
    r4 = mc_pushforward(star(0.25), star_base(0.25), 10, 0, 20_000, 8, threads=4, **kw)
    assert r1.to_json() == r2.to_json() == r4.to_json()
    other = mc_pushforward(star(0.25), star_base(0.25), 10, 0, 20_000, 9, **kw)
    assert other.counts != r1.counts


def test_mc_fails_when_the_declared_target_is_wrong():
    # harness self-test: a map that lies about its output law must be
    # caught by the total-variation comparison
    from bernshift import Distribution

    class _LyingMap(type(identity_map(U2))):
        def pushforward(self, dist):
            return Distribution(U2, (0.9, 0.1))

    liar = _LyingMap("liar", U2, U2, identity_map(U2).offsets, identity_map(U2).table)
    rep = mc_pushforward(liar, uniform(U2), 2, 0, 20_000, 10, threshold=0.01)
    assert rep.verdict == "fail"
    assert rep.tv_distance > 0.3


# -------------------------------------------------------------- properties


def test_equivariance_passes_for_shipped_maps():
    assert check_equivariance(ow(), 3, 200, 11).failures == 0
    assert check_equivariance(timar(2), 4, 100, 12).failures == 0
    assert check_equivariance(star(0.25), 3, 200, 13).failures == 0


class _BrokenMap:
    """Harness self-test fixture: reads the site's word length, which no
    translation-equivariant rule may do."""

    name = "broken"
    input_alphabet = U2
    output_alphabet = U2
    window_cost = 0

    def apply(self, x):
        values = [
            None if v is None else (v if len(w) % 2 == 0 else 1 - v)
            for w, v in zip(x.sites, x.values)
        ]
        return Configuration(U2, x.sites, values)


def test_equivariance_catches_corrupted_rule():
    rep = check_equivariance(_BrokenMap(), 2, 100, 14)
    assert rep.failures > 0
    assert rep.verdict == "fail"
    ce = rep.first_counterexample
    assert ce is not None
    assert {"trial", "g", "site", "lhs", "rhs", "x"} <= set(ce)


def test_cocycle_check():
    rep = check_cocycle(1000, 15)
    assert rep.failures == 0 and rep.verdict == "pass"


def test_cocycle_power_reduction():
    # for g1 = a^k and the home coset, the identity reduces to
    # k + cocycle(g2, a^-k H) with a^-k H = H
    rng = np.random.default_rng(16)
    for _ in range(200):
        k = int(rng.integers(1, 5))
        g1 = gen_power(IDENTITY, GEN_A, k)
        g2 = random_word(rng, 5)
        lhs = cocycle(mul(g1, g2), IDENTITY)
        rhs = k + cocycle(g2, coset_of(mul(g1.inverse(), IDENTITY)))
        assert lhs == rhs


def test_coset_roundtrip_check():
    rep = check_coset_roundtrip(3, 100, 17)
    assert rep.failures == 0


def test_coset_pushforward_exact_uniformity():
    rep = exact_coset_pushforward(2)
    assert rep.verdict == "pass"
    assert rep.max_deviation == 0.0
    assert rep.n_patterns == 512 and rep.expected_count == 256
    assert sum(rep.counts) == 1 << 17
    r4 = exact_coset_pushforward(2, threads=4)
    assert r4.to_json() == rep.to_json()


def test_property_report_json():
    data = check_cocycle(50, 18).to_json()
    assert list(data) == ["property", "trials", "failures", "first_counterexample", "seed", "verdict"]
    json.dumps(data)  # JSON-safe


def test_every_bit_plane_is_individually_uniform():
    # exhaustive counting on the largest enumerable input ball
    assert exact_pushforward(timar(1), 2, 1).verdict == "pass"
    assert exact_pushforward(timar(2), 2, 0).verdict == "pass"


def test_property_checks_are_seed_reproducible():
    assert check_cocycle(200, 19).to_json() == check_cocycle(200, 19).to_json()
    r1 = check_equivariance(ow(), 2, 50, 20).to_json()
    r2 = check_equivariance(ow(), 2, 50, 20).to_json()
    assert r1 == r2
    j1 = check_coset_roundtrip(2, 30, 21).to_json()
    j2 = check_coset_roundtrip(2, 30, 21).to_json()
    assert j1 == j2
