import numpy as np
import pytest

from bernshift import (
    Configuration,
    CosetConfiguration,
    IDENTITY,
    Word,
    a_power_decomposition,
    ball,
    bit_alphabet,
    cocycle,
    coinduce_factor,
    coinduced_act,
    coset_of,
    from_coset_config,
    full_group_act,
    inv,
    mul,
    sample,
    to_coset_config,
    translate,
    uniform,
    z_relabel,
)
from bernshift.coinduce import coset_configs_agree
from bernshift.freegroup import random_word

U2 = bit_alphabet(1)


def _random_config(rng, sites):
    return Configuration(U2, sites, [int(v) for v in rng.integers(0, 2, len(sites))])


# ----------------------------------------------------------- cosets/cocycle


def test_a_power_decomposition():
    rep, n = a_power_decomposition(Word.parse("baa"))
    assert str(rep) == "b" and n == 2
    rep, n = a_power_decomposition(Word.parse("bAA"))
    assert str(rep) == "b" and n == -2
    rep, n = a_power_decomposition(Word.parse("ab"))
    assert str(rep) == "ab" and n == 0


def test_coset_of_examples():
    assert coset_of(Word.parse("aaa")) == IDENTITY
    assert str(coset_of(Word.parse("bAA"))) == "b"
    assert str(coset_of(Word.parse("abA"))) == "ab"
    assert str(coset_of(Word.parse("bab"))) == "bab"


def test_coset_right_invariance():
    rng = np.random.default_rng(21)
    a = Word.parse("a")
    for _ in range(1000):
        g = random_word(rng, 8)
        assert coset_of(g) == coset_of(mul(g, a))
        assert coset_of(g) == coset_of(mul(g, inv(a)))


def test_cocycle_examples():
    assert cocycle(IDENTITY, coset_of(Word.parse("bab"))) == 0
    assert cocycle(Word.parse("a"), IDENTITY) == 1
    assert cocycle(Word.parse("b"), coset_of(Word.parse("b"))) == 0


def test_cocycle_identity_random():
    rng = np.random.default_rng(22)
    for _ in range(1000):
        g1, g2 = random_word(rng, 6), random_word(rng, 6)
        c = coset_of(random_word(rng, 6))
        lhs = cocycle(mul(g1, g2), c)
        rhs = cocycle(g1, c) + cocycle(g2, coset_of(mul(inv(g1), c)))
        assert lhs == rhs


# --------------------------------------------------------- coinduced action


def _coset_sample(rng, cosets, window):
    rows = tuple(
        tuple(int(v) for v in rng.integers(0, 2, 2 * window + 1)) for _ in cosets
    )
    return CosetConfiguration(U2, tuple(cosets), window, rows)


def test_coinduced_act_identity():
    rng = np.random.default_rng(23)
    cosets = sorted({coset_of(w) for w in ball(3)}, key=lambda w: w.shortlex_key)
    y = _coset_sample(rng, cosets, 3)
    assert coinduced_act(IDENTITY, y) == y


def test_coinduced_act_a_shifts_the_home_coset():
    rng = np.random.default_rng(24)
    cosets = sorted({coset_of(w) for w in ball(2)}, key=lambda w: w.shortlex_key)
    y = _coset_sample(rng, cosets, 2)
    moved = coinduced_act(Word.parse("a"), y)
    for j in range(-1, 3):
        assert moved.value_at(IDENTITY, j) == y.value_at(IDENTITY, j - 1)
    assert moved.value_at(IDENTITY, -2) is None  # shifted off the window


def test_coinduced_action_law():
    rng = np.random.default_rng(25)
    cosets = sorted({coset_of(w) for w in ball(3)}, key=lambda w: w.shortlex_key)
    for _ in range(500):
        y = _coset_sample(rng, cosets, 3)
        g1, g2 = random_word(rng, 3), random_word(rng, 3)
        lhs = coinduced_act(g1, coinduced_act(g2, y))
        rhs = coinduced_act(mul(g1, g2), y)
        assert coset_configs_agree(lhs, rhs) is None


# ------------------------------------------------------- coinduced factors


def test_coinduce_factor_identity_and_inverse():
    rng = np.random.default_rng(26)
    cosets = sorted({coset_of(w) for w in ball(2)}, key=lambda w: w.shortlex_key)
    y = _coset_sample(rng, cosets, 2)
    ident = z_relabel("id", U2, U2, [0, 1])
    assert coinduce_factor(ident, y) == y
    sw = z_relabel("swap", U2, U2, [1, 0])
    assert coinduce_factor(sw.inverse(), coinduce_factor(sw, y)) == y


def test_coinduce_factor_equivariance():
    rng = np.random.default_rng(27)
    cosets = sorted({coset_of(w) for w in ball(3)}, key=lambda w: w.shortlex_key)
    sw = z_relabel("swap", U2, U2, [1, 0])
    for _ in range(500):
        y = _coset_sample(rng, cosets, 3)
        g = random_word(rng, 3)
        lhs = coinduce_factor(sw, coinduced_act(g, y))
        rhs = coinduced_act(g, coinduce_factor(sw, y))
        assert coset_configs_agree(lhs, rhs) is None
        assert lhs == rhs  # single-site relabel: definedness matches too


# --------------------------------------------------------- the conjugacy


def test_split_reads_sites_through_the_section():
    x = sample(uniform(U2), ball(2), 31)
    y = to_coset_config(x)
    assert y.value_at(IDENTITY, 2) == x.value_at(Word.parse("aa"))
    assert y.value_at(Word.parse("b"), -1) == x.value_at(Word.parse("bA"))
    assert y.value_at(Word.parse("b"), 0) == x.value_at(Word.parse("b"))


def test_merge_reads_the_a_power_slot():
    # g = b a^2 corresponds to coset b at position 2
    cosets = (IDENTITY, Word.parse("b"))
    rows = ((None,) * 5, (None, None, None, None, 1))
    y = CosetConfiguration(U2, cosets, 2, rows)
    x = from_coset_config(y)
    assert x.value_at(Word.parse("baa")) == 1
    assert x.value_at(Word.parse("ba")) is None


def test_roundtrip_on_random_configurations():
    rng = np.random.default_rng(32)
    sites = ball(3)
    for _ in range(500):
        x = _random_config(rng, sites)
        back = from_coset_config(to_coset_config(x))
        for i, w in enumerate(sites):
            assert back.value_at(w) == x.values[i]


def test_roundtrip_fixes_constants():
    x = Configuration(U2, ball(2), [1] * 17)
    back = from_coset_config(to_coset_config(x))
    assert all(back.value_at(w) == 1 for w in x.sites)


def test_impulse_survives_roundtrip_at_predicted_slot():
    sites = ball(3)
    target = Word.parse("baa")
    x = Configuration(U2, sites, [1 if w == target else 0 for w in sites])
    y = to_coset_config(x)
    assert y.value_at(Word.parse("b"), 2) == 1
    assert from_coset_config(y).value_at(target) == 1


def test_split_equivariance():
    rng = np.random.default_rng(33)
    sites = ball(3)
    g_pool = ball(2).words
    for _ in range(500):
        x = _random_config(rng, sites)
        g = g_pool[int(rng.integers(len(g_pool)))]
        lhs = to_coset_config(translate(g, x))
        rhs = coinduced_act(g, to_coset_config(x))
        assert coset_configs_agree(lhs, rhs) is None


def test_coinduced_act_preserves_iid_marginals():
    # Monte Carlo: the law of a fixed slot is unchanged by the action.
    # 4 sigma for 40000 fair bits is 4 * 0.5 / 200 = 0.01.
    rng = np.random.default_rng(36)
    cosets = sorted({coset_of(w) for w in ball(2)}, key=lambda w: w.shortlex_key)
    g = Word.parse("ba")
    n, hits, total = 40_000, 0, 0
    for _ in range(n):
        y = _coset_sample(rng, cosets, 2)
        moved = coinduced_act(g, y)
        v = moved.value_at(IDENTITY, 0)
        if v is not None:
            total += 1
            hits += v
    assert total == n  # this slot stays defined under g
    assert abs(hits / total - 0.5) < 0.01


def test_split_map_merge_is_equivariant_and_invertible():
    # an invertible per-coset relabeling lifts to an invertible,
    # translation-commuting map of group-indexed configurations
    rng = np.random.default_rng(37)
    sites = ball(3)
    sw = z_relabel("swap", U2, U2, [1, 0])
    g_pool = ball(2).words
    for _ in range(200):
        x = _random_config(rng, sites)
        lifted = from_coset_config(coinduce_factor(sw, to_coset_config(x)))
        # invertible: applying the inverse relabel undoes it
        back = from_coset_config(coinduce_factor(sw.inverse(), to_coset_config(lifted)))
        for i, w in enumerate(sites):
            assert back.value_at(w) == x.values[i]
        # equivariant: commutes with a random translation on x's sites
        g = g_pool[int(rng.integers(len(g_pool)))]
        lhs = from_coset_config(coinduce_factor(sw, to_coset_config(translate(g, x))))
        rhs = translate(g, lifted)
        for w in rhs.sites:
            v1, v2 = lhs.value_at(w), rhs.value_at(w)
            if v1 is not None and v2 is not None:
                assert v1 == v2


def test_full_group_degenerate_case():
    # With the whole group as subgroup there is a single coset, the
    # section is the identity, and the coinduced action is the shift.
    rng = np.random.default_rng(34)
    x = _random_config(rng, ball(2))
    g1, g2 = Word.parse("ab"), Word.parse("Ba")
    assert full_group_act(g1, x) == translate(g1, x)
    assert full_group_act(g1, full_group_act(g2, x)) == full_group_act(mul(g1, g2), x)


# ------------------------------------------------------------------- JSON


def test_coset_config_json_roundtrip():
    rng = np.random.default_rng(35)
    x = _random_config(rng, ball(2))
    y = to_coset_config(x)
    data = y.to_json()
    assert set(data) == {"alphabet", "cosets", "window", "values"}
    assert CosetConfiguration.from_json(data) == y


def test_coset_config_validation():
    with pytest.raises(ValueError):
        CosetConfiguration(U2, (Word.parse("ba"),), 1, ((0, 0, 0),))
    with pytest.raises(ValueError):
        CosetConfiguration(U2, (IDENTITY,), 1, ((0, 0),))
