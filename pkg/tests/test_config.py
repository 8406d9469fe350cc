from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bernshift import (
    Configuration,
    Distribution,
    EnumerationTooLarge,
    IDENTITY,
    Word,
    alphabet_by_name,
    ball,
    bit_alphabet,
    config_from_index,
    enumerate_configurations,
    mul,
    plain_alphabet,
    point_mass,
    product_distribution,
    restrict,
    sample,
    star_alphabet,
    star_base,
    star_image,
    translate,
    uniform,
)
from bernshift.config import enumeration_size, index_matrix, sample_matrix
from bernshift.freegroup import random_word

from oracles import translate_direct

U2 = bit_alphabet(1)


def _random_config(rng, alphabet, sites, partial=False):
    vals = [int(v) for v in rng.integers(0, alphabet.size, len(sites))]
    if partial:
        for i in range(len(vals)):
            if rng.random() < 0.2:
                vals[i] = None
    return Configuration(alphabet, sites, vals)


# ---------------------------------------------------------------- alphabets


def test_alphabet_validation():
    with pytest.raises(ValueError):
        plain_alphabet("bad", ["x", "x"])
    assert bit_alphabet(2).size == 4
    assert star_alphabet(2).size == 5
    assert star_alphabet(1).star_index == 2


def test_bit_plane_roundtrip_is_bijection():
    alpha = bit_alphabet(3)
    seen = set()
    for i in range(8):
        bits = alpha.index_to_bits(i)
        assert alpha.bits_to_index(bits) == i
        seen.add(bits)
    assert len(seen) == 8
    # plane 1 is the least significant bit
    assert alpha.index_to_bits(1) == (1, 0, 0)
    assert alpha.index_to_bits(4) == (0, 0, 1)


def test_alphabet_by_name():
    assert alphabet_by_name("U4") == bit_alphabet(2)
    assert alphabet_by_name("U2*") == star_alphabet(1)
    with pytest.raises(ValueError):
        alphabet_by_name("U3")


# ------------------------------------------------------------ distributions


def test_distribution_validation():
    with pytest.raises(ValueError):
        Distribution(U2, (0.7, 0.7))
    with pytest.raises(ValueError):
        Distribution(U2, (Fraction(1, 3), Fraction(1, 3)))
    d = uniform(bit_alphabet(2))
    assert d.is_exact and not d.is_trivial
    assert point_mass(U2, 1).is_trivial


def test_star_distributions():
    lam = star_base(0.25)
    assert lam.float_weights() == (0.25, 0.25, 0.5)
    mu = star_image(0.25)
    assert mu.float_weights() == (0.125, 0.125, 0.125, 0.125, 0.5)
    with pytest.raises(ValueError):
        star_base(0.6)


def test_product_distribution():
    d = product_distribution(uniform(U2), uniform(bit_alphabet(2)))
    assert d.alphabet.size == 8
    assert all(w == Fraction(1, 8) for w in d.weights)


# ------------------------------------------------------------ translation


def test_translate_identity():
    x = _random_config(np.random.default_rng(0), U2, ball(2))
    assert translate(IDENTITY, x) == x


def test_translate_impulse_example():
    b1 = ball(1)
    x = Configuration(U2, b1, [1 if w.is_identity else 0 for w in b1])
    tx = translate(Word.parse("a"), x)
    assert tx.value_at(Word.parse("a")) == 1
    assert tx.value_at(IDENTITY) == 0  # (a.x)(e) = x(a^-1) = 0


def test_translate_action_law_and_pointwise_oracle():
    rng = np.random.default_rng(42)
    sites = ball(2)
    for _ in range(500):
        g1, g2 = random_word(rng, 4), random_word(rng, 4)
        x = _random_config(rng, U2, sites, partial=True)
        lhs = translate(g1, translate(g2, x))
        rhs = translate(mul(g1, g2), x)
        assert lhs == rhs
        for w in lhs.sites:
            assert lhs.value_at(w) == translate_direct(mul(g1, g2), x, w)


def test_translate_preserves_undefined():
    b1 = ball(1)
    x = Configuration(U2, b1, [None, 1, 0, None, 1])
    tx = translate(Word.parse("b"), x)
    assert tx.defined_count == x.defined_count


# ---------------------------------------------------------------- sampling


def test_sample_point_mass_and_determinism():
    sites = ball(2)
    const = sample(point_mass(U2, 1), sites, 99)
    assert all(v == 1 for v in const.values)
    assert sample(uniform(U2), sites, 123) == sample(uniform(U2), sites, 123)
    assert sample(uniform(U2), sites, 123) != sample(uniform(U2), sites, 124)


def test_sample_single_site_frequencies():
    # 10^6 fair-bit draws; 4 sigma = 4 * 0.5 / 1000 = 0.002
    rng = np.random.default_rng(314)
    draws = sample_matrix(uniform(U2), 1, 10**6, rng)
    freq = draws.mean()
    assert abs(freq - 0.5) < 0.002


def test_sample_respects_weights():
    rng = np.random.default_rng(7)
    draws = sample_matrix(star_base(0.25), 1, 200_000, rng)
    counts = np.bincount(draws.ravel(), minlength=3) / 200_000
    assert abs(counts[2] - 0.5) < 0.005


# ------------------------------------------------------------- enumeration


def test_enumeration_counts():
    assert enumeration_size(U2, ball(1)) == 32
    assert sum(1 for _ in enumerate_configurations(U2, ball(1))) == 32
    assert enumeration_size(U2, ball(2)) == 131072
    assert sum(1 for _ in enumerate_configurations(U2, ball(2))) == 131072


def test_enumeration_order_convention():
    sites = ball(1)
    stream = enumerate_configurations(U2, sites)
    first = next(stream)
    assert all(v == 0 for v in first.values)
    second = next(stream)
    assert second.values == (1, 0, 0, 0, 0)
    # configuration i assigns site j the symbol (i // size^j) % size
    for i in (0, 1, 5, 31):
        assert config_from_index(U2, sites, i).values == tuple((i >> j) & 1 for j in range(5))


def test_enumeration_matches_index_matrix():
    sites = ball(1)
    mat = index_matrix(2, len(sites), 0, 32)
    for i, cfg in enumerate(enumerate_configurations(U2, sites)):
        assert tuple(mat[i]) == cfg.values


def test_enumeration_cap():
    with pytest.raises(EnumerationTooLarge):
        next(enumerate_configurations(bit_alphabet(2), ball(2)))


def test_enumeration_uniform_marginals():
    # integer counting: every site marginal is exactly uniform
    counts = np.zeros(5, dtype=int)
    for cfg in enumerate_configurations(U2, ball(1)):
        counts += np.asarray(cfg.values)
    assert (counts == 16).all()


# -------------------------------------------------------------- restriction


def test_restrict():
    rng = np.random.default_rng(3)
    x = _random_config(rng, U2, ball(2))
    assert restrict(x, x.sites) == x
    tiny = restrict(x, ball(0))
    assert len(tiny.sites) == 1 and tiny.value_at(IDENTITY) == x.value_at(IDENTITY)
    mid = restrict(x, ball(1))
    assert restrict(mid, ball(0)) == restrict(x, ball(0))
    # sites outside become undefined
    wide = restrict(tiny, ball(1))
    assert wide.defined_count == 1


# --------------------------------------------------------------------- JSON


def test_config_json_roundtrip_and_packing():
    x = sample(uniform(U2), ball(1), 5)
    data = x.to_json()
    assert set(data) == {"alphabet", "sites", "values", "packed"}
    assert data["packed"] == sum(v << j for j, v in enumerate(x.values))
    assert Configuration.from_json(data) == x
    # partial configurations carry null and no packed form
    y = Configuration(U2, ball(1), [None, 1, 0, 1, 1])
    data = y.to_json()
    assert data["values"][0] is None and "packed" not in data
    assert Configuration.from_json(data) == y


def test_config_validation():
    with pytest.raises(ValueError):
        Configuration(U2, ball(1), [0, 1])
    with pytest.raises(ValueError):
        Configuration(U2, ball(0), [3])


@given(st.integers(min_value=0, max_value=131071))
def test_packed_bits_matches_index(i):
    sites = ball(2)
    assert config_from_index(U2, sites, i).packed_bits() == i
