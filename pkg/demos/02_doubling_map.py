"""The Ornstein-Weiss doubling map: two symbols in, four symbols out.

The local rule emits (x(g)+x(ga), x(g)+x(gb)) over Z/2 x Z/2 at every
site.  On the free group this is an honest factor map of Bernoulli
shifts: enumerating all 2^17 fair-coin inputs on ball(2), every one of
the 4^5 output patterns on ball(1) appears exactly 128 times.  On an
amenable group nothing like this can happen, because entropy can only
drop under factor maps.
"""

import numpy as np

from bernshift import ball, bit_alphabet, exact_pushforward, ow, sample, uniform

fmap = ow()
print("map:", fmap.describe())

x = sample(uniform(bit_alphabet(1)), ball(2), seed=1)
y = fmap.apply(x)
print(f"\ninput on ball(2): {x.defined_count} defined sites")
print(f"output:           {y.defined_count} defined sites (window cost 1 shaves the boundary)")
print("output at e and its neighbors:", [y.value_at(w) for w in ball(1)])

print("\nexhaustive pushforward check (integer arithmetic, no sampling):")
rep = exact_pushforward(fmap, r_in=2, r_out=1)
counts = np.asarray(rep.counts)
print(f"  inputs:   {rep.total}")
print(f"  patterns: {rep.n_patterns}")
print(f"  counts:   min {counts.min()}, max {counts.max()} (expected {rep.expected_count})")
print(f"  verdict:  {rep.verdict}")

print("\nthe rule is a pointwise GF(2) homomorphism:")
x2 = sample(uniform(bit_alphabet(1)), ball(2), seed=2)
xor_in = type(x)(x.alphabet, x.sites, [a ^ b for a, b in zip(x.values, x2.values)])
lhs = fmap.apply(xor_in)
rhs = [
    None if va is None else va ^ vb
    for va, vb in zip(fmap.apply(x).values, fmap.apply(x2).values)
]
print("  ow(x + x') == ow(x) + ow(x') pointwise:", lhs.values == tuple(rhs))
