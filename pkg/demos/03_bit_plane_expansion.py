"""Iterated bit-plane expansion: from one fair bit to arbitrarily many.

Each stage keeps the planes produced so far and doubles the last working
plane with the Ornstein-Weiss rule.  Plane m never changes after stage m,
so truncating to the first m planes costs a window of exactly m.  The
limit is a factor map onto the full product of fair bits.
"""

from bernshift import ball, bit_alphabet, plane_projection, sample, timar, timar_stage, uniform

x = sample(uniform(bit_alphabet(1)), ball(6), seed=3)
print(f"input: one bit plane on ball(6) ({len(x.sites)} sites)")

print("\nstagewise expansion:")
cur = x
for n in range(4):
    cur = timar_stage(n).apply(cur)
    print(
        f"  after stage {n}: alphabet {cur.alphabet.name:4s}"
        f" ({cur.alphabet.planes} planes), {cur.defined_count} defined sites"
    )

print("\nstabilization: plane m agrees between the m-stage and (m+2)-stage maps")
for m in (1, 2, 3):
    short = timar(m).apply(x)
    long = plane_projection(m + 2, m).apply(timar(m + 2).apply(x))
    agree = all(
        v1 == v2
        for v1, v2 in zip(short.values, long.values)
        if v1 is not None and v2 is not None
    )
    print(f"  m={m}: windows {m} vs {m + 2}, common sites agree: {agree}")

print("\neach extracted plane is individually a fair bit (exact counting on ball(1)):")
from bernshift import exact_pushforward

rep = exact_pushforward(timar(1), r_in=2, r_out=1)
print(f"  timar:1 on ball(2) -> ball(1): verdict {rep.verdict}, expected {rep.expected_count} per pattern")
