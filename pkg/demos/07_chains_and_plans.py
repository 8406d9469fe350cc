"""Chains: planning the boosting pipeline and running its constructive part.

The composition argument strings together star stages (each raising the
base entropy by 2p log 2) with isomorphic recodings back to star shape.
The recodings have no local rule -- they invoke an abstract isomorphism
-- so plans mark them `external`: the entropy ledger still tracks them
exactly, but only chains without external stages can be executed.

Per-coset cell maps lift through the coset conjugacy to maps of the whole
shift; the lifted swap below really is the pointwise swap, and commutes
with every translation.
"""

import json

from bernshift import (
    ball,
    bit_alphabet,
    check_equivariance,
    coinduce_chain_step,
    coinduced_map,
    plan_boost_chain,
    run_chain,
    sample,
    solve_p,
    star_base,
    swap_bits,
    uniform,
    validate_plan,
)
from bernshift.pipeline import ExternalStageUnresolved

print("plan from H0 = 0.5 (two star stages, one external recoding):")
plan = plan_boost_chain(star_base(solve_p(0.5)))
for i, stage in enumerate(plan.stages):
    tag = "external" if stage.is_external else f"star p={stage.params['p']:.4f}"
    print(f"  stage {i}: {tag:22s} ledger entropy {plan.entropy_ledger[i]:.6f}")
print(f"  terminated: {plan.terminated}, ledger issues: {validate_plan(plan)}")

x = sample(star_base(solve_p(0.5)), ball(4), seed=8)
try:
    run_chain(plan, x)
except ExternalStageUnresolved as exc:
    print(f"  running it fails honestly: {exc}")

print("\na one-step plan (H0 = 0.6) is fully constructive:")
plan1 = plan_boost_chain(star_base(solve_p(0.6)))
x1 = sample(star_base(solve_p(0.6)), ball(4), seed=9)
run = run_chain(plan1, x1)
for stage in run.stages:
    print(f"  {stage}")

print("\nlifting the 0<->1 swap through the coset conjugacy:")
x2 = sample(uniform(bit_alphabet(1)), ball(2), seed=10)
lifted = coinduce_chain_step(swap_bits(), x2)
print("  acts as the pointwise swap:", lifted.values == tuple(1 - v for v in x2.values))
rep = check_equivariance(coinduced_map(swap_bits()), r=3, trials=200, seed=11)
print(f"  equivariance over {rep.trials} random shifts: {rep.verdict}")

print("\nplans serialize for the CLI:")
print(json.dumps(plan1.to_json(), indent=2)[:400], "...")
