"""A small toric-code threshold run with BP4+OSD4-2.

Uses a coarse grid and a few thousand trials per point so it finishes in
a couple of minutes on one core; raise TRIALS for tighter crossings.
Run: python3 demos/03_toric_threshold.py [TRIALS]
"""

import sys

from qec_bposd.bp4 import BpConfig
from qec_bposd.codes import toric_code
from qec_bposd.simulator import DecoderConfig, StopRule, estimate_threshold, sweep, to_csv

TRIALS = int(sys.argv[1]) if len(sys.argv) > 1 else 2000

codes = [toric_code(d) for d in (3, 5, 7)]
epsilons = [0.14, 0.16, 0.18, 0.20]
config = DecoderConfig(BpConfig(max_iterations=60), osd_order=2)

rows = sweep(codes, epsilons, config, StopRule(min_logical_errors=10**9, max_trials=TRIALS), seed=1)
print(to_csv(rows))

# %% Logical error rate table, one row per distance
print("eps    " + "  ".join(f"{e:6.2f}" for e in epsilons))
for code in codes:
    lers = [r.ler for r in rows if r.code == code.name]
    print(f"d={code.d:<4d} " + "  ".join(f"{x:6.4f}" for x in lers))

est = estimate_threshold(rows)
print("pairwise crossings:", {f"{a}-{b}": v for (a, b), v in est.pair_crossings.items()})
if est.found:
    print(f"threshold ~ {est.crossing:.4f} (spread {est.spread:.4f})")
else:
    print("no crossing inside the grid")
