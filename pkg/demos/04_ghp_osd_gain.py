"""MBP4 with and without OSD4-0 on a file-loaded LDPC code.

Expects a check-matrix file, e.g. the [[882,48]] generalized hypergraph
product code (tests/ghp.py can write one). Both arms decode the same
sampled errors, so the comparison is paired.
Run: python3 demos/04_ghp_osd_gain.py CODE_FILE [EPS] [TRIALS]
"""

import sys

from qec_bposd.bp4 import BpConfig
from qec_bposd.codes import load_code_file
from qec_bposd.simulator import DecoderConfig, StopRule, point_key, run_point

path = sys.argv[1]
eps = float(sys.argv[2]) if len(sys.argv) > 2 else 0.07
trials = int(sys.argv[3]) if len(sys.argv) > 3 else 1000

code = load_code_file(path)
print(f"{code.name}: n={code.n} k={code.k} checks={code.m}")

bp = BpConfig(max_iterations=100, alpha_mode="fixed", alpha=1.6)
key = point_key(0, code.name, eps)
for label, cfg in [
    ("MBP4(1.6)", DecoderConfig(bp, osd_order=None)),
    ("MBP4(1.6)+OSD4-0", DecoderConfig(bp, osd_order=0)),
    ("MBP4(1.6)+mOSD4-0", DecoderConfig(bp, osd_order=0, osd_mode="mosd4")),
    ("BP4+OSD4-0", DecoderConfig(BpConfig(max_iterations=100), osd_order=0)),
]:
    s = run_point(code, cfg, eps, StopRule(10**9, trials), key=key)
    print(f"{label:20s} ler={s.ler:.4f} +- {s.ler_stderr:.4f}  BP converged {s.bp_convergence_rate:.3f}  "
          f"mean iterations {s.mean_iters:.1f}")
