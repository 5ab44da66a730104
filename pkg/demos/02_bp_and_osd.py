"""Belief propagation, then ordered-statistics post-processing.

Finds a toric-code error on which BP4 fails to match the syndrome, then
looks at what the decoder hands over to OSD4: the hard decision, the
reliability vector ell and the soft reliabilities. OSD of order 0 and 2
both return a valid error; order 2 can only lower its weight.
Run: python3 demos/02_bp_and_osd.py
"""

import numpy as np

from qec_bposd.bp4 import BpConfig, decode, soft_reliability
from qec_bposd.codes import toric_code
from qec_bposd.osd4 import osd_w, sort_reliability
from qec_bposd.pauli import pauli_weight, syndrome_of, tau_unmap
from qec_bposd.simulator import point_key, sample_depolarizing, trial_rng

code = toric_code(5)
eps = 0.14
config = BpConfig(max_iterations=60, prior_epsilon=eps)
key = point_key(0, "demo")

# %% Sample until BP gives up
for trial in range(10_000):
    error = sample_depolarizing(code.n, eps, trial_rng(key, trial))
    z = syndrome_of(code.check, error)
    out = decode(code, z, config)
    if not out.converged:
        break
print(f"trial {trial}: true error weight {pauli_weight(error)}, BP status {out.status}")
print("error    ", tau_unmap(error))
print("BP guess ", tau_unmap(out.estimate))
print("ell      ", out.ell)

# %% What sorting sees: least reliable bits first
phi_x, phi_z = soft_reliability(out.beliefs)
pi = sort_reliability(out.ell, out.beliefs, "osd4")
print("first 8 coordinates (qubit, half):", [(int(c % code.n), "XZ"[c // code.n]) for c in pi[:8]])
print("their phi:", np.round(np.concatenate([phi_x, phi_z])[pi[:8]], 3))

# %% OSD of increasing order
for mode in ("osd4", "mosd4"):
    for w in (0, 1, 2):
        sol = osd_w(code.check, z, out.estimate, out.beliefs, out.ell, w=w, mode=mode)
        assert np.array_equal(syndrome_of(code.check, sol.estimate), z)
        print(f"{mode} w={w}: weight {sol.weight:2d}, candidates {sol.candidates_tried:5d}, "
              f"logical error {code.logical_failure(sol.estimate ^ error)}")
