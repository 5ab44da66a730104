"""Stabilizer codes as binary matrices.

Builds the four built-in families, checks their parameters, and shows how
a Pauli error turns into a syndrome and how residuals are classified.
Run: python3 demos/01_codes_and_syndromes.py
"""

import numpy as np

from qec_bposd.codes import color_code_666, make_code, surface_code, toric_code
from qec_bposd.pauli import gf2_rank, in_rowspace, pauli_weight, syndrome_of, tau_map, tau_unmap

# %% Parameters of the built-in families
for family in ("toric", "surface", "color666", "xzzx"):
    for d in (3, 5, 7):
        code = make_code(family, d)
        print(f"{code.name:14s} n={code.n:3d} k={code.k} checks={code.m:3d} rank={gf2_rank(code.check)}")

# %% A Pauli string is a length-2n bit vector [x | z]
e = tau_map("IXYZ")
print(e.reshape(2, -1), "weight", pauli_weight(e), tau_unmap(e))

# %% Syndromes flag the checks an error anticommutes with
steane = color_code_666(3)
for s in ("XIIIIII", "ZIIIIII", "YIIIIII"):
    print(s, syndrome_of(steane.check, tau_map(s)))

# %% A residual with zero syndrome is either a stabilizer or a logical
toric = toric_code(3)
stab = toric.check[0] ^ toric.check[4]
logical = toric.logicals[0]
for name, r in (("stabilizer", stab), ("logical", logical)):
    print(name, "syndrome", syndrome_of(toric.check, r).any(),
          "in rowspace", in_rowspace(toric.check, r),
          "logical failure", toric.logical_failure(r))

# %% Every code commutes with itself
code = surface_code(5)
n = code.n
comm = (code.check[:, :n].astype(int) @ code.check[:, n:].T + code.check[:, n:].astype(int) @ code.check[:, :n].T) % 2
print("surface d=5 commutation violations:", int(np.count_nonzero(comm)))
