"""Ordered-statistics post-processing for BP4 (OSD4-w and mOSD4-w).

The 2n error bits are sorted least reliable first, so Gaussian
elimination pivots on the unreliable columns and solves for them. The
remaining n+k "reliable" bits keep their BP hard decision, optionally
perturbed by every flip pattern of weight <= w. Among all candidates the
one of smallest Pauli weight wins; earlier candidates win ties.

Candidate enumeration order: flip weight ascending, then flip positions
(in the reordered reliable part) lexicographically.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numba
import numpy as np

from .bp4 import soft_reliability
from .pauli import pack_rows, pauli_weight, rref_packed, symplectic_swap, unpack_rows

MODES = ("osd4", "mosd4")


class RankDeficiencyError(ValueError):
    """The matrix handed to elimination has lower rank than required."""


class InconsistentSyndromeError(ValueError):
    """The syndrome is not in the column space of the check matrix."""


@dataclass
class GaussResult:
    """Reduced system ``[I A] e' = z'`` in mu-permuted column order.

    ``mu[t]`` is the input column placed at position ``t``; the first
    ``pivot_count`` positions are the pivots.
    """

    A: np.ndarray
    z_prime: np.ndarray
    mu: np.ndarray
    pivot_count: int


@dataclass
class OsdSolution:
    estimate: np.ndarray
    weight: int
    candidates_tried: int


def reliability_keys(ell: np.ndarray, beliefs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-bit ``(ell, phi)`` for the 2n coordinates [X half | Z half]."""
    ell = np.asarray(ell)
    phi_x, phi_z = soft_reliability(beliefs)
    return np.concatenate([ell, ell]), np.concatenate([phi_x, phi_z])


def sort_reliability(ell: np.ndarray, beliefs: np.ndarray, mode: str = "osd4") -> np.ndarray:
    """Permutation of the 2n bit coordinates, least reliable first.

    ``osd4`` orders by (ell, phi), ``mosd4`` by phi alone. Equal keys keep
    coordinate order (all X bits by qubit, then all Z bits).
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    ell = np.asarray(ell)
    beliefs = np.atleast_2d(beliefs)
    if ell.size != beliefs.shape[0]:
        raise ValueError(f"ell has {ell.size} entries but beliefs describe {beliefs.shape[0]} qubits")
    hard, soft = reliability_keys(ell, beliefs)
    coords = np.arange(hard.size)
    if mode == "osd4":
        return np.lexsort((coords, soft, hard))
    return np.lexsort((coords, soft))


def gaussian_eliminate(matrix: np.ndarray, syndrome: np.ndarray, rank: int | None = None) -> GaussResult:
    """Bring ``matrix`` to ``[I A]`` form, mirroring row operations on ``syndrome``.

    Columns are scanned left to right; a column that cannot supply a pivot
    is moved behind all pivot columns (``mu`` keeps the relative order of
    both groups). Zero rows left over are dropped along with their
    syndrome bits, which must be zero for a consistent system.
    """
    matrix = np.ascontiguousarray(matrix, dtype=np.uint8)
    m, ncols = matrix.shape
    z = np.array(syndrome, dtype=np.uint8, copy=True)
    if z.size != m:
        raise ValueError(f"syndrome length {z.size} != matrix rows {m}")
    words = pack_rows(matrix)
    pivots = rref_packed(words, ncols, z)
    r = pivots.size
    if rank is not None and r < rank:
        raise RankDeficiencyError(f"matrix rank {r} below required {rank}")
    if z[r:].any():
        raise InconsistentSyndromeError("syndrome is inconsistent with the check matrix")
    is_pivot = np.zeros(ncols, dtype=bool)
    is_pivot[pivots] = True
    free = np.flatnonzero(~is_pivot)
    mu = np.concatenate([pivots, free]).astype(np.int64)
    reduced = unpack_rows(words[:r], ncols)
    return GaussResult(A=np.ascontiguousarray(reduced[:, free]), z_prime=z[:r].copy(), mu=mu, pivot_count=r)


def osd_solve_base(gauss: GaussResult, reliable_bits: np.ndarray) -> np.ndarray:
    """``[z' + A e_R, e_R]`` in the mu-permuted coordinates."""
    reliable_bits = np.asarray(reliable_bits, dtype=np.uint8)
    if reliable_bits.size != gauss.A.shape[1]:
        raise ValueError(f"expected {gauss.A.shape[1]} reliable bits, got {reliable_bits.size}")
    unreliable = (gauss.z_prime.astype(np.int64) + gauss.A.astype(np.int64) @ reliable_bits) % 2
    return np.concatenate([unreliable.astype(np.uint8), reliable_bits])


def candidate_count(num_reliable: int, w: int) -> int:
    return sum(comb(num_reliable, t) for t in range(min(w, num_reliable) + 1))


def column_supports(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """CSR-style row lists of each column of ``A``."""
    cols, rows = np.nonzero(A.T)
    ptr = np.searchsorted(cols, np.arange(A.shape[1] + 1)).astype(np.int64)
    return ptr, rows.astype(np.int64)


def apply_flips(gauss: GaussResult, base: np.ndarray, flips) -> np.ndarray:
    """Candidate obtained from ``base`` by flipping reliable positions ``flips``.

    Uses the column-update path of the search kernel: each flip XORs one
    column of ``A`` into the unreliable part.
    """
    ptr, rows = column_supports(gauss.A)
    out = np.array(base, dtype=np.uint8, copy=True)
    _apply_flips(out, ptr, rows, gauss.pivot_count, np.asarray(flips, dtype=np.int64))
    return out


def osd_w(
    check: np.ndarray,
    syndrome: np.ndarray,
    initial_estimate: np.ndarray,
    beliefs: np.ndarray,
    ell: np.ndarray,
    w: int = 2,
    mode: str = "osd4",
    check_lambda: np.ndarray | None = None,
) -> OsdSolution:
    """Order-w OSD4 on the binary system ``e (check Lambda)^T = z``.

    Returns the minimum-Pauli-weight valid error among the base solution
    and all flips of at most ``w`` reliable bits, in original coordinates.
    ``check_lambda`` may be passed to skip recomputing ``check @ Lambda``.
    """
    if w < 0:
        raise ValueError(f"w must be >= 0, got {w}")
    check = np.asarray(check, dtype=np.uint8)
    n = check.shape[1] // 2
    if check_lambda is None:
        check_lambda = symplectic_swap(check)
    pi = sort_reliability(ell, beliefs, mode)
    gauss = gaussian_eliminate(check_lambda[:, pi], syndrome)
    order = pi[gauss.mu]  # position t -> original coordinate
    permuted = np.asarray(initial_estimate, dtype=np.uint8)[order]
    r = gauss.pivot_count
    base = osd_solve_base(gauss, permuted[r:])
    ptr, rows = column_supports(gauss.A)
    best, tried = _search(base, ptr, rows, r, order % n, order >= n, n, min(w, base.size - r))
    estimate = np.empty_like(best)
    estimate[order] = best
    return OsdSolution(estimate=estimate, weight=pauli_weight(estimate), candidates_tried=int(tried))


# ---------------------------------------------------------------------------
# kernels


@numba.njit(cache=True)
def _apply_flips(vec, ptr, rows, r, flips):
    for j in flips:
        vec[r + j] ^= 1
        for k in range(ptr[j], ptr[j + 1]):
            vec[rows[k]] ^= 1


@numba.njit(cache=True)
def _toggle(pos, qubit, is_z, xs, zs):
    """Flip one coordinate; return the change in Pauli weight."""
    q = qubit[pos]
    before = xs[q] | zs[q]
    if is_z[pos]:
        zs[q] ^= 1
    else:
        xs[q] ^= 1
    return np.int64(xs[q] | zs[q]) - np.int64(before)


@numba.njit(cache=True)
def _flip_column(j, r, ptr, rows, qubit, is_z, xs, zs):
    dw = _toggle(r + j, qubit, is_z, xs, zs)
    for k in range(ptr[j], ptr[j + 1]):
        dw += _toggle(rows[k], qubit, is_z, xs, zs)
    return dw


@numba.njit(cache=True)
def _search(base, ptr, rows, r, qubit, is_z, n, w):
    xs = np.zeros(n, np.uint8)
    zs = np.zeros(n, np.uint8)
    for pos in range(base.size):
        if base[pos]:
            if is_z[pos]:
                zs[qubit[pos]] ^= 1
            else:
                xs[qubit[pos]] ^= 1
    weight = 0
    for q in range(n):
        weight += xs[q] | zs[q]
    best_weight = weight
    best = np.empty(0, np.int64)
    tried = 1
    K = base.size - r
    idx = np.empty(max(w, 1), np.int64)
    for t in range(1, w + 1):
        # depth-first lexicographic combinations of size t; the columns of
        # idx[:depth] stay applied while deeper positions are explored
        depth = 0
        idx[0] = 0
        cur = weight
        while depth >= 0:
            j = idx[depth]
            if j > K - (t - depth):
                depth -= 1
                if depth >= 0:
                    cur += _flip_column(idx[depth], r, ptr, rows, qubit, is_z, xs, zs)
                    idx[depth] += 1
                continue
            cur += _flip_column(j, r, ptr, rows, qubit, is_z, xs, zs)
            if depth == t - 1:
                tried += 1
                if cur < best_weight:
                    best_weight = cur
                    best = idx[:t].copy()
                cur += _flip_column(j, r, ptr, rows, qubit, is_z, xs, zs)
                idx[depth] += 1
            else:
                depth += 1
                idx[depth] = j + 1
    out = base.copy()
    _apply_flips(out, ptr, rows, r, best)
    return out, tried
