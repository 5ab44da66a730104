"""Stabilizer code families used for decoding experiments.

Layout conventions (frozen; golden tests pin the emitted matrices):

* Toric / XZZX, d x d torus. Qubits live on edges. Horizontal edge
  ``h(i, j)`` (vertex (i, j) -> (i, j+1)) has index ``i*d + j``; vertical
  edge ``v(i, j)`` (vertex (i, j) -> the vertex below) has index
  ``d*d + i*d + j``. Rows are the d^2 vertex (X-type) checks in row-major
  order followed by the d^2 plaquette (Z-type) checks. ``twist=s`` shifts
  the vertical wrap-around: the vertex below (d-1, j) is (0, (j+s) % d).
* XZZX: the toric code with a Hadamard on every vertical edge, so each
  check carries two X and two Z letters.
* Planar surface: qubits at (r, c), 0 <= r, c <= 2d-2 with r+c even,
  indexed in row-major order; X checks at (even r, odd c), Z checks at
  (odd r, even c), each acting on its in-bounds nearest neighbours.
* (6,6,6) colour code: triangular patch on the hexagonal lattice, points
  (x, y) with 0 <= y <= 3(d-1)/2 and x = y, y+2, ..., 2L-y; every third
  point along a row is a face centre, the rest are qubits. Each face has
  an X check followed (in the second block) by a Z check on the same
  support.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .pauli import (
    CheckMatrixFormatError,
    gf2_nullspace,
    gf2_rank,
    read_check_matrix,
    symplectic_product,
    symplectic_swap,
    write_check_matrix,
)


class CodeValidationError(ValueError):
    """Raised when a check matrix violates the stabilizer-code invariants."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("; ".join(problems))


CodeParseError = CheckMatrixFormatError


@dataclass(frozen=True, eq=False)
class StabilizerCode:
    """An [[n, k]] stabilizer code given by its (m, 2n) check matrix."""

    name: str
    n: int
    k: int
    check: np.ndarray = field(repr=False)
    d: int | None = None
    logicals: np.ndarray | None = field(default=None, repr=False)
    family: str = "file"

    @property
    def m(self) -> int:
        return self.check.shape[0]

    @functools.cached_property
    def check_lambda(self) -> np.ndarray:
        """``check @ Lambda`` as a contiguous uint8 array."""
        return np.ascontiguousarray(symplectic_swap(self.check), dtype=np.uint8)

    def logical_failure(self, residual: np.ndarray) -> bool:
        """True iff a syndrome-free residual is a nontrivial logical operator."""
        if self.logicals is None or self.logicals.size == 0:
            return False
        return bool(symplectic_product(self.logicals, residual).any())


def validate_code(code: StabilizerCode) -> list[str]:
    """Return a list of violated invariants (empty when the code is valid)."""
    problems = []
    check = code.check
    if check.ndim != 2 or check.shape[1] != 2 * code.n:
        return [f"check matrix shape {check.shape} incompatible with n={code.n}"]
    comm = symplectic_product(check, check)
    bad = np.argwhere(np.triu(comm, 1))
    if bad.size:
        pairs = ", ".join(f"({i + 1},{j + 1})" for i, j in bad[:10])
        more = f" and {len(bad) - 10} more" if len(bad) > 10 else ""
        problems.append(f"commutation violated for row pairs {pairs}{more}")
    rank = gf2_rank(check)
    if rank != code.n - code.k:
        problems.append(f"rank {rank} != n-k = {code.n - code.k}")
    if code.logicals is not None and not problems:
        L = code.logicals
        if L.shape != (2 * code.k, 2 * code.n):
            problems.append(f"logicals shape {L.shape} != {(2 * code.k, 2 * code.n)}")
        else:
            if symplectic_product(L, check).any():
                problems.append("a logical operator anticommutes with a check")
            if gf2_rank(np.vstack([check, L])) != rank + 2 * code.k:
                problems.append("logicals are not independent modulo the stabilizers")
    return problems


def _finish(name: str, n: int, k: int, check: np.ndarray, d: int | None, family: str):
    check = np.ascontiguousarray(check, dtype=np.uint8)
    code = StabilizerCode(name, n, k, check, d, None, family)
    problems = validate_code(code)
    if problems:
        raise CodeValidationError(problems)
    return StabilizerCode(name, n, k, check, d, logical_operators(check), family)


def logical_operators(check: np.ndarray) -> np.ndarray:
    """Representatives of the normalizer modulo the stabilizer group (2k rows)."""
    check = np.asarray(check, dtype=np.uint8)
    normalizer = gf2_nullspace(symplectic_swap(check))
    basis = check.copy()
    rank = gf2_rank(basis)
    picked = []
    for v in normalizer:
        trial = np.vstack([basis, v])
        r = gf2_rank(trial)
        if r > rank:
            basis, rank = trial, r
            picked.append(v)
    if not picked:
        return np.zeros((0, check.shape[1]), dtype=np.uint8)
    return np.array(picked, dtype=np.uint8)


def _torus_edges(d: int, twist: int):
    def h(i, j):
        return (i % d) * d + (j % d)

    def v(i, j):
        return d * d + (i % d) * d + (j % d)

    def below(i, j):
        return (i + 1, j) if i < d - 1 else (0, (j + twist) % d)

    def above(i, j):
        # vertex whose downward edge ends at (i, j)
        return (i - 1, j) if i > 0 else (d - 1, (j - twist) % d)

    vertices = []
    plaquettes = []
    for i in range(d):
        for j in range(d):
            vertices.append([h(i, j), h(i, j - 1), v(i, j), v(*above(i, j))])
            bi, bj = below(i, j)
            plaquettes.append([h(i, j), v(i, j), v(i, j + 1), h(bi, bj)])
    return vertices, plaquettes


def toric_code(d: int) -> StabilizerCode:
    """[[2d^2, 2]] Kitaev toric code on a d x d torus."""
    if d < 2:
        raise ValueError(f"toric code requires d >= 2, got {d}")
    n = 2 * d * d
    vertices, plaquettes = _torus_edges(d, 0)
    check = np.zeros((2 * d * d, 2 * n), dtype=np.uint8)
    for r, qs in enumerate(vertices):
        check[r, qs] = 1
    for r, qs in enumerate(plaquettes):
        check[d * d + r, [n + q for q in qs]] = 1
    return _finish(f"toric_d{d}", n, 2, check, d, "toric")


def xzzx_code(d: int, twist: int = 0) -> StabilizerCode:
    """XZZX code: toric code with Hadamards on the vertical edges.

    ``twist`` shifts the vertical periodic identification by that many
    columns; ``twist=0`` is the plain torus.
    """
    if d < 2:
        raise ValueError(f"XZZX code requires d >= 2, got {d}")
    if not isinstance(twist, (int, np.integer)) or not 0 <= twist < d:
        raise ValueError(f"twist must be an integer in [0, {d}), got {twist!r}")
    n = 2 * d * d
    vertices, plaquettes = _torus_edges(d, int(twist))
    check = np.zeros((2 * d * d, 2 * n), dtype=np.uint8)
    for r, qs in enumerate(vertices):
        check[r, qs] = 1
    for r, qs in enumerate(plaquettes):
        check[d * d + r, [n + q for q in qs]] = 1
    vertical = np.arange(d * d, n)
    hadamard_swap(check, vertical)
    name = f"xzzx_d{d}" if twist == 0 else f"xzzx_d{d}_t{twist}"
    return _finish(name, n, 2, check, d, "xzzx")


def hadamard_swap(check: np.ndarray, qubits: np.ndarray) -> None:
    """Conjugate the given qubits by H in place (swap their X and Z bits)."""
    n = check.shape[1] // 2
    qubits = np.asarray(qubits)
    tmp = check[:, qubits].copy()
    check[:, qubits] = check[:, n + qubits]
    check[:, n + qubits] = tmp


def surface_code(d: int) -> StabilizerCode:
    """Planar surface code [[d^2 + (d-1)^2, 1, d]]."""
    if d < 2:
        raise ValueError(f"surface code requires d >= 2, got {d}")
    size = 2 * d - 1
    index = {}
    for r in range(size):
        for c in range(size):
            if (r + c) % 2 == 0:
                index[r, c] = len(index)
    n = len(index)
    xrows, zrows = [], []
    for r in range(size):
        for c in range(size):
            if (r + c) % 2 == 0:
                continue
            qs = [
                index[p]
                for p in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1))
                if p in index
            ]
            (xrows if r % 2 == 0 else zrows).append(qs)
    check = np.zeros((len(xrows) + len(zrows), 2 * n), dtype=np.uint8)
    for r, qs in enumerate(xrows):
        check[r, qs] = 1
    for r, qs in enumerate(zrows):
        check[len(xrows) + r, [n + q for q in qs]] = 1
    return _finish(f"surface_d{d}", n, 1, check, d, "surface")


def color_code_666(d: int) -> StabilizerCode:
    """Triangular (6,6,6) colour code [[(3d^2+1)/4, 1, d]] for odd d >= 3."""
    if d < 3 or d % 2 == 0:
        raise ValueError(f"(6,6,6) colour code requires odd d >= 3, got {d}")
    L = 3 * (d - 1) // 2
    qubits = {}
    faces = []
    for y in range(L + 1):
        face_pos = (2, 0, 1)[y % 3]
        for x in range(y, 2 * L - y + 1, 2):
            if ((x - y) // 2) % 3 == face_pos:
                faces.append((x, y))
            else:
                qubits[x, y] = len(qubits)
    n = len(qubits)
    supports = []
    for x, y in faces:
        nbrs = [(x + 2, y), (x - 2, y), (x + 1, y + 1), (x - 1, y + 1), (x + 1, y - 1), (x - 1, y - 1)]
        supports.append(sorted(qubits[p] for p in nbrs if p in qubits))
    f = len(supports)
    check = np.zeros((2 * f, 2 * n), dtype=np.uint8)
    for r, qs in enumerate(supports):
        check[r, qs] = 1
        check[f + r, [n + q for q in qs]] = 1
    return _finish(f"color666_d{d}", n, 1, check, d, "color666")


def five_qubit_code() -> StabilizerCode:
    """The [[5,1,3]] cyclic code with generators XZZXI and its shifts."""
    from .pauli import tau_map

    rows = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]
    check = np.array([tau_map(r) for r in rows], dtype=np.uint8)
    return _finish("five_qubit", 5, 1, check, 3, "five_qubit")


FAMILIES = {
    "toric": toric_code,
    "surface": surface_code,
    "color666": color_code_666,
    "xzzx": xzzx_code,
}


def make_code(family: str, d: int) -> StabilizerCode:
    try:
        builder = FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown code family {family!r}; choose from {sorted(FAMILIES)}") from None
    return builder(d)


def load_code_file(path: str | Path, name: str | None = None) -> StabilizerCode:
    """Load and validate a code in the check-matrix text format.

    Raises :class:`CodeParseError` for malformed files and
    :class:`CodeValidationError` for non-commuting rows or wrong rank.
    """
    path = Path(path)
    n, k, check = read_check_matrix(path)
    return _finish(name or path.stem, n, k, check, None, "file")


def save_code_file(code: StabilizerCode, path: str | Path) -> None:
    comments = [f"{code.name} [[{code.n},{code.k}]]"]
    write_check_matrix(path, code.n, code.k, code.check, comments)
