"""Binary symplectic representation of Pauli operators and GF(2) helpers.

An n-qubit Pauli operator (up to phase) is stored as a ``uint8`` vector of
length 2n: the first n entries flag X components, the last n flag Z
components, so ``Y`` on qubit ``i`` sets both ``e[i]`` and ``e[n + i]``.
A check matrix is an ``(m, 2n)`` ``uint8`` array whose rows are stabilizer
generators in the same layout.

Rank and elimination work on rows packed into 64-bit words.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from pathlib import Path

import numba
import numpy as np

LETTERS = "IXYZ"

# letter code -> (x bit, z bit); codes follow LETTERS order
_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


def tau_map(letters: Iterable[str] | str) -> np.ndarray:
    """Map a Pauli string such as ``"XIZY"`` to its length-2n binary vector."""
    letters = list(letters)
    if not letters:
        raise ValueError("empty Pauli string")
    n = len(letters)
    out = np.zeros(2 * n, dtype=np.uint8)
    for i, s in enumerate(letters):
        try:
            x, z = _LETTER_BITS[s.upper()]
        except KeyError:
            raise ValueError(f"invalid Pauli letter {s!r}") from None
        out[i] = x
        out[n + i] = z
    return out


def tau_unmap(e: np.ndarray) -> str:
    """Inverse of :func:`tau_map`."""
    e = np.asarray(e)
    if e.ndim != 1 or e.size % 2:
        raise ValueError("Pauli vector must be 1-D with even length")
    return "".join(LETTERS[c] for c in letter_codes(e))


def letter_codes(e: np.ndarray) -> np.ndarray:
    """Per-qubit letter codes 0..3 for I, X, Y, Z."""
    e = np.asarray(e, dtype=np.uint8)
    n = e.size // 2
    x, z = e[:n], e[n:]
    # I=0, X=1, Y=2, Z=3
    return np.where(x & z, 2, np.where(x, 1, np.where(z, 3, 0))).astype(np.uint8)


def from_letter_codes(codes: np.ndarray) -> np.ndarray:
    codes = np.asarray(codes)
    x = (codes == 1) | (codes == 2)
    z = (codes == 2) | (codes == 3)
    return np.concatenate([x, z]).astype(np.uint8)


def symplectic_swap(mat: np.ndarray) -> np.ndarray:
    """Return ``mat @ Lambda``, i.e. swap the X and Z halves of each row."""
    mat = np.asarray(mat)
    n = mat.shape[-1] // 2
    return np.concatenate([mat[..., n:], mat[..., :n]], axis=-1)


def symplectic_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise symplectic products ``a Lambda b^T`` over GF(2).

    Either argument may be a single vector or a stack of row vectors.
    """
    a = np.atleast_2d(np.asarray(a, dtype=np.int64))
    b = np.atleast_2d(np.asarray(b, dtype=np.int64))
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    n = a.shape[1] // 2
    return ((a[:, :n] @ b[:, n:].T + a[:, n:] @ b[:, :n].T) % 2).astype(np.uint8)


def syndrome_of(check: np.ndarray, e: np.ndarray) -> np.ndarray:
    """Syndrome ``z = e (check Lambda)^T``; bit i is 1 iff ``e`` anticommutes with row i."""
    check = np.asarray(check)
    e = np.asarray(e)
    if e.ndim != 1 or e.size != check.shape[1]:
        raise ValueError(
            f"error length {e.size} does not match check matrix width {check.shape[1]}"
        )
    return symplectic_product(check, e)[:, 0]


def pauli_weight(e: np.ndarray) -> int:
    """Number of qubits on which ``e`` acts non-trivially (Y counts once)."""
    e = np.asarray(e)
    n = e.size // 2
    return int(np.count_nonzero(e[:n] | e[n:]))


# ---------------------------------------------------------------------------
# packed GF(2) elimination


@numba.njit(cache=True)
def pack_rows(mat):
    """Pack a 0/1 matrix into rows of uint64 words; column c -> word c>>6, bit c&63."""
    m, ncols = mat.shape
    nw = (ncols + 63) >> 6
    out = np.zeros((m, max(nw, 1)), np.uint64)
    for i in range(m):
        for c in range(ncols):
            if mat[i, c]:
                out[i, c >> 6] |= np.uint64(1) << np.uint64(c & 63)
    return out


@numba.njit(cache=True)
def unpack_rows(words, ncols):
    m = words.shape[0]
    out = np.zeros((m, ncols), np.uint8)
    for i in range(m):
        for c in range(ncols):
            if (words[i, c >> 6] >> np.uint64(c & 63)) & np.uint64(1):
                out[i, c] = 1
    return out


@numba.njit(cache=True)
def rref_packed(words, ncols, rhs):
    """Reduce packed rows to reduced row echelon form in place.

    Columns are scanned left to right. Row operations are mirrored on
    ``rhs``. Returns the pivot columns; rows ``0..rank-1`` hold the pivot
    rows in that order and the remaining rows are zero.
    """
    m, nw = words.shape
    pivots = np.empty(min(m, ncols), np.int64)
    r = 0
    for c in range(ncols):
        if r == m:
            break
        w = c >> 6
        bit = np.uint64(1) << np.uint64(c & 63)
        p = -1
        for i in range(r, m):
            if words[i, w] & bit:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for k in range(nw):
                t = words[p, k]
                words[p, k] = words[r, k]
                words[r, k] = t
            t8 = rhs[p]
            rhs[p] = rhs[r]
            rhs[r] = t8
        # row r is zero left of column c, so XOR can start at word w
        for i in range(m):
            if i != r and (words[i, w] & bit):
                for k in range(w, nw):
                    words[i, k] ^= words[r, k]
                rhs[i] ^= rhs[r]
        pivots[r] = c
        r += 1
    return pivots[:r]


def gf2_rank(mat: np.ndarray) -> int:
    """Row rank of a binary matrix over GF(2)."""
    mat = np.atleast_2d(np.asarray(mat, dtype=np.uint8))
    if mat.size == 0:
        return 0
    words = pack_rows(mat)
    return len(rref_packed(words, mat.shape[1], np.zeros(mat.shape[0], np.uint8)))


def gf2_nullspace(mat: np.ndarray) -> np.ndarray:
    """Basis (as rows) of ``{v : mat v^T = 0}`` over GF(2)."""
    mat = np.atleast_2d(np.asarray(mat, dtype=np.uint8))
    m, ncols = mat.shape
    words = pack_rows(mat)
    pivots = rref_packed(words, ncols, np.zeros(m, np.uint8))
    red = unpack_rows(words[: len(pivots)], ncols)
    free = np.setdiff1d(np.arange(ncols), pivots)
    basis = np.zeros((free.size, ncols), dtype=np.uint8)
    for row, f in enumerate(free):
        basis[row, f] = 1
        basis[row, pivots] = red[:, f]
    return basis


def in_rowspace(check: np.ndarray, v: np.ndarray) -> bool:
    """True iff ``v`` is a GF(2) combination of the rows of ``check``."""
    check = np.asarray(check, dtype=np.uint8)
    v = np.asarray(v, dtype=np.uint8)
    if v.ndim != 1 or v.size != check.shape[1]:
        raise ValueError(
            f"vector length {v.size} does not match check matrix width {check.shape[1]}"
        )
    if not v.any():
        return True
    return gf2_rank(np.vstack([check, v])) == gf2_rank(check)


# ---------------------------------------------------------------------------
# check-matrix text format


class CheckMatrixFormatError(ValueError):
    """Raised when a check-matrix file cannot be parsed."""


def read_check_matrix(path: str | Path) -> tuple[int, int, np.ndarray]:
    """Parse the ``n k m`` header plus m rows of 2n bits; ``#`` lines are comments.

    Returns ``(n, k, check)``.
    """
    lines = []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if line and not line.startswith("#"):
                lines.append(line)
    if not lines:
        raise CheckMatrixFormatError(f"{path}: no header line")
    try:
        n, k, m = (int(tok) for tok in lines[0].split())
    except ValueError:
        raise CheckMatrixFormatError(
            f"{path}: header must be three integers 'n k m', got {lines[0]!r}"
        ) from None
    if n < 1 or m < 0 or not 0 <= k <= n:
        raise CheckMatrixFormatError(f"{path}: invalid header values n={n} k={k} m={m}")
    body = lines[1:]
    if len(body) != m:
        raise CheckMatrixFormatError(f"{path}: header declares {m} rows, found {len(body)}")
    check = np.zeros((m, 2 * n), dtype=np.uint8)
    for i, line in enumerate(body):
        toks = line.split()
        if len(toks) != 2 * n:
            raise CheckMatrixFormatError(
                f"{path}: row {i + 1} has {len(toks)} entries, expected {2 * n}"
            )
        if any(t not in ("0", "1") for t in toks):
            raise CheckMatrixFormatError(f"{path}: row {i + 1} contains non-binary entries")
        check[i] = np.fromiter((t == "1" for t in toks), dtype=np.uint8, count=2 * n)
    return n, k, check


def format_check_matrix(n: int, k: int, check: np.ndarray, comments: Sequence[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(f"{n} {k} {check.shape[0]}")
    for row in np.asarray(check, dtype=np.uint8):
        lines.append(" ".join("1" if b else "0" for b in row))
    return "\n".join(lines) + "\n"


def write_check_matrix(
    path: str | Path, n: int, k: int, check: np.ndarray, comments: Sequence[str] = ()
) -> None:
    Path(path).write_text(format_check_matrix(n, k, check, comments))
