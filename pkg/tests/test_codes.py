from pathlib import Path

import numpy as np
import pytest

from oracles import commutes, distance_oracle, rank_oracle
from qec_bposd.codes import (
    FAMILIES,
    CodeParseError,
    CodeValidationError,
    StabilizerCode,
    color_code_666,
    five_qubit_code,
    hadamard_swap,
    load_code_file,
    make_code,
    save_code_file,
    surface_code,
    toric_code,
    validate_code,
    xzzx_code,
)
from qec_bposd.pauli import gf2_rank, read_check_matrix, symplectic_product

GOLDEN = Path(__file__).parent / "golden"


def _distances(family):
    return range(3, 10, 2) if family == "color666" else range(2, 10)


@pytest.mark.parametrize("family", sorted(FAMILIES))
def test_families_valid(family):
    for d in _distances(family):
        code = make_code(family, d)
        assert validate_code(code) == []
        assert not symplectic_product(code.check, code.check).any()
        assert gf2_rank(code.check) == code.n - code.k


def test_parameters():
    for d in range(2, 10):
        assert toric_code(d).n == 2 * d * d
        assert surface_code(d).n == d * d + (d - 1) ** 2
        assert xzzx_code(d).n == 2 * d * d
    for d in (3, 5, 7, 9):
        assert color_code_666(d).n == (3 * d * d + 1) // 4
    t3 = toric_code(3)
    assert (t3.n, t3.k, t3.m, gf2_rank(t3.check)) == (18, 2, 18, 16)
    assert (toric_code(2).n, toric_code(2).k) == (8, 2)
    assert (surface_code(3).n, surface_code(3).k, gf2_rank(surface_code(3).check)) == (13, 1, 12)
    assert (surface_code(2).n, surface_code(2).k) == (5, 1)
    assert (color_code_666(5).n, color_code_666(5).k) == (19, 1)


def test_toric_check_weights():
    code = toric_code(4)
    n = code.n
    weights = code.check.sum(axis=1)
    assert np.all(weights == 4)
    assert not code.check[:16, n:].any() and not code.check[16:, :n].any()
    # exactly two dependencies, one per type
    assert gf2_rank(code.check[:16]) == 15 and gf2_rank(code.check[16:]) == 15


def test_surface_check_weights():
    w = surface_code(5).check.sum(axis=1)
    assert set(w.tolist()) == {3, 4}


def test_steane_is_hamming():
    code = color_code_666(3)
    n = code.n
    x_rows, z_rows = code.check[:3, :n], code.check[3:, n:]
    assert np.array_equal(x_rows, z_rows)
    assert not code.check[:3, n:].any()
    # Hamming(7,4): three weight-4 rows of rank 3, every nonzero column distinct
    assert x_rows.sum(axis=1).tolist() == [4, 4, 4]
    cols = {tuple(c) for c in x_rows.T}
    assert len(cols) == 7 and (0, 0, 0) not in cols


@pytest.mark.parametrize("d", [3, 5, 7])
def test_color_faces_identical(d):
    code = color_code_666(d)
    f = code.m // 2
    assert np.array_equal(code.check[:f, : code.n], code.check[f:, code.n :])
    assert set(code.check.sum(axis=1).tolist()) <= {4, 6}


def test_xzzx_rows_mixed():
    code = xzzx_code(3)
    n = code.n
    for row in code.check:
        x_only = row[:n] & ~row[n:]
        z_only = row[n:] & ~row[:n]
        assert x_only.sum() == 2 and z_only.sum() == 2


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_xzzx_hadamard_equivalent_to_toric(d):
    x = xzzx_code(d).check.copy()
    hadamard_swap(x, np.arange(d * d, 2 * d * d))
    t = toric_code(d).check
    r = gf2_rank(t)
    assert gf2_rank(x) == r and gf2_rank(np.vstack([x, t])) == r


def test_xzzx_twist():
    for s in range(3):
        assert validate_code(xzzx_code(3, twist=s)) == []
    for bad in (-1, 3, 1.5):
        with pytest.raises(ValueError):
            xzzx_code(3, twist=bad)


@pytest.mark.parametrize(
    "builder, bad",
    [(toric_code, 1), (surface_code, 1), (xzzx_code, 0), (color_code_666, 4), (color_code_666, 1)],
)
def test_invalid_distance(builder, bad):
    with pytest.raises(ValueError):
        builder(bad)


@pytest.mark.parametrize(
    "code",
    [toric_code(2), toric_code(3), surface_code(2), surface_code(3), color_code_666(3), xzzx_code(3)],
    ids=lambda c: c.name,
)
def test_distance_oracle(code):
    assert distance_oracle(code.check, code.d) == code.d


def test_five_qubit_distance():
    assert distance_oracle(five_qubit_code().check, 3) == 3


@pytest.mark.parametrize("code", [toric_code(3), surface_code(4), color_code_666(5), five_qubit_code()],
                         ids=lambda c: c.name)
def test_logicals(code):
    L = code.logicals
    assert L.shape == (2 * code.k, 2 * code.n)
    assert not symplectic_product(L, code.check).any()
    r = rank_oracle(code.check)
    assert rank_oracle(np.vstack([code.check, L])) == r + 2 * code.k
    for row in L:
        assert rank_oracle(np.vstack([code.check, row])) == r + 1
        assert any(not commutes(row, other) for other in L)


def test_logical_failure_ignores_stabilizers():
    code = toric_code(3)
    rng = np.random.default_rng(0)
    for _ in range(20):
        s = (rng.integers(0, 2, code.m) @ code.check % 2).astype(np.uint8)
        assert not code.logical_failure(s)
        assert code.logical_failure(s ^ code.logicals[0])


def test_validate_examples():
    assert validate_code(toric_code(3)) == []
    xz = StabilizerCode("xz", 1, 0, np.array([[1, 0], [0, 1]], np.uint8))
    problems = validate_code(xz)
    assert any("(1,2)" in p and "commutation" in p for p in problems)
    wrong_k = StabilizerCode("t", 18, 1, toric_code(3).check)
    assert validate_code(wrong_k) == ["rank 16 != n-k = 17"]
    both = StabilizerCode("xz", 1, 1, np.array([[1, 0], [0, 1]], np.uint8))
    assert len(validate_code(both)) == 2


@pytest.mark.parametrize("name", sorted(p.stem for p in GOLDEN.glob("*.chk")))
def test_golden_layouts(name):
    family, rest = name.rsplit("_d", 1)
    d, _, twist = rest.partition("_t")
    code = xzzx_code(int(d), int(twist)) if twist else make_code(family, int(d))
    _, _, check = read_check_matrix(GOLDEN / f"{name}.chk")
    assert np.array_equal(code.check, check)


def test_load_and_save(tmp_path):
    code = color_code_666(5)
    path = tmp_path / "c5.chk"
    save_code_file(code, path)
    loaded = load_code_file(path)
    assert (loaded.n, loaded.k, loaded.name) == (19, 1, "c5")
    assert np.array_equal(loaded.check, code.check)
    assert loaded.logicals.shape == (2, 38)


def test_load_errors(tmp_path):
    empty = tmp_path / "empty.chk"
    empty.write_text("")
    with pytest.raises(CodeParseError):
        load_code_file(empty)
    anti = tmp_path / "anti.chk"
    anti.write_text("1 0 2\n1 0\n0 1\n")
    with pytest.raises(CodeValidationError) as info:
        load_code_file(anti)
    assert "(1,2)" in str(info.value)
    assert not issubclass(CodeValidationError, CodeParseError)
    assert not issubclass(CodeParseError, CodeValidationError)
