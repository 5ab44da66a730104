"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one PASS/FAIL line (also repeated in the pytest terminal
summary). The Monte Carlo criteria take several minutes on one core; the
worker count follows ``os.cpu_count()``. Set ``QEC_GHP_FILE`` to use a
specific [[882,48]] check-matrix file, otherwise one is generated.
"""

from __future__ import annotations

import math
import os
import time

import numpy as np
import pytest

from acceptance_log import report
from oracles import distance_oracle, ell_oracle, min_weight_table
from qec_bposd.bp4 import BpConfig, decode, update_reliability_vec
from qec_bposd.cli import main as cli_main
from qec_bposd.codes import (
    FAMILIES,
    five_qubit_code,
    load_code_file,
    make_code,
    surface_code,
)
from qec_bposd.osd4 import GaussResult, apply_flips, osd_solve_base, osd_w
from qec_bposd.pauli import from_letter_codes, gf2_rank, symplectic_product, syndrome_of
from qec_bposd.simulator import (
    DecoderConfig,
    StopRule,
    estimate_threshold,
    point_key,
    run_point,
    sample_letters,
    sweep,
    trial_rng,
)

WORKERS = os.cpu_count() or 1
TOPO = DecoderConfig(BpConfig(max_iterations=60, schedule="serial"), osd_order=2, osd_mode="osd4")
FIXED_TRIALS = StopRule(min_logical_errors=10**9, max_trials=10_000)
GRID_TORIC = [round(0.14 + 0.01 * i, 2) for i in range(7)]
GRID_COLOR = [round(0.11 + 0.01 * i, 2) for i in range(8)]
GHP_EPSILON = 0.07


def _fmt_pairs(est):
    return ", ".join(f"({a},{b})={'none' if v is None else f'{v:.4f}'}" for (a, b), v in est.pair_crossings.items())


def _table(rows):
    return "; ".join(f"{r.code}@{r.epsilon:g}={r.ler:.4f}" for r in rows)


def test_criterion_01_code_validity():
    t0 = time.perf_counter()
    bad = []
    checked = 0
    for family in sorted(FAMILIES):
        ds = range(3, 10, 2) if family == "color666" else range(2, 10)
        for d in ds:
            code = make_code(family, d)
            checked += 1
            if symplectic_product(code.check, code.check).any() or gf2_rank(code.check) != code.n - code.k:
                bad.append(code.name)
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 10
    report(1, "code validity, all families d<=9", ok, f"{checked} codes, {len(bad)} invalid, {elapsed:.2f}s (<10s)")
    assert ok


def test_criterion_02_distance_oracle():
    t0 = time.perf_counter()
    cases = [("toric", 2), ("toric", 3), ("surface", 2), ("surface", 3), ("color666", 3)]
    found = {f"{f}{d}": distance_oracle(make_code(f, d).check, d) for f, d in cases}
    elapsed = time.perf_counter() - t0
    ok = all(found[f"{f}{d}"] == d for f, d in cases) and elapsed < 60
    report(2, "brute-force distance", ok, f"{found}, {elapsed:.1f}s (<60s)")
    assert ok


def test_criterion_03_exhaustive_osd_oracle():
    t0 = time.perf_counter()
    details = []
    all_ok = True
    for code in (five_qubit_code(), surface_code(3)):
        table = min_weight_table(code.check)
        rng = np.random.default_rng(2024)
        matches = 0
        for _ in range(100):
            z = rng.integers(0, 2, code.m, dtype=np.uint8)
            out = decode(code, z, BpConfig(max_iterations=60, prior_epsilon=0.1))
            sol = osd_w(code.check, z, out.estimate, out.beliefs, out.ell, w=code.n + code.k)
            valid = np.array_equal(syndrome_of(code.check, sol.estimate), z)
            matches += valid and sol.weight == table[tuple(z.tolist())]
        details.append(f"{code.name} {matches}/100")
        all_ok &= matches == 100
    elapsed = time.perf_counter() - t0
    ok = all_ok and elapsed < 300
    report(3, "OSD w=n+k equals brute-force min weight", ok, f"{', '.join(details)}, {elapsed:.1f}s (<300s)")
    assert ok


def test_criterion_04_validity_and_monotonicity():
    code = surface_code(5)
    eps = 0.12
    bp = BpConfig(max_iterations=60, prior_epsilon=eps)
    key = point_key(4, code.name, eps)
    instances = violations = worse = 0
    trial = 0
    while instances < 10_000:
        letters = sample_letters(code.n, eps, trial_rng(key, trial))
        trial += 1
        z = syndrome_of(code.check, from_letter_codes(letters))
        out = decode(code, z, bp)
        if out.converged:
            continue
        instances += 1
        w0 = osd_w(code.check, z, out.estimate, out.beliefs, out.ell, w=0, check_lambda=code.check_lambda)
        w2 = osd_w(code.check, z, out.estimate, out.beliefs, out.ell, w=2, check_lambda=code.check_lambda)
        for sol in (w0, w2):
            violations += not np.array_equal(syndrome_of(code.check, sol.estimate), z)
        worse += w2.weight > w0.weight
    ok = violations == 0 and worse == 0
    report(4, "OSD validity and w-monotonicity (surface d=5, eps=0.12)", ok,
           f"{instances} BP-exhausted instances from {trial} trials, {violations} invalid outputs, "
           f"{worse} with weight(w=2) > weight(w=0)")
    assert ok


def test_criterion_05_incremental_oracles():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    flip_ok = 0
    for _ in range(1000):
        r, K = rng.integers(1, 40), rng.integers(1, 60)
        g = GaussResult(A=rng.integers(0, 2, (r, K), dtype=np.uint8),
                        z_prime=rng.integers(0, 2, r, dtype=np.uint8), mu=np.arange(r + K), pivot_count=r)
        e_r = rng.integers(0, 2, K, dtype=np.uint8)
        flips = rng.choice(K, size=min(K, rng.integers(1, 3)), replace=False)
        full = e_r.copy()
        full[flips] ^= 1
        flip_ok += np.array_equal(apply_flips(g, osd_solve_base(g, e_r), flips), osd_solve_base(g, full))
    ell_ok = 0
    for _ in range(1000):
        n, T = rng.integers(1, 30), rng.integers(1, 60)
        hist = np.zeros((T + 1, n), dtype=np.uint8)
        for t in range(1, T + 1):
            hist[t] = np.where(rng.random(n) < rng.uniform(0, 0.5), rng.integers(0, 4, n), hist[t - 1])
        ell = np.ones(n, dtype=np.int64)
        for t in range(1, T + 1):
            ell = update_reliability_vec(from_letter_codes(hist[t - 1]), from_letter_codes(hist[t]), ell)
        ell_ok += np.array_equal(ell, ell_oracle(hist))
    elapsed = time.perf_counter() - t0
    ok = flip_ok == 1000 and ell_ok == 1000 and elapsed < 10
    report(5, "incremental flip update and reliability vector", ok,
           f"flip {flip_ok}/1000, ell {ell_ok}/1000, {elapsed:.2f}s (<10s)")
    assert ok


def _threshold_grid(family, ds, grid):
    codes = [make_code(family, d) for d in ds]
    rows = sweep(codes, grid, TOPO, FIXED_TRIALS, seed=2022, workers=WORKERS)
    return rows, estimate_threshold(rows)


def test_criterion_06_toric_threshold():
    rows, est = _threshold_grid("toric", (3, 5, 7), GRID_TORIC)
    ok = est.found and all(0.155 <= v <= 0.190 for v in est.pair_crossings.values())
    report(6, "toric threshold, BP4+OSD4-2, crossings in [0.155, 0.190]", ok,
           f"pairs {_fmt_pairs(est)}; 10^4 trials/point")
    print(_table(rows))
    assert ok


def test_criterion_07_color_threshold():
    rows, est = _threshold_grid("color666", (3, 5, 7), GRID_COLOR)
    ok = est.found and all(0.125 <= v <= 0.165 for v in est.pair_crossings.values())
    report(7, "(6,6,6) colour threshold, crossings in [0.125, 0.165]", ok,
           f"pairs {_fmt_pairs(est)}; 10^4 trials/point")
    print(_table(rows))
    assert ok


def test_criterion_08_xzzx_sanity():
    codes = [make_code("xzzx", 3), make_code("xzzx", 5)]
    a, b = sweep(codes, [0.10], TOPO, FIXED_TRIALS, seed=2022, workers=WORKERS)
    margin = a.ler - b.ler
    sigma = math.hypot(a.ler_stderr, b.ler_stderr)
    ok = margin > 3 * sigma
    info_rows = sweep(codes, GRID_TORIC, TOPO, StopRule(10**9, 2000), seed=2022, workers=WORKERS)
    est = estimate_threshold(info_rows)
    report(8, "XZZX ler(d=5) < ler(d=3) at eps=0.10, 3 sigma", ok,
           f"d3 {a.ler:.4f}, d5 {b.ler:.4f}, margin {margin / sigma:.1f} sigma; "
           f"informational crossing {_fmt_pairs(est)} (2000 trials/point, not gated)")
    assert ok


@pytest.fixture(scope="module")
def ghp_code(tmp_path_factory):
    path = os.environ.get("QEC_GHP_FILE")
    if path is None:
        from ghp import write_ghp_file

        path = write_ghp_file(tmp_path_factory.mktemp("ghp") / "ghp_882_48.chk")
    return load_code_file(path)


def test_criterion_09_ghp_osd_gain(ghp_code):
    code = ghp_code
    assert (code.n, code.k) == (882, 48)
    bp = BpConfig(max_iterations=100, alpha_mode="fixed", alpha=1.6)
    stop = StopRule(min_logical_errors=100, max_trials=10**6)
    key = point_key(2022, code.name, GHP_EPSILON)
    arms = {}
    for label, cfg in [
        ("MBP4", DecoderConfig(bp, osd_order=None)),
        ("MBP4+OSD4-0", DecoderConfig(bp, osd_order=0, osd_mode="osd4")),
        ("MBP4+mOSD4-0", DecoderConfig(bp, osd_order=0, osd_mode="mosd4")),
    ]:
        arms[label] = run_point(code, cfg, GHP_EPSILON, stop, workers=WORKERS, key=key)
    mbp, osd, mosd = arms["MBP4"], arms["MBP4+OSD4-0"], arms["MBP4+mOSD4-0"]
    in_band = 0.01 <= mbp.ler <= 0.1
    sigma = math.hypot(mbp.ler_stderr, osd.ler_stderr)
    ok = in_band and mbp.logical_errors >= 100 and osd.logical_errors >= 100 and mbp.ler - osd.ler > 3 * sigma
    detail = ", ".join(f"{k} {v.logical_errors}/{v.trials}={v.ler:.4f}" for k, v in arms.items())
    report(9, f"[[882,48]] at eps={GHP_EPSILON}: OSD4-0 beats MBP4(1.6) alone at 3 sigma", ok,
           f"{detail}; gap {(mbp.ler - osd.ler) / sigma:.1f} sigma; OSD4/mOSD4 ratio "
           f"{osd.ler / mosd.ler if mosd.ler else float('nan'):.2f} (not gated)")
    assert ok


def test_criterion_10_byte_identical_csv(tmp_path, capsys):
    args = ["sweep", "--family", "surface", "--d", "3,5", "--eps", "0.08,0.10", "--events", "100",
            "--seed", "7", "--out", str(tmp_path / "run.csv")]
    outputs = []
    for workers in (1, 2, 3):
        assert cli_main(args + ["--workers", str(workers)]) == 0
        outputs.append((tmp_path / "run.csv").read_bytes())
    ok = outputs[0] == outputs[1] == outputs[2]
    report(10, "determinism across worker counts", ok,
           f"workers 1/2/3 produce {'identical' if ok else 'different'} CSV ({len(outputs[0])} bytes)")
    assert ok
