"""Monte Carlo logical-error-rate estimation over the depolarizing channel.

Every trial draws from its own counter-based Philox stream keyed by the
point seed and offset by the trial index, so results depend only on
``(seed, code, config, epsilon)`` and never on how trials are split
across worker processes.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import zlib
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .bp4 import BpConfig, decode, syndrome_of_letters, tanner_graph
from .codes import StabilizerCode
from .osd4 import osd_w
from .pauli import from_letter_codes, pauli_weight, syndrome_of

log = logging.getLogger(__name__)

CSV_FIELDS = (
    "code", "n", "k", "d", "epsilon", "trials", "logical_errors",
    "bp_converged", "osd_invoked", "mean_iters", "ler", "ler_stderr",
)

CHUNK = 64


@dataclass(frozen=True)
class DecoderConfig:
    """BP4 settings plus optional OSD post-processing.

    ``osd_order=None`` disables OSD. With ``prior_from_channel`` the BP
    prior is set to the simulated channel rate for each point.
    """

    bp: BpConfig = field(default_factory=BpConfig)
    osd_order: int | None = 2
    osd_mode: str = "osd4"
    prior_from_channel: bool = True

    def for_epsilon(self, epsilon: float) -> "DecoderConfig":
        if self.prior_from_channel and 0.0 < epsilon < 1.0:
            return replace(self, bp=replace(self.bp, prior_epsilon=epsilon))
        return self

    @property
    def label(self) -> str:
        if self.bp.alpha_mode == "plain":
            name = "bp4"
        elif self.bp.alpha_mode == "fixed":
            name = f"mbp4(alpha={self.bp.alpha:g})"
        else:
            c1, c0 = self.bp.alpha_coeffs
            name = f"mbp4(alpha={c1:g}*log10(eps)+{c0:g})"
        if self.osd_order is not None:
            name += f"+{'mosd' if self.osd_mode == 'mosd4' else 'osd'}{self.osd_order}"
        return name


@dataclass(frozen=True)
class StopRule:
    min_logical_errors: int = 100
    max_trials: int = 1_000_000

    def __post_init__(self):
        if self.min_logical_errors < 1:
            raise ValueError("min_logical_errors must be >= 1")
        if self.max_trials < 1:
            raise ValueError("max_trials must be >= 1")


@dataclass
class TrialResult:
    bp_converged: bool
    osd_invoked: bool
    logical_failure: bool
    iterations_used: int
    estimate_weight: int
    estimate: np.ndarray | None = field(default=None, repr=False)


@dataclass
class RunStats:
    code: str
    n: int
    k: int
    d: int | None
    epsilon: float
    trials: int
    logical_errors: int
    bp_converged: int
    osd_invoked: int
    mean_iters: float

    @property
    def ler(self) -> float:
        return self.logical_errors / self.trials if self.trials else 0.0

    @property
    def ler_stderr(self) -> float:
        if not self.trials:
            return 0.0
        p = self.ler
        return math.sqrt(p * (1.0 - p) / self.trials)

    @property
    def bp_convergence_rate(self) -> float:
        return self.bp_converged / self.trials if self.trials else 0.0

    def as_row(self) -> dict:
        row = asdict(self)
        row["ler"] = self.ler
        row["ler_stderr"] = self.ler_stderr
        return {key: row[key] for key in CSV_FIELDS}


# ---------------------------------------------------------------------------
# sampling and single trials


def trial_rng(key: Sequence[int], trial: int) -> np.random.Generator:
    """Independent stream for one trial: Philox with the trial index in the top counter word."""
    return np.random.Generator(np.random.Philox(key=np.asarray(key, dtype=np.uint64), counter=[0, 0, 0, trial]))


def point_key(seed: int, *parts: str | float | int) -> np.ndarray:
    """128-bit Philox key derived from a base seed and labels."""
    entropy = [int(seed) & (2**64 - 1)]
    for p in parts:
        if isinstance(p, float):
            entropy.append(int(round(p * 1e12)))
        elif isinstance(p, str):
            entropy.append(zlib.crc32(p.encode()))
        else:
            entropy.append(int(p))
    return np.random.SeedSequence(entropy).generate_state(2, np.uint64)


def sample_letters(n: int, epsilon: float, rng: np.random.Generator) -> np.ndarray:
    """Per-qubit letter codes (0..3 for I, X, Y, Z) of a depolarizing error."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    u = rng.random(n)
    letters = np.zeros(n, dtype=np.uint8)
    hit = u < epsilon
    if epsilon > 0:
        letters[hit] = 1 + np.minimum((3.0 * u[hit] / epsilon).astype(np.int64), 2)
    return letters


def sample_depolarizing(n: int, epsilon: float, rng: np.random.Generator) -> np.ndarray:
    """Pauli vector with each qubit I w.p. 1-epsilon, else uniform over X, Y, Z."""
    return from_letter_codes(sample_letters(n, epsilon, rng))


def run_trial(
    code: StabilizerCode,
    config: DecoderConfig,
    epsilon: float,
    rng: np.random.Generator,
) -> TrialResult:
    """Sample one error, decode it and classify the residual."""
    letters = sample_letters(code.n, epsilon, rng)
    error = from_letter_codes(letters)
    syndrome = syndrome_of_letters(tanner_graph(code), letters)
    return decode_and_classify(code, config, error, syndrome)


def decode_and_classify(
    code: StabilizerCode, config: DecoderConfig, error: np.ndarray, syndrome: np.ndarray
) -> TrialResult:
    outcome = decode(code, syndrome, config.bp)
    estimate = outcome.estimate
    osd_invoked = False
    if not outcome.converged and config.osd_order is not None:
        sol = osd_w(
            code.check, syndrome, estimate, outcome.beliefs, outcome.ell,
            w=config.osd_order, mode=config.osd_mode, check_lambda=code.check_lambda,
        )
        estimate = sol.estimate
        osd_invoked = True
        if not np.array_equal(syndrome_of(code.check, estimate), syndrome):
            raise RuntimeError("OSD returned an estimate that does not match the syndrome")
    if outcome.converged or osd_invoked:
        failure = code.logical_failure(estimate ^ error)
    else:
        # BP gave up without post-processing: count as a failure
        failure = True
    return TrialResult(outcome.converged, osd_invoked, failure, outcome.iterations_used, pauli_weight(estimate), estimate)


# ---------------------------------------------------------------------------
# points, sweeps


def _run_chunk(code, config, epsilon, key, start, stop):
    out = np.zeros((stop - start, 4), dtype=np.int64)
    for i, t in enumerate(range(start, stop)):
        r = run_trial(code, config, epsilon, trial_rng(key, t))
        out[i] = (r.logical_failure, r.bp_converged, r.osd_invoked, r.iterations_used)
    return out


def _chunks(max_trials: int):
    start = 0
    while start < max_trials:
        yield start, min(start + CHUNK, max_trials)
        start += CHUNK


def run_point(
    code: StabilizerCode,
    config: DecoderConfig,
    epsilon: float,
    stop: StopRule = StopRule(),
    seed: int = 0,
    workers: int = 1,
    key: Sequence[int] | None = None,
) -> RunStats:
    """Run trials until ``stop`` is met and aggregate them.

    The stopping index is the first trial at which the running logical
    error count reaches ``stop.min_logical_errors``; trials computed past
    it by other workers are discarded, which keeps the result independent
    of ``workers``.
    """
    cfg = config.for_epsilon(epsilon)
    if key is None:
        key = point_key(seed)
    totals = np.zeros(4, dtype=np.int64)
    trials = 0

    def consume(block):
        nonlocal totals, trials
        cum = np.cumsum(block[:, 0]) + totals[0]
        hit = np.flatnonzero(cum >= stop.min_logical_errors)
        if hit.size:
            block = block[: hit[0] + 1]
        totals += block.sum(axis=0)
        trials += block.shape[0]
        return bool(hit.size)

    chunks = _chunks(stop.max_trials)
    if workers <= 1:
        for a, b in chunks:
            if consume(_run_chunk(code, cfg, epsilon, key, a, b)):
                break
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            pending = []
            done = False
            for a, b in chunks:
                pending.append(pool.submit(_run_chunk, code, cfg, epsilon, key, a, b))
                if len(pending) < 2 * workers:
                    continue
                if consume(pending.pop(0).result()):
                    done = True
                    break
            while pending and not done:
                done = consume(pending.pop(0).result())
            for fut in pending:
                fut.cancel()
    stats = RunStats(
        code=code.name,
        n=code.n,
        k=code.k,
        d=code.d,
        epsilon=float(epsilon),
        trials=trials,
        logical_errors=int(totals[0]),
        bp_converged=int(totals[1]),
        osd_invoked=int(totals[2]),
        mean_iters=float(totals[3]) / trials if trials else 0.0,
    )
    log.info(
        "%s eps=%.4g trials=%d errors=%d ler=%.4g",
        code.name, epsilon, stats.trials, stats.logical_errors, stats.ler,
    )
    return stats


def sweep(
    codes: Iterable[StabilizerCode],
    epsilons: Iterable[float],
    config: DecoderConfig,
    stop: StopRule = StopRule(),
    seed: int = 0,
    workers: int = 1,
) -> list[RunStats]:
    """Every (code, epsilon) pair; each point's stream key comes from (seed, code name, epsilon)."""
    codes = list(codes)
    epsilons = [float(e) for e in epsilons]
    if not codes or not epsilons:
        raise ValueError("sweep needs at least one code and one epsilon")
    return [
        run_point(code, config, eps, stop, workers=workers, key=point_key(seed, code.name, eps))
        for code in codes
        for eps in epsilons
    ]


# ---------------------------------------------------------------------------
# threshold


@dataclass
class ThresholdEstimate:
    """Pairwise crossings of log(ler) vs log(epsilon) for adjacent distances.

    ``crossing`` is the mean over pairs and ``spread`` the max-min range;
    both are ``None`` when some pair has no crossing in the data.
    """

    crossing: float | None
    spread: float | None
    pair_crossings: dict[tuple[int, int], float | None]
    brackets: dict[tuple[int, int], list[tuple[float, float, float]]]

    @property
    def found(self) -> bool:
        return self.crossing is not None


def _pair_crossing(eps, ler_a, ler_b):
    """First epsilon where curve b rises above curve a (log-log interpolation)."""
    ok = (ler_a > 0) & (ler_b > 0)
    x = np.log(eps[ok])
    diff = np.log(ler_b[ok]) - np.log(ler_a[ok])
    for i in range(len(diff)):
        if diff[i] == 0:
            if i == 0 or diff[i - 1] < 0:
                return float(np.exp(x[i]))
        if i > 0 and diff[i - 1] < 0 < diff[i]:
            t = diff[i - 1] / (diff[i - 1] - diff[i])
            return float(np.exp(x[i - 1] + t * (x[i] - x[i - 1])))
    return None


def estimate_threshold(table: Iterable[RunStats]) -> ThresholdEstimate:
    """Threshold from a grid of points keyed by distance and epsilon."""
    by_d: dict[int, dict[float, float]] = {}
    for row in table:
        if row.d is None:
            raise ValueError(f"point for {row.code} carries no distance")
        by_d.setdefault(row.d, {})[row.epsilon] = row.ler
    ds = sorted(by_d)
    if len(ds) < 2:
        raise ValueError("need at least two distances")
    common = sorted(set.intersection(*(set(v) for v in by_d.values())))
    if len(common) < 3:
        raise ValueError("need at least three epsilons shared by all distances")
    eps = np.array(common)
    pairs, brackets = {}, {}
    for da, db in zip(ds, ds[1:]):
        la = np.array([by_d[da][e] for e in common])
        lb = np.array([by_d[db][e] for e in common])
        pairs[da, db] = _pair_crossing(eps, la, lb)
        brackets[da, db] = list(zip(common, la.tolist(), lb.tolist()))
    values = [v for v in pairs.values() if v is not None]
    if len(values) < len(pairs):
        return ThresholdEstimate(None, None, pairs, brackets)
    return ThresholdEstimate(float(np.mean(values)), float(np.ptp(values)), pairs, brackets)


# ---------------------------------------------------------------------------
# output


def to_csv(rows: Iterable[RunStats], manifest: dict | None = None) -> str:
    """CSV text; a manifest, when given, goes first as ``# manifest: {json}``."""
    buf = io.StringIO()
    if manifest is not None:
        buf.write("# manifest: " + json.dumps(manifest, sort_keys=True) + "\n")
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        r = row.as_row()
        r["d"] = "" if r["d"] is None else r["d"]
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


def to_json(rows: Iterable[RunStats]) -> str:
    return json.dumps([r.as_row() for r in rows], indent=1)


def read_csv(text: str) -> list[RunStats]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    out = []
    for r in csv.DictReader(lines):
        out.append(
            RunStats(
                code=r["code"],
                n=int(r["n"]),
                k=int(r["k"]),
                d=int(r["d"]) if r["d"] else None,
                epsilon=float(r["epsilon"]),
                trials=int(r["trials"]),
                logical_errors=int(r["logical_errors"]),
                bp_converged=int(r["bp_converged"]),
                osd_invoked=int(r["osd_invoked"]),
                mean_iters=float(r["mean_iters"]),
            )
        )
    return out
