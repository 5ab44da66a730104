"""Quaternary belief propagation with scalar messages (BP4 / MBP4).

Each Tanner-graph edge (check m, qubit v) carries two scalars:

* ``lam[e]``, qubit-to-check: log of P(qubit error commutes with S_mv)
  over P(anticommutes), computed from the qubit's belief with the
  check's own contribution removed;
* ``delta[e]``, check-to-qubit: ``(-1)^z_m * 2 atanh(prod tanh(lam/2))``
  over the other qubits of the check.

Qubit beliefs are kept as log-likelihood ratios
``gamma[v, W] = log(q_I / q_W)`` for W in (X, Y, Z):

    gamma[v, W] = prior[W] + (1/alpha) * sum_{m: W anticommutes with S_mv} delta[m -> v]

and the outgoing message is ``lam = lambda_{S_mv}(gamma[v]) - delta``.
``alpha = 1`` is plain BP4; other values give the memory-effect MBP4.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass, field

import numba
import numpy as np

from .pauli import from_letter_codes, letter_codes

LLR_CLAMP = 30.0
TANH_EPS = 1e-12

# ANTI[a, b] == 1 iff letters a, b (0=I, 1=X, 2=Y, 3=Z) anticommute
ANTI = np.array(
    [[0, 0, 0, 0], [0, 0, 1, 1], [0, 1, 0, 1], [0, 1, 1, 0]],
    dtype=np.uint8,
)

ALPHA_MODES = ("plain", "fixed", "epsilon_scaled")
SCHEDULES = ("serial", "parallel")


@dataclass(frozen=True)
class BpConfig:
    """Decoder settings.

    ``alpha_mode`` selects the MBP4 memory exponent: ``"plain"`` (alpha = 1),
    ``"fixed"`` (``alpha``) or ``"epsilon_scaled"`` where
    ``alpha = c1 * log10(prior_epsilon) + c0`` with ``(c1, c0) = alpha_coeffs``.
    """

    max_iterations: int = 60
    schedule: str = "serial"
    alpha_mode: str = "plain"
    alpha: float = 1.0
    alpha_coeffs: tuple[float, float] = (-0.16, -0.48)
    prior_epsilon: float = 0.1

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"schedule must be one of {SCHEDULES}, got {self.schedule!r}")
        if self.alpha_mode not in ALPHA_MODES:
            raise ValueError(f"alpha_mode must be one of {ALPHA_MODES}, got {self.alpha_mode!r}")
        if not 0.0 < self.prior_epsilon < 1.0:
            raise ValueError(f"prior_epsilon must lie in (0, 1), got {self.prior_epsilon}")
        if self.effective_alpha <= 0:
            raise ValueError(
                f"alpha must be positive; {self.alpha_mode} gives {self.effective_alpha:.4g}"
            )

    @property
    def effective_alpha(self) -> float:
        if self.alpha_mode == "plain":
            return 1.0
        if self.alpha_mode == "fixed":
            return float(self.alpha)
        c1, c0 = self.alpha_coeffs
        return c1 * math.log10(self.prior_epsilon) + c0


@dataclass(frozen=True, eq=False)
class TannerGraph:
    """Edge lists of a check matrix; edges are ordered by (check, qubit)."""

    n: int
    m: int
    edge_check: np.ndarray
    edge_qubit: np.ndarray
    edge_letter: np.ndarray
    check_ptr: np.ndarray
    qubit_ptr: np.ndarray
    qubit_edges: np.ndarray

    @classmethod
    def from_check(cls, check: np.ndarray) -> "TannerGraph":
        check = np.asarray(check, dtype=np.uint8)
        m, two_n = check.shape
        n = two_n // 2
        letters = letter_codes_matrix(check)
        rows, cols = np.nonzero(letters)
        edge_letter = letters[rows, cols].astype(np.int64)
        check_ptr = np.searchsorted(rows, np.arange(m + 1)).astype(np.int64)
        order = np.argsort(cols, kind="stable")
        qubit_ptr = np.searchsorted(cols[order], np.arange(n + 1)).astype(np.int64)
        return cls(
            n,
            m,
            rows.astype(np.int64),
            cols.astype(np.int64),
            edge_letter,
            check_ptr,
            qubit_ptr,
            order.astype(np.int64),
        )

    @property
    def num_edges(self) -> int:
        return self.edge_check.size


def letter_codes_matrix(check: np.ndarray) -> np.ndarray:
    n = check.shape[1] // 2
    x, z = check[:, :n].astype(bool), check[:, n:].astype(bool)
    return np.where(x & z, 2, np.where(x, 1, np.where(z, 3, 0))).astype(np.uint8)


_GRAPHS: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


def tanner_graph(code) -> TannerGraph:
    """Cached Tanner graph of a :class:`~qec_bposd.codes.StabilizerCode`."""
    graph = _GRAPHS.get(code)
    if graph is None:
        graph = _GRAPHS[code] = TannerGraph.from_check(code.check)
    return graph


@dataclass
class BeliefState:
    graph: TannerGraph
    prior_llr: np.ndarray
    gamma: np.ndarray
    lam: np.ndarray
    th: np.ndarray  # tanh(lam / 2), cached for the check updates
    delta: np.ndarray
    ell: np.ndarray
    last_decision: np.ndarray  # letter codes of W0
    iteration_count: int = 0

    @property
    def beliefs(self) -> np.ndarray:
        """Normalised (n, 4) distributions over (I, X, Y, Z)."""
        return llr_to_dist(self.gamma)

    @property
    def last_estimate(self) -> np.ndarray:
        return from_letter_codes(self.last_decision)


@dataclass
class DecodeOutcome:
    status: str  # "converged" or "exhausted"
    estimate: np.ndarray
    beliefs: np.ndarray
    ell: np.ndarray
    iterations_used: int
    extra: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.status == "converged"


def prior_llr(epsilon: float) -> np.ndarray:
    return np.full(3, math.log(3.0 * (1.0 - epsilon) / epsilon))


def llr_to_dist(gamma: np.ndarray) -> np.ndarray:
    gamma = np.atleast_2d(gamma)
    logits = np.concatenate([np.zeros((gamma.shape[0], 1)), -gamma], axis=1)
    logits -= logits.max(axis=1, keepdims=True)
    q = np.exp(logits)
    return q / q.sum(axis=1, keepdims=True)


def init_decoder(code, config: BpConfig) -> BeliefState:
    """Fresh decoder state: every belief equals the depolarizing prior."""
    graph = tanner_graph(code)
    llr = prior_llr(config.prior_epsilon)
    gamma = np.tile(llr, (graph.n, 1))
    lam = np.empty(graph.num_edges)
    th = np.empty(graph.num_edges)
    _init_messages(graph.edge_qubit, graph.edge_letter, gamma, lam, th)
    return BeliefState(
        graph=graph,
        prior_llr=llr,
        gamma=gamma,
        lam=lam,
        th=th,
        delta=np.zeros(graph.num_edges),
        ell=np.ones(graph.n, dtype=np.int64),
        last_decision=np.zeros(graph.n, dtype=np.uint8),
    )


def bp4_iteration(state: BeliefState, code, syndrome: np.ndarray, config: BpConfig) -> BeliefState:
    """Run one message-passing iteration in place and return the state.

    Only messages and beliefs change; hard-decision bookkeeping lives in
    :func:`decode`.
    """
    g = state.graph
    _iterate(
        g.check_ptr, g.edge_check, g.edge_qubit, g.edge_letter, g.qubit_ptr, g.qubit_edges,
        np.asarray(syndrome, dtype=np.uint8), state.prior_llr, 1.0 / config.effective_alpha,
        config.schedule == "serial", state.gamma, state.lam, state.th, state.delta,
    )
    state.iteration_count += 1
    return state


def syndrome_of_letters(graph: TannerGraph, letters: np.ndarray) -> np.ndarray:
    """Syndrome of an error given as per-qubit letter codes (0..3 for I, X, Y, Z)."""
    out = np.empty(graph.m, dtype=np.uint8)
    _syndrome(graph.check_ptr, graph.edge_qubit, graph.edge_letter, np.asarray(letters, dtype=np.uint8), out)
    return out


def hard_decision(beliefs: np.ndarray) -> np.ndarray:
    """Per-qubit argmax letter; ties resolve in the order I, X, Y, Z."""
    beliefs = np.atleast_2d(beliefs)
    return from_letter_codes(np.argmax(beliefs, axis=1))


def update_reliability_vec(w0: np.ndarray, w1: np.ndarray, ell: np.ndarray) -> np.ndarray:
    """Extend runs where the hard decision is unchanged, reset the rest to 1.

    ``w0``/``w1`` are Pauli vectors (length 2n); ``ell`` has length n.
    """
    w0, w1, ell = np.asarray(w0), np.asarray(w1), np.asarray(ell)
    if w0.shape != w1.shape or w0.size != 2 * ell.size:
        raise ValueError(
            f"length mismatch: W0 {w0.size}, W1 {w1.size}, ell {ell.size} (need 2n, 2n, n)"
        )
    same = letter_codes(w0) == letter_codes(w1)
    return np.where(same, ell + 1, 1)


def soft_reliability(q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(phi_X, phi_Z)`` for one (4,) distribution or a stack (n, 4)."""
    q = np.asarray(q, dtype=float)
    qi, qx, qy, qz = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    phi_x = np.maximum(qx + qy, qi + qz)
    phi_z = np.maximum(qz + qy, qi + qx)
    return phi_x, phi_z


def decode(code, syndrome: np.ndarray, config: BpConfig) -> DecodeOutcome:
    """Iterate BP4 until the hard decision matches ``syndrome`` or T runs out."""
    syndrome = np.asarray(syndrome, dtype=np.uint8)
    if syndrome.ndim != 1 or syndrome.size != code.m:
        raise ValueError(f"syndrome length {syndrome.size} != number of checks {code.m}")
    state = init_decoder(code, config)
    g = state.graph
    w1 = np.zeros(g.n, dtype=np.uint8)
    converged, iters = _run(
        g.check_ptr, g.edge_check, g.edge_qubit, g.edge_letter, g.qubit_ptr, g.qubit_edges,
        syndrome, state.prior_llr, 1.0 / config.effective_alpha,
        config.schedule == "serial", config.max_iterations,
        state.gamma, state.lam, state.th, state.delta, state.ell, state.last_decision, w1,
    )
    return DecodeOutcome(
        status="converged" if converged else "exhausted",
        estimate=from_letter_codes(w1),
        beliefs=state.beliefs,
        ell=state.ell.copy(),
        iterations_used=int(iters),
    )


# ---------------------------------------------------------------------------
# kernels


@numba.njit(cache=True)
def _logaddexp(a, b):
    if a > b:
        return a + math.log1p(math.exp(b - a))
    return b + math.log1p(math.exp(a - b))


@numba.njit(cache=True)
def _lambda(g, letter):
    # g = (gamma_X, gamma_Y, gamma_Z); letter in 1..3
    s = letter - 1
    a = (s + 1) % 3
    b = (s + 2) % 3
    val = _logaddexp(0.0, -g[s]) - _logaddexp(-g[a], -g[b])
    if val > LLR_CLAMP:
        return LLR_CLAMP
    if val < -LLR_CLAMP:
        return -LLR_CLAMP
    return val


@numba.njit(cache=True)
def _init_messages(edge_qubit, edge_letter, gamma, lam, th):
    for e in range(edge_qubit.size):
        lam[e] = _lambda(gamma[edge_qubit[e]], edge_letter[e])
        th[e] = math.tanh(0.5 * lam[e])


@numba.njit(cache=True)
def _syndrome(check_ptr, edge_qubit, edge_letter, letters, out):
    for c in range(check_ptr.size - 1):
        par = 0
        for e in range(check_ptr[c], check_ptr[c + 1]):
            a = letters[edge_qubit[e]]
            if a != 0 and a != edge_letter[e]:
                par ^= 1
        out[c] = par


@numba.njit(cache=True)
def _check_to_qubit(e, c, check_ptr, syndrome, th):
    prod = 1.0
    for f in range(check_ptr[c], check_ptr[c + 1]):
        if f != e:
            prod *= th[f]
    lim = 1.0 - TANH_EPS
    if prod > lim:
        prod = lim
    elif prod < -lim:
        prod = -lim
    val = 2.0 * math.atanh(prod)
    return -val if syndrome[c] else val


@numba.njit(cache=True)
def _clamp(val):
    if val > LLR_CLAMP:
        return LLR_CLAMP
    if val < -LLR_CLAMP:
        return -LLR_CLAMP
    return val


@numba.njit(cache=True)
def _update_qubit(v, qubit_ptr, qubit_edges, edge_letter, prior, alpha_inv, gamma, lam, th, delta):
    gx = prior[0]
    gy = prior[1]
    gz = prior[2]
    for k in range(qubit_ptr[v], qubit_ptr[v + 1]):
        e = qubit_edges[k]
        s = edge_letter[e]
        dv = alpha_inv * delta[e]
        # letters anticommuting with s get the message
        if s != 1:
            gx += dv
        if s != 2:
            gy += dv
        if s != 3:
            gz += dv
    gamma[v, 0] = gx
    gamma[v, 1] = gy
    gamma[v, 2] = gz
    # lambda_S = log((q_I + q_S) / (q_a + q_b)), evaluated with a common shift
    shift = max(0.0, -gx, -gy, -gz)
    e0 = math.exp(-shift)
    ex = math.exp(-gx - shift)
    ey = math.exp(-gy - shift)
    ez = math.exp(-gz - shift)
    lx = _log_ratio(e0 + ex, ey + ez)
    ly = _log_ratio(e0 + ey, ex + ez)
    lz = _log_ratio(e0 + ez, ex + ey)
    for k in range(qubit_ptr[v], qubit_ptr[v + 1]):
        e = qubit_edges[k]
        s = edge_letter[e]
        base = lx if s == 1 else (ly if s == 2 else lz)
        val = _clamp(base - delta[e])
        lam[e] = val
        th[e] = math.tanh(0.5 * val)


@numba.njit(cache=True)
def _log_ratio(num, den):
    if den <= 0.0:
        return LLR_CLAMP
    if num <= 0.0:
        return -LLR_CLAMP
    return _clamp(math.log(num / den))


@numba.njit(cache=True)
def _iterate(check_ptr, edge_check, edge_qubit, edge_letter, qubit_ptr, qubit_edges,
             syndrome, prior, alpha_inv, serial, gamma, lam, th, delta):
    n = qubit_ptr.size - 1
    m = check_ptr.size - 1
    if serial:
        for v in range(n):
            for k in range(qubit_ptr[v], qubit_ptr[v + 1]):
                e = qubit_edges[k]
                delta[e] = _check_to_qubit(e, edge_check[e], check_ptr, syndrome, th)
            _update_qubit(v, qubit_ptr, qubit_edges, edge_letter, prior, alpha_inv, gamma, lam, th, delta)
    else:
        for c in range(m):
            for e in range(check_ptr[c], check_ptr[c + 1]):
                delta[e] = _check_to_qubit(e, c, check_ptr, syndrome, th)
        for v in range(n):
            _update_qubit(v, qubit_ptr, qubit_edges, edge_letter, prior, alpha_inv, gamma, lam, th, delta)


@numba.njit(cache=True)
def _hard_decision(gamma, out):
    for v in range(gamma.shape[0]):
        best = 0
        val = 0.0
        for w in range(3):
            if -gamma[v, w] > val:
                val = -gamma[v, w]
                best = w + 1
        out[v] = best


@numba.njit(cache=True)
def _matches(check_ptr, edge_qubit, edge_letter, syndrome, letters):
    m = check_ptr.size - 1
    for c in range(m):
        par = 0
        for e in range(check_ptr[c], check_ptr[c + 1]):
            a = letters[edge_qubit[e]]
            s = edge_letter[e]
            if a != 0 and a != s:
                par ^= 1
        if par != syndrome[c]:
            return False
    return True


@numba.njit(cache=True)
def _run(check_ptr, edge_check, edge_qubit, edge_letter, qubit_ptr, qubit_edges, syndrome, prior,
         alpha_inv, serial, max_iter, gamma, lam, th, delta, ell, w0, w1):
    n = gamma.shape[0]
    for it in range(max_iter):
        _iterate(check_ptr, edge_check, edge_qubit, edge_letter, qubit_ptr, qubit_edges,
                 syndrome, prior, alpha_inv, serial, gamma, lam, th, delta)
        _hard_decision(gamma, w1)
        if _matches(check_ptr, edge_qubit, edge_letter, syndrome, w1):
            return True, it + 1
        for v in range(n):
            if w1[v] == w0[v]:
                ell[v] += 1
            else:
                ell[v] = 1
            w0[v] = w1[v]
    return False, max_iter
