"""Numerical maximisers of the communication utility.

These are deliberately independent of the closed forms: they only use
the channel's Kraus operators and the game matrix.

* :func:`seesaw` alternates an exact encoding step (top eigenvectors) with
  a decoding step (exact Helstrom projectors for two answers, a monotone
  fixed-point POVM update otherwise).  It returns a lower bound on the
  utility; restarts make it reliable in practice.
* :func:`qubit_binary_grid` exhausts orthonormal pure encodings of a qubit
  for a binary discrimination game.
* :func:`classical_utility` enumerates deterministic classical strategies.

Hot loops use LAPACK through ``numpy.linalg.eigh`` rather than the Jacobi
kernel, which also keeps the oracle numerically independent of it.
"""

import logging
from dataclasses import dataclass
from itertools import product
from math import log2

import numpy as np
from scipy.optimize import minimize

from . import tolerances as tol
from .closedform import UtilityResult, helstrom
from .games import as_game, normalize_to_nonneg
from .matcore import PAULIS, ValidationError, random_unitary

log = logging.getLogger(__name__)

MONOTONE_SLACK = 1e-10
POVM_MIX = 0.05
ASCENT_STEPS = 5


@dataclass
class OracleConfig:
    restarts: int = 20
    max_iters: int = 2000
    tol: float = 1e-10
    seed: int = 0
    grid_points: int = 200

    def __post_init__(self):
        if self.restarts < 1:
            raise ValidationError(f"restarts must be >= 1, got {self.restarts}")
        if self.tol <= 0:
            raise ValidationError(f"tol must be positive, got {self.tol}")
        if self.grid_points < 2:
            raise ValidationError(f"grid_points must be >= 2, got {self.grid_points}")


class _KrausMap:
    """Batched Schroedinger/Heisenberg action on stacks of matrices."""

    def __init__(self, ch):
        self.k = np.array(ch.kraus)
        self.kh = self.k.conj().transpose(0, 2, 1)
        self.din, self.dout = ch.din, ch.dout

    def fwd(self, rho):
        # rho: (..., din, din) -> (..., dout, dout)
        rho = np.asarray(rho)[..., None, :, :]
        return (self.k @ rho @ self.kh).sum(axis=-3)

    def adj(self, x):
        x = np.asarray(x)[..., None, :, :]
        return (self.kh @ x @ self.k).sum(axis=-3)


def _herm(a):
    return 0.5 * (a + np.swapaxes(a, -1, -2).conj())


def _inv_sqrt(a):
    w, v = np.linalg.eigh(_herm(a))
    return (v / np.sqrt(np.maximum(w, tol.REGULARIZER))) @ v.conj().T


def random_povm(d, m, rng, mix=POVM_MIX):
    """Haar-random basis projectors coarse-grained into ``m`` outcomes.

    A small admixture of ``I/m`` keeps every outcome alive under the
    multiplicative POVM update.
    """
    u = random_unitary(d, rng)
    owner = rng.permutation(np.arange(d) % m) if d >= m else rng.permutation(m)[:d]
    povm = np.zeros((m, d, d), dtype=complex)
    for i in range(d):
        povm[owner[i]] += np.outer(u[:, i], u[:, i].conj())
    return (1.0 - mix) * povm + mix * np.eye(d) / m


def _encode(kmap, g, povm):
    """Optimal encoding for a fixed decoding: top eigenvector of sum_y g[x,y] C^dag(pi_y)."""
    heis = kmap.adj(povm)
    b = np.tensordot(g, heis, axes=(1, 0))
    w, v = np.linalg.eigh(_herm(b))
    top = v[:, :, -1]
    states = top[:, :, None] * top[:, None, :].conj()
    return states, float(w[:, -1].sum())


def _targets(kmap, g, states):
    outs = kmap.fwd(states)
    return _herm(np.tensordot(g.T, outs, axes=(1, 0)))


def _score(targets, povm):
    return float(np.sum(targets * np.swapaxes(povm, -1, -2)).real)


def _helstrom_decode(targets):
    w, v = np.linalg.eigh(_herm(targets[0] - targets[1]))
    pos = v[:, w >= tol.POSITIVE_PART]
    p0 = pos @ pos.conj().T
    return np.array([p0, np.eye(p0.shape[0]) - p0])


def _povm_ascent(targets, povm):
    """One step ``pi_y <- R^-1/2 A_y pi_y A_y R^-1/2`` with ``R = sum_y A_y pi_y A_y``."""
    prods = targets @ povm @ targets
    rm = _inv_sqrt(prods.sum(axis=0))
    return _herm(rm @ prods @ rm)


def _decode(targets, povm, inner_iters=ASCENT_STEPS):
    if len(targets) == 2:
        return _helstrom_decode(targets)
    current = _score(targets, povm)
    for _ in range(inner_iters):
        cand = _povm_ascent(targets, povm)
        val = _score(targets, cand)
        if val < current:
            break
        povm, current = cand, val
    return povm


def best_decoding(ch, game, encoding, max_iters=20000, tol_=1e-13):
    """Optimise only the decoding for a fixed encoding; returns (value, povm)."""
    game = as_game(game)
    shifted, _, offset = normalize_to_nonneg(game)
    kmap = _KrausMap(ch)
    targets = _targets(kmap, shifted.g, np.array(encoding, dtype=complex))
    povm = np.array([np.eye(ch.dout, dtype=complex) / game.m for _ in range(game.m)])
    if game.m == 2:
        povm = _helstrom_decode(targets)
    else:
        prev = _score(targets, povm)
        for _ in range(max_iters):
            povm = _decode(targets, povm)
            val = _score(targets, povm)
            if val - prev < tol_:
                break
            prev = val
    return _score(targets, povm) - offset, list(povm)


def _seesaw_run(kmap, g, povm, cfg, history):
    prev = -np.inf
    states, targets = None, None
    converged = False
    for _ in range(cfg.max_iters):
        states, enc_val = _encode(kmap, g, povm)
        if enc_val < prev - MONOTONE_SLACK:
            raise AssertionError(f"encoding step decreased the value: {prev} -> {enc_val}")
        targets = _targets(kmap, g, states)
        povm = _decode(targets, povm)
        val = _score(targets, povm)
        if val < enc_val - MONOTONE_SLACK:
            raise AssertionError(f"decoding step decreased the value: {enc_val} -> {val}")
        history.append(val)
        if val - prev < cfg.tol:
            converged = True
            break
        prev = val
    return _score(targets, povm), states, povm, converged


def seesaw(ch, game, cfg=None, init_povms=None):
    """Lower bound on ``U(ch, game)`` by alternating optimisation with restarts."""
    cfg = OracleConfig() if cfg is None else cfg
    game = as_game(game)
    shifted, _, offset = normalize_to_nonneg(game)
    g = shifted.g
    kmap = _KrausMap(ch)
    rng = np.random.default_rng(cfg.seed)
    starts = [np.array(p, dtype=complex) for p in (init_povms or [])]
    starts += [random_povm(ch.dout, game.m, rng) for _ in range(cfg.restarts)]
    best = None
    for i, povm in enumerate(starts):
        history = []
        val, states, dec, converged = _seesaw_run(kmap, g, povm, cfg, history)
        if best is None or val > best[0]:
            best = (val, states, dec, converged, history, i)
    val, states, dec, converged, history, i = best
    if not converged:
        log.warning("see-saw hit max_iters=%d without converging; returning best so far", cfg.max_iters)
    info = {"seed": cfg.seed, "restarts": cfg.restarts, "best_restart": i, "converged": converged,
            "iterations": len(history), "history": history}
    return UtilityResult(val - offset, list(states), list(dec), f"oracle:seesaw(seed={cfg.seed})", info)


# -- qubit grid -------------------------------------------------------------

def _bloch(theta, phi):
    return np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1)


class _QubitHelstrom:
    """Vectorised Helstrom value for the encoding (I +/- n.sigma)/2."""

    def __init__(self, ch, g0):
        kmap = _KrausMap(ch)
        self.base = (2.0 * g0 - 1.0) / 2.0 * kmap.fwd(PAULIS[0])
        self.paulis = np.array([kmap.fwd(s) for s in PAULIS[1:]]) / 2.0

    def __call__(self, n):
        h = self.base + np.tensordot(n, self.paulis, axes=(-1, 0))
        if h.shape[-1] == 2:
            # 2x2 Hermitian: eigenvalues tr/2 +/- sqrt(((a - d)/2)^2 + |b|^2)
            tr = (h[..., 0, 0] + h[..., 1, 1]).real
            rad = np.sqrt(((h[..., 0, 0] - h[..., 1, 1]).real / 2.0) ** 2 + np.abs(h[..., 0, 1]) ** 2)
            return 0.5 * (1.0 + np.maximum(np.abs(tr), 2.0 * rad))
        w = np.linalg.eigvalsh(h)
        return 0.5 * (1.0 + np.abs(w).sum(axis=-1))


def _grid_search(score, points, polish=5):
    theta = np.linspace(0.0, np.pi, points)
    phi = np.linspace(0.0, 2.0 * np.pi, points, endpoint=False)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    vals = score(_bloch(tt, pp))
    flat = np.argsort(vals, axis=None)[::-1][:polish]
    best_val, best_x = -np.inf, None
    for idx in flat:
        i, j = np.unravel_index(idx, vals.shape)
        x0 = np.array([tt[i, j], pp[i, j]])
        res = minimize(lambda x: -score(_bloch(x[0], x[1])), x0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 2000})
        cand = [(vals[i, j], x0), (-res.fun, res.x)]
        for v, x in cand:
            if v > best_val:
                best_val, best_x = float(v), x
    return best_val, best_x


def qubit_binary_grid(ch, g0, grid_points=200, refine_tol=1e-5, max_doublings=3):
    """Best orthonormal pure encoding of a qubit for ``diag(g0, 1 - g0)``.

    The Bloch sphere is gridded in (theta, phi), the best cells are
    polished locally, and the grid is doubled until the value moves by
    less than ``refine_tol``.
    """
    if ch.din != 2:
        raise ValidationError(f"qubit grid needs a qubit-input channel, got din = {ch.din}")
    if not 0.0 <= g0 <= 1.0:
        raise ValidationError(f"g0 must lie in [0, 1], got {g0}")
    score = _QubitHelstrom(ch, g0)
    points = grid_points
    val, x = _grid_search(score, points)
    for _ in range(max_doublings):
        points *= 2
        val2, x2 = _grid_search(score, points)
        change = abs(val2 - val)
        if val2 > val:
            val, x = val2, x2
        if change < refine_tol:
            break
    n = _bloch(x[0], x[1])
    sigma = sum(c * s for c, s in zip(n, PAULIS[1:]))
    rho0, rho1 = (PAULIS[0] + sigma) / 2.0, (PAULIS[0] - sigma) / 2.0
    hel = helstrom(ch, rho0, rho1, g0)
    info = {"grid_points": points, "bloch": n.tolist(), "grid_value": val}
    return UtilityResult(max(hel.value, val), [rho0, rho1], hel.povm, "oracle:qubit-grid", info)


# -- classical strategies -----------------------------------------------------

def classical_utility(p_cond, game, budget_log2=tol.ENUM_BUDGET_LOG2):
    """Exact utility of a classical channel ``p_cond[k, i] = P(k | i)``.

    Encodings ``x -> i`` are enumerated; for each one the best decoding
    ``k -> y`` is chosen output by output, which is exact because the
    payoff separates over ``k``.
    """
    p = np.asarray(p_cond, dtype=float)
    g = as_game(game).g
    if p.ndim != 2 or np.any(p < -tol.PROB_ATOL) or np.abs(p.sum(axis=0) - 1.0).max() > 1e-10:
        raise ValidationError("p_cond must be a column-stochastic k x n_in matrix")
    n, n_in = g.shape[0], p.shape[1]
    if n * log2(max(n_in, 1)) > budget_log2:
        raise ValidationError(f"{n_in}^{n} encodings exceed the budget of 2^{budget_log2}")
    best = -np.inf
    for enc in product(range(n_in), repeat=n):
        m = p[:, enc] @ g
        best = max(best, float(m.max(axis=1).sum()))
    return best
