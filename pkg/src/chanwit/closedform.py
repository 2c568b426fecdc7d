"""Closed-form communication utilities and the strategies that attain them.

Each ``utility_*`` function returns a :class:`UtilityResult` carrying the
value, an optimal encoding (list of density matrices, one per input), an
optimal decoding (list of POVM elements, one per output) when one is
cheap to write down, and a short provenance tag.

The binary formulas accept any ``g0`` in [0, 1].  Relabelling Bob's two
answers maps ``diag(g0, 1 - g0)`` to ``diag(1 - g0, g0)`` without changing
the utility, so the formulas are evaluated at ``max(g0, 1 - g0)``.
"""

from dataclasses import dataclass, field
from itertools import combinations, product
from math import log2
from typing import Optional

import numpy as np

from . import channels as chn
from . import tolerances as tol
from .games import (
    affine_transform,
    as_game,
    column_sums,
    is_unbiased,
    reduce_binary_output,
)
from .matcore import (
    PAULIS,
    ValidationError,
    basis_vector,
    hermitian_eig,
    projector,
    top_eigpair,
)


class EnumerationBudgetError(ValidationError):
    pass


class OutOfScopeError(ValidationError):
    pass


@dataclass
class UtilityResult:
    value: float
    encoding: Optional[list] = None
    decoding: Optional[list] = None
    provenance: str = ""
    info: dict = field(default_factory=dict)

    def to_json(self):
        out = {"value": self.value, "provenance": self.provenance}
        if self.info:
            out["info"] = {k: v for k, v in self.info.items() if isinstance(v, (int, float, str, bool, list))}
        return out


@dataclass
class HelstromResult:
    H: np.ndarray
    value: float
    povm: list
    trace_norm: float


def average_payoff(ch, game, encoding, decoding):
    """``sum_xy g[x, y] Tr[C(rho_x) pi_y]``."""
    g = as_game(game).g
    outs = [chn.apply(ch, rho) for rho in encoding]
    return float(sum(g[x, y] * np.trace(outs[x] @ decoding[y]).real for x in range(len(outs)) for y in range(len(decoding))))


def _basis_state(i, d):
    return projector(basis_vector(i, d))


# -- arbitrary games --------------------------------------------------------

def utility_identity(game, d):
    """Utility of a noiseless d-dimensional channel for an arbitrary game.

    An orthonormal encoding with a commuting projective decoding is
    optimal, so the problem is classical: pick at most ``d`` distinct
    answers ``S``, send each input on the basis state of its best answer
    in ``S``.  All subsets of size ``min(m, d)`` are enumerated.
    """
    game = as_game(game)
    if d < 1:
        raise ValidationError(f"dimension must be >= 1, got {d}")
    g = game.g
    size = min(game.m, d)
    best, best_s = -np.inf, None
    for s in combinations(range(game.m), size):
        val = float(np.sum(np.max(g[:, s], axis=1)))
        if val > best:
            best, best_s = val, s
    signal = np.argmax(g[:, best_s], axis=1)
    encoding = [_basis_state(int(i), d) for i in signal]
    decoding = [np.zeros((d, d), dtype=complex) for _ in range(game.m)]
    for i in range(d):
        y = best_s[i] if i < size else best_s[0]
        decoding[y] = decoding[y] + _basis_state(i, d)
    return UtilityResult(best, encoding, decoding, "identity:subset-enumeration", {"answers": list(best_s)})


def _rotate_strategy(res, u):
    enc = [u @ r @ u.conj().T for r in res.encoding]
    dec = [u @ p @ u.conj().T for p in res.decoding]
    return enc, dec


def utility_unitary(u, game):
    u = np.asarray(u, dtype=complex)
    res = utility_identity(game, u.shape[0])
    # decode in the rotated frame: pi_y -> U pi_y U^H, encode unrotated
    dec = [u @ p @ u.conj().T for p in res.decoding]
    return UtilityResult(res.value, res.encoding, dec, "unitary:identity", res.info)


def utility_dephasing(lam, game, d, basis=None):
    """Dephasing does not reduce utility: encode and decode along its basis."""
    if not 0.0 <= lam <= 1.0:
        raise ValidationError(f"lambda must lie in [0, 1], got {lam}")
    res = utility_identity(game, d)
    basis = np.eye(d, dtype=complex) if basis is None else np.asarray(basis, dtype=complex)
    enc, dec = _rotate_strategy(res, basis)
    return UtilityResult(res.value, enc, dec, "dephasing:identity", res.info)


def utility_trace_class(game, din=1, dout=1):
    """The channel carries no information: Bob always answers the best column."""
    game = as_game(game)
    sums = column_sums(game)
    y = int(np.argmax(sums))
    dec = [np.eye(dout, dtype=complex) * (k == y) for k in range(game.m)]
    enc = [np.eye(din) / din for _ in range(game.n)]
    return UtilityResult(float(sums[y]), enc, dec, "trace_class:best-column", {"answer": y})


def utility_erasure(lam, game, d):
    if not 0.0 <= lam <= 1.0:
        raise ValidationError(f"lambda must lie in [0, 1], got {lam}")
    game = as_game(game)
    ident = utility_identity(game, d)
    triv = utility_trace_class(game)
    y = triv.info["answer"]
    dec = []
    for k, p in enumerate(ident.decoding):
        full = np.zeros((d + 1, d + 1), dtype=complex)
        full[:d, :d] = p
        full[d, d] = 1.0 if k == y else 0.0
        dec.append(full)
    value = lam * ident.value + (1.0 - lam) * triv.value
    return UtilityResult(value, ident.encoding, dec, "erasure:convex")


def utility_qc(povm, game, budget_log2=tol.ENUM_BUDGET_LOG2):
    """Utility of the measure-and-prepare channel defined by ``povm``.

    Bob's best post-processing is a deterministic relabelling ``f`` of the
    ``k`` measurement outcomes; for each ``f`` the best state for input x
    is the top eigenvector of ``sum_w g[x, f(w)] pi_w``.
    """
    povm = chn.check_povm(povm)
    game = as_game(game)
    k, m = len(povm), game.m
    if k * log2(max(m, 1)) > budget_log2:
        raise EnumerationBudgetError(f"{m}^{k} relabellings exceed the budget of 2^{budget_log2}")
    g = game.g
    best, best_f, best_vecs = -np.inf, None, None
    for f in product(range(m), repeat=k):
        total, vecs = 0.0, []
        for x in range(game.n):
            op = sum(g[x, f[w]] * povm[w] for w in range(k))
            lam, vec = top_eigpair(op)
            total += lam
            vecs.append(vec)
        if total > best + 1e-15:
            best, best_f, best_vecs = total, f, vecs
    encoding = [projector(v) for v in best_vecs]
    # Bob reads register |w> and answers f(w)
    decoding = [np.diag([1.0 if best_f[w] == y else 0.0 for w in range(k)]).astype(complex) for y in range(m)]
    return UtilityResult(float(best), encoding, decoding, "qc:relabelling-enumeration", {"relabelling": list(best_f)})


# -- unbiased and discrimination games ----------------------------------------

def utility_depolarizing_unbiased(lam, game, d):
    """Depolarizing channel on an unbiased game: ``lam * U(id, g)``.

    Games whose column sums all equal ``c`` are shifted to unbiased form,
    which gives ``lam * U(id, g) + (1 - lam) * c``.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValidationError(f"lambda must lie in [0, 1], got {lam}")
    game = as_game(game)
    sums = column_sums(game)
    if is_unbiased(game):
        shift, shifted = 0.0, game
    elif np.ptp(sums) <= tol.UNBIASED_ATOL:
        c = float(np.mean(sums))
        shifted = affine_transform(game, 1.0, np.full(game.n, -c / game.n))
        shift = c
    else:
        raise OutOfScopeError("depolarizing closed form needs equal column sums (an unbiased game up to a shift)")
    ident = utility_identity(shifted, d)
    return UtilityResult(lam * ident.value + shift, ident.encoding, ident.decoding, "depolarizing:unbiased", ident.info)


def utility_unitary_discrimination(gdiag, d):
    """``sum of the d largest g_x``, keeping only the nonnegative ones."""
    gdiag = np.asarray(gdiag, dtype=float)
    n = gdiag.size
    if (n == 1 or d == 1) and gdiag.max() < 0:
        # no wrong answer to steer towards: the best single answer is forced
        res = utility_identity(np.diag(gdiag), d)
        return UtilityResult(res.value, res.encoding, res.decoding, "unitary:discrimination", res.info)
    order = np.argsort(-gdiag, kind="stable")
    top = [int(x) for x in order[:d] if gdiag[x] >= 0]
    value = float(sum(gdiag[x] for x in top))
    encoding, decoding = [], [np.zeros((d, d), dtype=complex) for _ in range(n)]
    if top:
        slot = {x: i for i, x in enumerate(top)}
        encoding = [_basis_state(slot.get(x, 0), d) for x in range(n)]
        for x, i in slot.items():
            decoding[x] = _basis_state(i, d)
        for i in range(len(top), d):
            decoding[top[0]] = decoding[top[0]] + _basis_state(i, d)
    else:
        # every payoff is <= 0: steer each input away from its own answer
        encoding = [_basis_state(1 if x == 0 else 0, d) for x in range(n)]
        decoding[0] = _basis_state(0, d)
        if n > 1:
            rest = (np.eye(d) - _basis_state(0, d)) / (n - 1)
            for x in range(1, n):
                decoding[x] = rest.astype(complex)
        else:
            decoding[0] = np.eye(d, dtype=complex)
    return UtilityResult(value, encoding, decoding, "unitary:discrimination", {"inputs": top})


# -- binary discrimination games ----------------------------------------------

def helstrom(ch, rho0, rho1, g0):
    """Optimal payoff for ``diag(g0, 1 - g0)`` with a fixed encoding."""
    h = g0 * chn.apply(ch, rho0) - (1.0 - g0) * chn.apply(ch, rho1)
    h = 0.5 * (h + h.conj().T)
    w, v = hermitian_eig(h)
    pos = v[:, w >= tol.POSITIVE_PART]
    p0 = pos @ pos.conj().T
    tn = float(np.sum(np.abs(w)))
    return HelstromResult(H=h, value=0.5 * (1.0 + tn), povm=[p0, np.eye(ch.dout) - p0], trace_norm=tn)


def _binary_result(value, ch, psi0, psi1, g0, provenance, info=None):
    rho0, rho1 = projector(psi0), projector(psi1)
    hel = helstrom(ch, rho0, rho1, g0)
    info = dict(info or {})
    info["helstrom_value"] = hel.value
    return UtilityResult(float(value), [rho0, rho1], hel.povm, provenance, info)


def _check_g0(g0):
    if not 0.0 <= g0 <= 1.0:
        raise ValidationError(f"g0 must lie in [0, 1], got {g0}")


def utility_pauli_binary(lam, g0):
    lam = np.asarray(lam, dtype=float)
    _check_g0(g0)
    ch = chn.pauli(lam)
    shrink = np.abs(2.0 * (lam[0] + lam[1:]) - 1.0)
    k = int(np.argmax(shrink)) + 1
    value = max(g0, 1.0 - g0, 0.5 * (1.0 + shrink[k - 1]))
    w, v = hermitian_eig(PAULIS[k])
    psi0, psi1 = (v[:, 0], v[:, 1]) if g0 >= 0.5 else (v[:, 1], v[:, 0])
    return _binary_result(value, ch, psi0, psi1, g0, "pauli:binary", {"axis": k})


def utility_ampdamp_binary(eta, g0):
    _check_g0(g0)
    ch = chn.amplitude_damping(eta)
    value = 0.5 * (1.0 + np.sqrt(1.0 - 4.0 * g0 * (1.0 - eta) + 4.0 * g0**2 * (1.0 - eta)))
    psi0 = np.array([np.sqrt(g0), np.sqrt(1.0 - g0)])
    psi1 = np.array([np.sqrt(1.0 - g0), -np.sqrt(g0)])
    return _binary_result(value, ch, psi0, psi1, g0, "amplitude_damping:binary")


def _shifted_value(lam, smin, g0):
    bias = abs(2.0 * g0 - 1.0)
    return max(g0, 1.0 - g0, 0.5 * (1.0 + lam + (1.0 - lam) * (1.0 - 2.0 * smin) * bias))


def utility_shifted_depolarizing_binary(lam, sigma, g0):
    """``max[g0, (1 + lam + (1 - lam)(1 - 2 s_min)(2 g0 - 1)) / 2]``.

    Optimal: send the top eigenvector of ``sigma`` for the likelier input
    and its bottom eigenvector for the other.
    """
    _check_g0(g0)
    ch = chn.shifted_depolarizing(lam, sigma)
    w, v = hermitian_eig(ch.label["sigma"])
    d = v.shape[0]
    provenance = "shifted_depolarizing:binary"
    if float(np.abs(w - 1.0 / d).max()) <= tol.STATE_ATOL:
        provenance = "depolarizing:binary"
    value = _shifted_value(lam, float(w[-1]), g0)
    top, bottom = v[:, 0], v[:, -1]
    psi0, psi1 = (top, bottom) if g0 >= 0.5 else (bottom, top)
    return _binary_result(value, ch, psi0, psi1, g0, provenance, {"s_min": float(w[-1])})


def utility_depolarizing_binary(lam, d, g0):
    """Depolarizing channel on a binary discrimination game (shifted form with sigma = I/d)."""
    _check_g0(g0)
    ch = chn.depolarizing(lam, d)
    value = _shifted_value(lam, 1.0 / d, g0)
    psi0, psi1 = (basis_vector(0, d), basis_vector(1, d)) if g0 >= 0.5 else (basis_vector(1, d), basis_vector(0, d))
    return _binary_result(value, ch, psi0, psi1, g0, "depolarizing:binary")


def utility_cloning_binary(d, g0):
    """Optimal 1 -> 2 cloner: ``(d + g0) / (d + 1)``; every orthonormal pure pair is optimal."""
    _check_g0(g0)
    value = (d + max(g0, 1.0 - g0)) / (d + 1)
    ch = chn.cloning_1to2(d)
    return _binary_result(value, ch, basis_vector(0, d), basis_vector(1, d), g0, "cloning_1to2:binary")


def utility_partialtrace_cloning_binary(d, g0):
    """One output of the 1 -> 2 cloner, i.e. depolarizing with ``lam = (d + 2) / (2 (d + 1))``."""
    _check_g0(g0)
    lam = (d + 2) / (2.0 * (d + 1))
    gm = max(g0, 1.0 - g0)
    value = max(gm, ((d - 2) * gm + d + 3) / (2.0 * (d + 1)))
    res = utility_depolarizing_binary(lam, d, g0)
    res.value = float(value)
    res.provenance = "cloning_1to2/partial_trace:binary"
    res.info["lambda"] = lam
    return res


def binary_game_value(ch, g0):
    """Closed-form utility of ``diag(g0, 1 - g0)`` for a labelled channel, or None."""
    kind, p = ch.kind, ch.params
    if kind == "pauli":
        return utility_pauli_binary(p["lambda"], g0)
    if kind == "amplitude_damping":
        return utility_ampdamp_binary(p["eta"], g0)
    if kind == "shifted_depolarizing":
        return utility_shifted_depolarizing_binary(p["lambda"], ch.label["sigma"], g0)
    if kind == "depolarizing":
        return utility_depolarizing_binary(p["lambda"], p["d"], g0)
    if kind == "cloning_1to2":
        return utility_cloning_binary(p["d"], g0)
    return None


def closed_form(ch, game):
    """Dispatch on the channel label and game shape; ``None`` when no formula applies."""
    game = as_game(game)
    kind, p = ch.kind, ch.params
    if kind in ("identity", "unitary"):
        return utility_identity(game, p["d"])
    if kind == "dephasing":
        return utility_dephasing(p["lambda"], game, p["d"], ch.label.get("basis"))
    if kind == "trace_class":
        return utility_trace_class(game, p["d"], ch.dout)
    if kind == "erasure":
        return utility_erasure(p["lambda"], game, p["d"])
    if kind == "qc":
        return utility_qc(ch.label["povm"], game)
    if kind == "depolarizing":
        sums = column_sums(game)
        if np.ptp(sums) <= tol.UNBIASED_ATOL:
            return utility_depolarizing_unbiased(p["lambda"], game, p["d"])
    if game.m == 2:
        red = reduce_binary_output(game)
        if red.trivial:
            return UtilityResult(red.b, provenance="binary:trivial-game")
        inner = binary_game_value(ch, red.g0)
        if inner is None:
            return None
        enc = None
        if inner.encoding is not None:
            # inputs favouring answer 0 share rho_0, the rest share rho_1
            g = game.g
            enc = [inner.encoding[0] if g[x, 0] >= g[x, 1] else inner.encoding[1] for x in range(game.n)]
        return UtilityResult(red.lift(inner.value), enc, inner.decoding, inner.provenance + "+reduction",
                             {"a": red.a, "b": red.b, "g0": red.g0})
    return None

