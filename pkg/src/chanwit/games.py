"""Communication games and the transformations that act on them.

A game is the real ``n x m`` matrix ``g[x, y] = p_x * u[x, y]``: the payoff
mass collected when the referee's input is ``x`` and Bob answers ``y``.
Games with the same ``g`` have the same average payoff for every strategy,
so the prior is always folded in.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import tolerances as tol
from .matcore import ValidationError


@dataclass(frozen=True)
class Game:
    g: np.ndarray

    def __post_init__(self):
        g = np.array(self.g, dtype=float)
        if g.ndim != 2 or g.shape[0] < 1 or g.shape[1] < 1:
            raise ValidationError(f"game must be a non-empty n x m matrix, got shape {g.shape}")
        if not np.all(np.isfinite(g)):
            raise ValidationError("game entries must be finite")
        g.setflags(write=False)
        object.__setattr__(self, "g", g)

    @property
    def n(self):
        return self.g.shape[0]

    @property
    def m(self):
        return self.g.shape[1]

    def to_json(self):
        return {"g": self.g.tolist()}


@dataclass(frozen=True)
class BinaryReduction:
    """``U(C, g) = a * U(C, diag(g0, 1 - g0)) + b`` for every channel C.

    ``g0`` is ``None`` for a trivial game (``a == 0``), whose utility is the
    constant ``b`` regardless of the channel.
    """

    a: float
    b: float
    g0: Optional[float]

    @property
    def trivial(self):
        return self.g0 is None

    def reduced_game(self):
        if self.trivial:
            raise ValidationError("trivial game has no reduced discrimination game")
        return binary_discrimination(self.g0)

    def lift(self, reduced_value):
        """Map the utility of the reduced game back to the original one."""
        if self.trivial:
            return self.b
        return self.a * reduced_value + self.b


def as_game(g):
    return g if isinstance(g, Game) else Game(g)


def discrimination(gdiag):
    return Game(np.diag(np.asarray(gdiag, dtype=float)))


def binary_discrimination(g0):
    return Game(np.diag([g0, 1.0 - g0]))


def game_from_prior_payoff(p, u):
    p = np.asarray(p, dtype=float)
    u = np.asarray(u, dtype=float)
    if p.ndim != 1 or u.ndim != 2 or u.shape[0] != p.shape[0]:
        raise ValidationError(f"prior of length {p.shape} incompatible with payoff of shape {u.shape}")
    if np.any(p < 0) or abs(p.sum() - 1.0) > tol.PROB_ATOL:
        raise ValidationError(f"invalid prior: entries must be >= 0 and sum to 1 (sum = {p.sum():.15g})")
    return Game(p[:, None] * u)


def affine_transform(game, alpha, beta):
    """Return ``alpha * (g[x, y] + beta[x])``.

    The utility of the result is ``alpha * (U(C, g) + sum(beta))`` and is
    attained by the same strategy.
    """
    game = as_game(game)
    if alpha < 0:
        raise ValidationError(f"alpha must be nonnegative, got {alpha}")
    beta = np.broadcast_to(np.asarray(beta, dtype=float), (game.n,))
    return Game(alpha * (game.g + beta[:, None]))


def upper_bound(game):
    return float(np.sum(np.max(as_game(game).g, axis=1)))


def column_sums(game):
    return np.sum(as_game(game).g, axis=0)


def is_unbiased(game, atol=tol.UNBIASED_ATOL):
    return bool(np.all(np.abs(column_sums(game)) <= atol))


def reduce_binary_output(game):
    """Reduce a two-output game to ``diag(g0, 1 - g0)`` plus an affine map.

    Uses the step convention Theta(0) = 1; rows with equal entries add 0
    to ``a`` and to the numerator of ``g0`` either way.
    """
    game = as_game(game)
    if game.m != 2:
        raise ValidationError(f"binary-output reduction needs m = 2, got m = {game.m}")
    diff = game.g[:, 0] - game.g[:, 1]
    a = float(np.sum(np.abs(diff)))
    if a == 0.0:
        return BinaryReduction(a=0.0, b=float(np.sum(game.g[:, 0])), g0=None)
    b = float(np.sum(np.min(game.g, axis=1)))
    g0 = float(np.sum(diff * (diff >= 0))) / a
    return BinaryReduction(a=a, b=b, g0=g0)


def normalize_to_nonneg(game):
    """Shift each row so its minimum is zero.

    Returns ``(shifted, alpha, offset)`` with ``alpha == 1``; the original
    utility is ``U(C, shifted) - offset``.
    """
    game = as_game(game)
    beta = -np.min(game.g, axis=1)
    return affine_transform(game, 1.0, beta), 1.0, float(np.sum(beta))


def game_from_json(obj):
    if "g" in obj:
        return Game(obj["g"])
    if "p" in obj and "u" in obj:
        return game_from_prior_payoff(obj["p"], obj["u"])
    raise ValidationError("game JSON needs either 'g' or both 'p' and 'u'")
