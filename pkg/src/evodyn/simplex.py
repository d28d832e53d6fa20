"""States on the probability simplex, game matrices, and fitness landscapes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, EvaluationError

DEFAULT_TOL = 1e-9


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class SimplexPoint:
    """A population state: nonnegative coordinates summing to one.

    Coordinates exactly at 0 are legal (boundary faces are valid states).
    Construction rejects points outside tolerance instead of renormalizing;
    handling trajectories that leave the simplex is the engine's job.
    """

    coords: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coords, dtype=float))
        if c.ndim != 1 or c.size < 2:
            raise DomainError(f"simplex point needs >= 2 coordinates, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise DomainError("simplex point has non-finite coordinates")
        if np.any(c < -self.tol):
            raise DomainError(f"coordinate below -tol: min={c.min():.3e}, tol={self.tol:.1e}")
        s = float(c.sum())
        if abs(s - 1.0) > self.tol:
            raise DomainError(f"coordinates sum to {s!r}, not 1 within tol={self.tol:.1e}")
        object.__setattr__(self, "coords", _freeze(c.copy()))

    @property
    def n(self) -> int:
        return self.coords.size

    def __array__(self, dtype=None):
        return np.asarray(self.coords, dtype=dtype)


def as_state(x) -> np.ndarray:
    """Coerce a SimplexPoint or array-like to a plain float vector."""
    if isinstance(x, SimplexPoint):
        return np.asarray(x.coords, dtype=float)
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class GameMatrix:
    """Square payoff matrix; entry [i, j] is the payoff to i against j."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError(f"game matrix must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise DomainError("game matrix has non-finite entries")
        object.__setattr__(self, "entries", _freeze(a.copy()))

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class FitnessLandscape:
    """Per-strategy fitness as a function of the population state."""

    kind: str
    evaluator: Callable[[np.ndarray], np.ndarray]
    tag: str = ""

    @staticmethod
    def linear(a: GameMatrix) -> "FitnessLandscape":
        if not isinstance(a, GameMatrix):
            a = GameMatrix(a)
        m = a.entries
        return FitnessLandscape("linear", lambda x: m @ x)

    @staticmethod
    def constant(c) -> "FitnessLandscape":
        c = _freeze(np.array(c, dtype=float))
        return FitnessLandscape("constant", lambda x: c.copy())

    @staticmethod
    def custom(tag: str, fn: Callable[[np.ndarray], np.ndarray]) -> "FitnessLandscape":
        return FitnessLandscape("custom", fn, tag=tag)

    def __call__(self, x) -> np.ndarray:
        xv = as_state(x)
        f = np.asarray(self.evaluator(xv), dtype=float)
        if f.shape != xv.shape:
            raise DomainError(
                f"landscape returned shape {f.shape} for state of shape {xv.shape}"
            )
        if not np.all(np.isfinite(f)):
            raise EvaluationError("fitness evaluation produced NaN or infinity")
        return f


def rsp_matrix(a: float, b: float) -> GameMatrix:
    """Rock-scissors-paper payoff matrix with win payoff a and loss payoff -b."""
    return GameMatrix(np.array([
        [0.0, -b, a],
        [a, 0.0, -b],
        [-b, a, 0.0],
    ]))


def linear_fitness(a: GameMatrix, x) -> np.ndarray:
    """Payoff vector A @ x."""
    m = a.entries if isinstance(a, GameMatrix) else np.asarray(a, dtype=float)
    xv = as_state(x)
    if m.shape[1] != xv.size:
        raise DomainError(f"matrix is {m.shape}, state has {xv.size} coordinates")
    return m @ xv


def mean_fitness(x, f) -> float:
    """Population-average fitness: sum_i x_i f_i."""
    xv = as_state(x)
    fv = np.asarray(f, dtype=float)
    if xv.shape != fv.shape:
        raise DomainError(f"state has {xv.size} coordinates, fitness has {fv.size}")
    return float(xv @ fv)


def barycenter(n: int, tol: float = DEFAULT_TOL) -> SimplexPoint:
    """The uniform state (1/n, ..., 1/n)."""
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    return SimplexPoint(np.full(n, 1.0 / n), tol=tol)
