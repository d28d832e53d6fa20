"""Escort functions and the information divergences they generate.

An escort is a strictly positive, nondecreasing function on (0, 1]. Its
reciprocal integrates to a generalized logarithm, whose functional inverse is
the matching generalized exponential, and the logarithm in turn defines an
information divergence on the simplex. The power family u**q interpolates
between half the squared Euclidean distance (q=0) and Kullback-Leibler (q=1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import DomainError
from .simplex import as_state

QUAD_ABS_TOL = 1e-10

ESCORT_KINDS = ("power", "scaled", "constant_one", "custom")


@dataclass(frozen=True)
class EscortSpec:
    kind: str
    q: Optional[float] = None
    beta: Optional[float] = None
    fn: Optional[Callable[[float], float]] = None
    tag: str = ""

    def __post_init__(self):
        if self.kind not in ESCORT_KINDS:
            raise DomainError(f"unknown escort kind {self.kind!r}")
        if self.kind == "power" and (self.q is None or self.q < 0):
            raise DomainError("power escort needs q >= 0")
        if self.kind == "scaled" and (self.beta is None or self.beta <= 0):
            raise DomainError("scaled escort needs beta > 0")
        if self.kind == "custom" and self.fn is None:
            raise DomainError("custom escort needs a callable")

    @staticmethod
    def power(q: float) -> "EscortSpec":
        return EscortSpec("power", q=float(q))

    @staticmethod
    def scaled(beta: float) -> "EscortSpec":
        return EscortSpec("scaled", beta=float(beta))

    @staticmethod
    def constant_one() -> "EscortSpec":
        return EscortSpec("constant_one")

    @staticmethod
    def custom(tag: str, fn: Callable[[float], float]) -> "EscortSpec":
        return EscortSpec("custom", fn=fn, tag=tag)

    def value(self, u: float) -> float:
        if self.kind == "power":
            return float(u) ** self.q
        if self.kind == "scaled":
            return self.beta * float(u)
        if self.kind == "constant_one":
            return 1.0
        return float(self.fn(float(u)))


EscortLike = Union[EscortSpec, Sequence[EscortSpec]]


def escort_vector(escort: EscortLike, n: int) -> tuple:
    """Broadcast a single escort (or pass through a per-coordinate sequence)."""
    if isinstance(escort, EscortSpec):
        return (escort,) * n
    escorts = tuple(escort)
    if len(escorts) != n:
        raise DomainError(f"escort vector has {len(escorts)} entries for n={n}")
    return escorts


def escort_weights(escort: EscortLike, x) -> np.ndarray:
    """Evaluate phi_i(x_i) for every coordinate."""
    xv = as_state(x)
    if isinstance(escort, EscortSpec):
        if escort.kind == "power":
            with np.errstate(invalid="raise"):
                try:
                    return np.power(xv, escort.q)
                except FloatingPointError:
                    raise DomainError(
                        f"x**q undefined for negative coordinate, q={escort.q}"
                    ) from None
        if escort.kind == "scaled":
            return escort.beta * xv
        if escort.kind == "constant_one":
            return np.ones_like(xv)
        return np.array([escort.fn(float(u)) for u in xv])
    escorts = escort_vector(escort, xv.size)
    return np.array([e.value(float(u)) for e, u in zip(escorts, xv)])


def _check_positive(u: float, what: str) -> None:
    if u <= 0.0:
        raise DomainError(f"{what} requires a positive argument, got {u!r}")


def escort_log(escort: EscortSpec, x: float) -> float:
    """Generalized logarithm: integral of 1/phi from 1 to x.

    Power escorts with q < 1 extend continuously to x = 0; other kinds
    require x > 0.
    """
    x = float(x)
    if x < 0.0:
        raise DomainError(f"escort log undefined for negative argument {x!r}")
    if escort.kind == "power":
        q = escort.q
        if q == 1.0:
            _check_positive(x, "escort log (q=1)")
            return math.log(x)
        if x == 0.0 and q > 1.0:
            raise DomainError(f"escort log diverges at 0 for q={q}")
        return (x ** (1.0 - q) - 1.0) / (1.0 - q)
    if escort.kind == "scaled":
        _check_positive(x, "escort log (scaled)")
        return math.log(x) / escort.beta
    if escort.kind == "constant_one":
        return x - 1.0
    _check_positive(x, "escort log (custom)")
    val, _ = quad(lambda u: 1.0 / escort.fn(u), 1.0, x, epsabs=QUAD_ABS_TOL, limit=200)
    return val


def escort_exp(escort: EscortSpec, y: float) -> float:
    """Functional inverse of the escort logarithm."""
    y = float(y)
    if escort.kind == "power":
        q = escort.q
        if q == 1.0:
            return math.exp(y)
        base = 1.0 + (1.0 - q) * y
        if base < 0.0:
            raise DomainError(f"y={y!r} outside the range of the q={q} escort log")
        if base == 0.0 and q > 1.0:
            raise DomainError(f"y={y!r} outside the range of the q={q} escort log")
        return base ** (1.0 / (1.0 - q))
    if escort.kind == "scaled":
        return math.exp(escort.beta * y)
    if escort.kind == "constant_one":
        if y < -1.0:
            raise DomainError(f"y={y!r} outside the range of the constant escort log")
        return y + 1.0
    return _invert_log_numerically(escort, y)


def _invert_log_numerically(escort: EscortSpec, y: float) -> float:
    g = lambda u: escort_log(escort, u) - y
    lo, hi = 1.0, 1.0
    for _ in range(2000):
        if g(hi) >= 0.0:
            break
        hi *= 2.0
    else:
        raise DomainError(f"y={y!r} outside the range of the escort log")
    for _ in range(2000):
        if g(lo) <= 0.0:
            break
        lo /= 2.0
        if lo < 1e-300:
            raise DomainError(f"y={y!r} outside the range of the escort log")
    if lo == hi:
        return lo
    return float(brentq(g, lo, hi, xtol=1e-15, rtol=8.9e-16))


# -- divergences ---------------------------------------------------------
#
# Per coordinate the divergence contribution is
#     term(x, y) = A(x) - A(y) - (x - y) * log(y)
# where A is an antiderivative of the escort logarithm.  Closed forms below;
# the quadrature path only ever evaluates phi itself, so it doubles as an
# independent cross-check of the closed forms.


def _term_power(q: float, x: float, y: float) -> float:
    if x < 0.0 or y < 0.0:
        raise DomainError("divergence arguments must be nonnegative")
    if q == 1.0:
        if y == 0.0:
            if x == 0.0:
                return 0.0
            raise DomainError("KL term diverges for y=0, x>0")
        if x == 0.0:
            return y
        return x * math.log(x / y) - x + y
    if q == 2.0:
        if x <= 0.0 or y <= 0.0:
            raise DomainError("q=2 divergence needs strictly positive coordinates")
        return math.log(y / x) + (x - y) / y
    if q > 1.0 and y == 0.0:
        raise DomainError(f"divergence term diverges for y=0 with q={q}")
    if q > 2.0 and x == 0.0:
        raise DomainError(f"divergence term diverges for x=0 with q={q}")
    return ((x ** (2.0 - q) - y ** (2.0 - q)) / (2.0 - q)
            - (x - y) * y ** (1.0 - q)) / (1.0 - q)


def _term_closed(escort: EscortSpec, x: float, y: float) -> float:
    if escort.kind == "power":
        return _term_power(escort.q, x, y)
    if escort.kind == "constant_one":
        return 0.5 * (x - y) ** 2
    if escort.kind == "scaled":
        return _term_power(1.0, x, y) / escort.beta
    raise DomainError("no closed form for custom escorts")


def _term_quadrature(escort: EscortSpec, x: float, y: float) -> float:
    log_y = escort_log(escort, y)
    outer, _ = quad(
        lambda u: escort_log(escort, u) - log_y, y, x,
        epsabs=QUAD_ABS_TOL, limit=200,
    )
    return outer


def escort_divergence(escort: EscortLike, x, y, method: str = "auto") -> float:
    """Divergence of y from x built from the escort logarithm.

    Nonnegative, zero exactly at x == y.  `method="quadrature"` forces the
    numeric path (used as an independent oracle for the closed forms).
    """
    xv, yv = as_state(x), as_state(y)
    if xv.shape != yv.shape:
        raise DomainError("divergence arguments must have equal dimension")
    escorts = escort_vector(escort, xv.size)
    total = 0.0
    for e, xi, yi in zip(escorts, xv, yv):
        if method == "quadrature" or (method == "auto" and e.kind == "custom"):
            total += _term_quadrature(e, float(xi), float(yi))
        else:
            total += _term_closed(e, float(xi), float(yi))
    return total


def q_divergence(q: float, x, y) -> float:
    """The power-escort divergence in closed form.

    q=0 gives half the squared Euclidean distance, q=1 Kullback-Leibler,
    q=2 the log-ratio form; q < 0 is rejected.
    """
    if q < 0:
        raise DomainError(f"q-divergence needs q >= 0, got {q}")
    xv, yv = as_state(x), as_state(y)
    if xv.shape != yv.shape:
        raise DomainError("divergence arguments must have equal dimension")
    if q == 0.0:
        return 0.5 * float(np.sum((xv - yv) ** 2))
    return float(sum(_term_power(float(q), float(a), float(b))
                     for a, b in zip(xv, yv)))


def kl_divergence(x, y) -> float:
    """Kullback-Leibler divergence of y from x (nats)."""
    return q_divergence(1.0, x, y)
