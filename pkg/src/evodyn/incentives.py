"""Incentive functions: the per-strategy adjustment rules that generate dynamics.

Each incentive maps a state to a vector of selection pressures. Combined with
a geometry and a time scale (see `dynamics`), an incentive induces a dynamic
whose mean-adjustment term keeps trajectories on the simplex.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, EvaluationError
from .simplex import FitnessLandscape, SimplexPoint, as_state

INCENTIVE_KINDS = (
    "replicator",
    "q_replicator",
    "best_reply",
    "logit",
    "projection",
    "fitness_only",
)

TIE_RULES = ("lowest_index", "uniform_mix")

# ties in best-reply payoffs are detected up to this absolute slack
_TIE_EPS = 1e-12


@dataclass(frozen=True)
class IncentiveSpec:
    """Selection rule plus the fitness landscape it reads.

    kinds:
      replicator    x_i * (f_i - fbar)          (zero-sum form)
      q_replicator  x_i**q * f_i                (q >= 0; q=1 is fitness-proportional)
      best_reply    BR_i(x) - x_i
      logit         exp(f_i/eta) / sum_j exp(f_j/eta)   (eta > 0)
      projection    f_i - mean over the active support, 0 off it
      fitness_only  f_i
    """

    kind: str
    landscape: FitnessLandscape
    q: Optional[float] = None
    eta: Optional[float] = None
    tie_rule: str = "lowest_index"

    def __post_init__(self):
        if self.kind not in INCENTIVE_KINDS:
            raise DomainError(f"unknown incentive kind {self.kind!r}")
        if self.kind == "q_replicator":
            if self.q is None or self.q < 0:
                raise DomainError("q_replicator needs q >= 0")
        if self.kind == "logit":
            if self.eta is None or self.eta <= 0:
                raise DomainError("logit needs eta > 0")
        if self.tie_rule not in TIE_RULES:
            raise DomainError(f"unknown tie rule {self.tie_rule!r}")


def best_reply(x, f, tie_rule: str = "lowest_index") -> SimplexPoint:
    """Best reply to the payoff vector f: a vertex, or the uniform mix over ties."""
    xv = as_state(x)
    fv = np.asarray(f, dtype=float)
    if not np.all(np.isfinite(fv)):
        raise EvaluationError("best reply needs finite payoffs")
    if tie_rule not in TIE_RULES:
        raise DomainError(f"unknown tie rule {tie_rule!r}")
    top = fv.max()
    winners = np.flatnonzero(fv >= top - _TIE_EPS)
    out = np.zeros_like(xv)
    if tie_rule == "lowest_index":
        out[winners[0]] = 1.0
    else:
        out[winners] = 1.0 / winners.size
    return SimplexPoint(out)


def projection_support(f: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Active strategy set for the projection incentive.

    Starts from the support of x and greedily adds outside strategies in
    descending payoff order while doing so raises the set's average payoff.
    On interior states this is every strategy.
    """
    in_support = x > 0.0
    if not np.any(in_support):
        raise DomainError("state has empty support")
    total = float(f[in_support].sum())
    count = int(in_support.sum())
    outside = np.flatnonzero(~in_support)
    for j in outside[np.argsort(-f[outside], kind="stable")]:
        if f[j] > total / count:
            in_support[j] = True
            total += float(f[j])
            count += 1
        else:
            break
    return in_support


def _softmax(z: np.ndarray) -> np.ndarray:
    w = np.exp(z - z.max())
    return w / w.sum()


def evaluate_incentive(spec: IncentiveSpec, x) -> np.ndarray:
    """The incentive vector phi(x) for the given spec."""
    xv = as_state(x)
    f = spec.landscape(xv)

    if spec.kind == "replicator":
        return xv * (f - float(xv @ f))
    if spec.kind == "q_replicator":
        with np.errstate(invalid="raise"):
            try:
                w = np.power(xv, spec.q)
            except FloatingPointError:
                raise EvaluationError(
                    f"x**q undefined for negative coordinate with q={spec.q}"
                ) from None
        return w * f
    if spec.kind == "best_reply":
        return np.asarray(best_reply(xv, f, spec.tie_rule)) - xv
    if spec.kind == "logit":
        return _softmax(f / spec.eta)
    if spec.kind == "projection":
        active = projection_support(f, xv)
        phi = np.zeros_like(xv)
        phi[active] = f[active] - f[active].mean()
        return phi
    # fitness_only
    return f


def effective_landscape(spec: IncentiveSpec, x) -> np.ndarray:
    """phi_i(x) / x_i: the landscape whose replicator dynamic equals this incentive dynamic.

    Only defined on the interior; a zero coordinate is a domain error.
    """
    xv = as_state(x)
    if np.any(xv <= 0.0):
        raise DomainError("effective landscape needs a strictly interior state")
    return evaluate_incentive(spec, xv) / xv


def zero_sum_reduce(spec: IncentiveSpec, x) -> np.ndarray:
    """phi(x) - x * sum_j phi_j(x): the zero-sum representative of the incentive."""
    xv = as_state(x)
    phi = evaluate_incentive(spec, xv)
    return phi - xv * float(phi.sum())
