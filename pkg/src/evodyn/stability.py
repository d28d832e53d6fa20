"""Numerical stability predicates and Lyapunov traces along trajectories.

The point checks return signed margins (positive means the stability
inequality holds at that state); the trace utilities evaluate a divergence to
a target along a trajectory and classify its discrete derivative.  Everything
here is a falsifier-style numerical check, not a proof.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .dynamics import Trajectory, common_times
from .errors import DomainError, EvodynError
from .escorts import (EscortLike, EscortSpec, escort_weights, kl_divergence,
                      q_divergence, escort_divergence)
from .incentives import IncentiveSpec, evaluate_incentive
from .metrics import MetricField, metric_divergence
from .simplex import FitnessLandscape, as_state

MONOTONE_TOL = 1e-10
_STRICT = 1e-12


def ess_check(landscape: FitnessLandscape, cand, x) -> float:
    """ESS margin (cand - x) . f(x); positive means cand earns more against x."""
    cv, xv = as_state(cand), as_state(x)
    return float((cv - xv) @ landscape(xv))


def iss_check(incentive: IncentiveSpec, cand, x) -> float:
    """Incentive-stability margin sum_i cand_i phi_i(x)/x_i - sum_i phi_i(x)."""
    cv, xv = as_state(cand), as_state(x)
    if np.any(xv <= 0.0):
        raise DomainError("incentive-stability check needs a strictly interior state")
    phi = evaluate_incentive(incentive, xv)
    return float(cv @ (phi / xv) - phi.sum())


def eiss_check(incentive: IncentiveSpec, escort: EscortLike, cand, x) -> float:
    """Escort-weighted stability margin sum_i (cand_i - x_i) phi_i(x)/esc_i(x_i)."""
    cv, xv = as_state(cand), as_state(x)
    w = escort_weights(escort, xv)
    if np.any(w <= 0.0):
        raise DomainError("escort weights must be positive at the evaluation state")
    phi = evaluate_incentive(incentive, xv)
    return float((cv - xv) @ (phi / w))


def g_iss_check(incentive: IncentiveSpec, metric: MetricField, cand, x) -> float:
    """Metric-weighted stability margin phi(x) . G(x) (cand - x)."""
    cv, xv = as_state(cand), as_state(x)
    phi = evaluate_incentive(incentive, xv)
    g = metric.matrix_at(xv)
    return float(phi @ (g @ (cv - xv)))


# -- divergence selection --------------------------------------------------

DivergenceLike = Union[str, Tuple[str, float], EscortSpec, Sequence[EscortSpec], MetricField]


def make_divergence(spec: DivergenceLike) -> Tuple[str, Callable]:
    """Resolve a divergence spec to (name, fn(target, x) -> float).

    Accepts "kl", "q:<value>" (or a ("q", value) pair), an escort spec or
    per-coordinate escort vector, or a metric field.
    """
    if isinstance(spec, str):
        if spec == "kl":
            return "kl", kl_divergence
        if spec.startswith("q:"):
            v = float(spec[2:])
            return f"q{v:g}_divergence", lambda t, x: q_divergence(v, t, x)
        raise DomainError(f"unknown divergence {spec!r}")
    if isinstance(spec, tuple) and len(spec) == 2 and spec[0] == "q":
        v = float(spec[1])
        return f"q{v:g}_divergence", lambda t, x: q_divergence(v, t, x)
    if isinstance(spec, MetricField):
        return "metric_divergence", lambda t, x: metric_divergence(spec, t, x)
    if isinstance(spec, EscortSpec) or (
        isinstance(spec, (tuple, list)) and all(isinstance(e, EscortSpec) for e in spec)
    ):
        if isinstance(spec, EscortSpec) and spec.kind == "power":
            name = f"q{spec.q:g}_divergence"
        else:
            name = "escort_divergence"
        return name, lambda t, x: escort_divergence(spec, t, x)
    raise DomainError(f"cannot interpret divergence spec {spec!r}")


VERDICTS = ("monotone_decreasing", "locally_decreasing", "non_monotone")


@dataclass
class LyapunovTrace:
    """Divergence-to-target values along a trajectory and their classification."""

    times: np.ndarray
    values: np.ndarray
    delta_derivatives: np.ndarray
    verdict: str
    flagged: List[int] = field(default_factory=list)
    tol: float = MONOTONE_TOL


def _classify(deltas: np.ndarray, tol: float, tail_fraction: float) -> str:
    finite = deltas[np.isfinite(deltas)]
    if finite.size == 0:
        return "monotone_decreasing"
    if np.all(finite <= tol):
        return "monotone_decreasing"
    tail = deltas[int(round(len(deltas) * (1.0 - tail_fraction))):]
    tail = tail[np.isfinite(tail)]
    if tail.size and np.all(tail <= tol):
        return "locally_decreasing"
    return "non_monotone"


def lyapunov_trace(traj: Trajectory, divergence: DivergenceLike, target,
                   tol: float = MONOTONE_TOL, tail_fraction: float = 0.5) -> LyapunovTrace:
    """Evaluate D(target, x_k) along the trajectory and classify its deltas.

    Samples where the divergence is undefined are flagged and excluded from
    the verdict rather than failing the whole trace.
    """
    _, fn = make_divergence(divergence)
    tv = as_state(target)
    values = np.empty(len(traj))
    flagged: List[int] = []
    for k, x in enumerate(traj.states):
        try:
            values[k] = fn(tv, x)
        except EvodynError:
            values[k] = np.nan
            flagged.append(k)
    dt = np.diff(traj.times)
    deltas = np.diff(values) / dt
    return LyapunovTrace(
        times=traj.times.copy(), values=values, delta_derivatives=deltas,
        verdict=_classify(deltas, tol, tail_fraction), flagged=flagged, tol=tol,
    )


def multipop_lyapunov_trace(trajectories: Sequence[Trajectory],
                            divergences: Sequence[DivergenceLike],
                            targets: Sequence,
                            tol: float = MONOTONE_TOL,
                            tail_fraction: float = 0.5) -> LyapunovTrace:
    """Summed divergence over populations, sampled on the shared time grid.

    Populations on different clocks are compared at the intersection of their
    time scales.
    """
    ts, indices = common_times(trajectories)
    if ts.size < 2:
        raise DomainError("populations share fewer than two sample times")
    total = np.zeros(ts.size)
    flagged: List[int] = []
    for p, (traj, div, target) in enumerate(zip(trajectories, divergences, targets)):
        _, fn = make_divergence(div)
        tv = as_state(target)
        for row, i in enumerate(indices[p]):
            try:
                total[row] += fn(tv, traj.states[i])
            except EvodynError:
                total[row] = np.nan
                if row not in flagged:
                    flagged.append(row)
    dt = np.diff(ts)
    deltas = np.diff(total) / dt
    return LyapunovTrace(
        times=ts, values=total, delta_derivatives=deltas,
        verdict=_classify(deltas, tol, tail_fraction), flagged=flagged, tol=tol,
    )


# -- region scans -----------------------------------------------------------


def simplex_grid(resolution: int) -> np.ndarray:
    """Strictly interior triangular lattice on the 3-simplex.

    Resolution r yields the interior lattice points with denominator r+2,
    i.e. r(r+1)/2 points arranged in r rows; r=2 gives the minimal
    three-point grid.
    """
    if resolution < 2:
        raise DomainError(f"need resolution >= 2, got {resolution}")
    den = resolution + 2
    pts = [
        (i / den, j / den, (den - i - j) / den)
        for i in range(1, den)
        for j in range(1, den - i)
        if den - i - j >= 1
    ]
    return np.array(pts)


def region_scan(incentive: IncentiveSpec, cand, resolution: int,
                predicate: str = "iss",
                escort: Optional[EscortLike] = None,
                metric: Optional[MetricField] = None,
                landscape: Optional[FitnessLandscape] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Evaluate a stability margin on an interior grid; returns (points, values)."""
    cv = as_state(cand)
    if cv.size != 3:
        raise DomainError("region scans are defined for 3-strategy games")
    pts = simplex_grid(resolution)
    if predicate == "iss":
        fn = lambda x: iss_check(incentive, cv, x)
    elif predicate == "eiss":
        if escort is None:
            raise DomainError("eiss scan needs an escort")
        fn = lambda x: eiss_check(incentive, escort, cv, x)
    elif predicate == "giss":
        if metric is None:
            raise DomainError("giss scan needs a metric")
        fn = lambda x: g_iss_check(incentive, metric, cv, x)
    elif predicate == "ess":
        f = landscape if landscape is not None else incentive.landscape
        fn = lambda x: ess_check(f, cv, x)
    else:
        raise DomainError(f"unknown predicate {predicate!r}")
    vals = np.array([fn(p) for p in pts])
    return pts, vals


# -- incentive classification ------------------------------------------------


@dataclass
class IncentiveClassification:
    payoff_positive: bool
    weakly_payoff_positive: bool
    payoff_monotone: bool
    aggregate_monotone: bool
    counterexamples: Dict[str, np.ndarray] = field(default_factory=dict)

    def flags(self) -> Dict[str, bool]:
        return {
            "payoff_positive": self.payoff_positive,
            "weakly_payoff_positive": self.weakly_payoff_positive,
            "payoff_monotone": self.payoff_monotone,
            "aggregate_monotone": self.aggregate_monotone,
        }


def classify_incentive(incentive: IncentiveSpec, landscape: FitnessLandscape,
                       samples: int = 10000, seed: int = 0,
                       tol: float = _STRICT) -> IncentiveClassification:
    """Sampling-based check of the growth-rate ordering properties.

    Draws interior states (and per-state mixed-strategy pairs) and tests the
    defining inequalities; a False flag comes with a recorded counterexample.
    This falsifies, it does not prove.
    """
    rng = np.random.default_rng(seed)
    n = None
    probe = landscape
    flags = {"payoff_positive": True, "weakly_payoff_positive": True,
             "payoff_monotone": True, "aggregate_monotone": True}
    cx: Dict[str, np.ndarray] = {}

    for _ in range(samples):
        if n is None:
            # infer dimension from a barycenter probe
            for dim in range(2, 64):
                try:
                    probe(np.full(dim, 1.0 / dim))
                    n = dim
                    break
                except (ValueError, TypeError):
                    continue
            if n is None:
                raise DomainError("could not infer landscape dimension")
        x = rng.dirichlet(np.ones(n))
        if np.any(x < 1e-9):
            continue
        f = probe(x)
        fbar = float(x @ f)
        r = evaluate_incentive(incentive, x) / x
        a = f - fbar

        if flags["payoff_positive"]:
            for i in range(n):
                if a[i] > tol and not (r[i] > tol):
                    flags["payoff_positive"] = False
                elif a[i] < -tol and r[i] > tol:
                    flags["payoff_positive"] = False
                if not flags["payoff_positive"]:
                    cx.setdefault("payoff_positive", x)
                    break
        if flags["weakly_payoff_positive"]:
            above = a > tol
            if np.any(above) and not np.any(above & (r > tol)):
                flags["weakly_payoff_positive"] = False
                cx.setdefault("weakly_payoff_positive", x)
        if flags["payoff_monotone"]:
            done = False
            for i in range(n):
                for j in range(i + 1, n):
                    if abs(f[i] - f[j]) <= tol:
                        continue
                    if (f[i] > f[j]) != (r[i] > r[j]):
                        flags["payoff_monotone"] = False
                        cx.setdefault("payoff_monotone", x)
                        done = True
                        break
                if done:
                    break
        if flags["aggregate_monotone"]:
            y = rng.dirichlet(np.ones(n))
            z = rng.dirichlet(np.ones(n))
            lhs = float((y - z) @ f)
            rhs = float((y - z) @ r)
            if abs(lhs) > tol and (lhs > 0) != (rhs > 0):
                flags["aggregate_monotone"] = False
                cx.setdefault("aggregate_monotone", x)
        if not any(flags.values()):
            break

    return IncentiveClassification(counterexamples=cx, **flags)


# -- convergence and neighborhood reports ------------------------------------


def convergence_detect(traj: Trajectory, target, eps: float) -> Optional[int]:
    """First step whose distance to target is <= eps with the whole tail <= 2 eps.

    Returns the step index, or None when the trajectory never settles.
    """
    if eps <= 0:
        raise DomainError(f"need eps > 0, got {eps}")
    tv = as_state(target)
    d = np.linalg.norm(traj.states - tv, axis=1)
    # suffix maxima: tail_max[k] = max(d[k:])
    tail_max = np.maximum.accumulate(d[::-1])[::-1]
    ok = (d <= eps) & (tail_max <= 2.0 * eps)
    hits = np.flatnonzero(ok)
    return int(hits[0]) if hits.size else None


@dataclass
class StabilityReport:
    """Sampled neighborhood verdict for one stability predicate."""

    predicate: str
    candidate: np.ndarray
    radius: float
    samples: int
    fraction_satisfied: float
    min_margin: float


def neighborhood_report(predicate: str, margin_fn: Callable, cand,
                        radius: float = 0.1, samples: int = 500,
                        seed: int = 0) -> StabilityReport:
    """Sample interior states within `radius` of cand and evaluate the margin.

    States are Dirichlet-uniform on the simplex, rejected outside the ball.
    """
    if samples < 1:
        raise DomainError("need samples >= 1")
    rng = np.random.default_rng(seed)
    cv = as_state(cand)
    n = cv.size
    margins = []
    attempts = 0
    while len(margins) < samples and attempts < samples * 1000:
        attempts += 1
        x = rng.dirichlet(np.ones(n))
        if np.any(x <= 1e-12) or np.linalg.norm(x - cv) > radius:
            continue
        margins.append(margin_fn(x))
    if not margins:
        raise DomainError("no interior samples found inside the requested ball")
    m = np.array(margins)
    return StabilityReport(
        predicate=predicate, candidate=cv, radius=radius, samples=len(m),
        fraction_satisfied=float(np.mean(m > 0.0)), min_margin=float(m.min()),
    )
