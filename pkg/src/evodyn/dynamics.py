"""Time-scale stepping of incentive dynamics under a chosen geometry.

One step of the core dynamic moves the state by

    x' = x + h * (phi(x) - ghat(x) * sum_j phi_j(x))

where ghat comes from the geometry's inverse metric.  A mutation matrix, when
present, redistributes the incentive before the mean adjustment.  Specialized
steps cover the discrete replicator and best-reply updates, and populations
with distinct incentives, geometries, and step sizes can be advanced jointly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError, EvodynError
from .incentives import IncentiveSpec, best_reply, evaluate_incentive
from .metrics import MetricField, ghat_unchecked
from .simplex import FitnessLandscape, SimplexPoint, as_state, mean_fitness

BOUNDARY_POLICIES = ("record_and_continue", "clip_renormalize", "halt")

EVENT_TOL = 1e-9


@dataclass(frozen=True)
class TimeScaleSpec:
    """Temporal domain of a dynamic.

    uniform      fixed step h in (0, 1]
    variable     named rule ("harmonic": h_k = 1/(k+1); "geometric": h_k = r**k)
                 or an explicit list of step sizes
    continuous   approximated real time: integrator ("euler" or "rk4") at
                 resolution dt
    """

    kind: str
    h: Optional[float] = None
    rule: Optional[str] = None
    ratio: Optional[float] = None
    values: Optional[tuple] = None
    dt: Optional[float] = None
    integrator: str = "rk4"

    def __post_init__(self):
        if self.kind == "uniform":
            if self.h is None or not (0.0 < self.h <= 1.0):
                raise DomainError(f"uniform time scale needs h in (0, 1], got {self.h}")
        elif self.kind == "variable":
            if self.values is not None:
                vals = tuple(float(v) for v in self.values)
                if not vals or any(not (0.0 < v <= 1.0) for v in vals):
                    raise DomainError("explicit step sizes must lie in (0, 1]")
                object.__setattr__(self, "values", vals)
            elif self.rule == "harmonic":
                pass
            elif self.rule == "geometric":
                if self.ratio is None or not (0.0 < self.ratio <= 1.0):
                    raise DomainError("geometric rule needs ratio in (0, 1]")
            else:
                raise DomainError(f"unknown variable-step rule {self.rule!r}")
        elif self.kind == "continuous":
            if self.dt is None or self.dt <= 0.0:
                raise DomainError(f"continuous time scale needs dt > 0, got {self.dt}")
            if self.integrator not in ("euler", "rk4"):
                raise DomainError(f"unknown integrator {self.integrator!r}")
        else:
            raise DomainError(f"unknown time scale kind {self.kind!r}")

    @staticmethod
    def uniform(h: float) -> "TimeScaleSpec":
        return TimeScaleSpec("uniform", h=float(h))

    @staticmethod
    def harmonic() -> "TimeScaleSpec":
        return TimeScaleSpec("variable", rule="harmonic")

    @staticmethod
    def geometric(ratio: float) -> "TimeScaleSpec":
        return TimeScaleSpec("variable", rule="geometric", ratio=float(ratio))

    @staticmethod
    def explicit(values) -> "TimeScaleSpec":
        return TimeScaleSpec("variable", values=tuple(values))

    @staticmethod
    def continuous(dt: float = 1e-3, integrator: str = "rk4") -> "TimeScaleSpec":
        return TimeScaleSpec("continuous", dt=float(dt), integrator=integrator)

    def step_size(self, k: int) -> float:
        if self.kind == "uniform":
            return self.h
        if self.kind == "continuous":
            return self.dt
        if self.values is not None:
            if k >= len(self.values):
                raise DomainError(f"explicit time scale exhausted at step {k}")
            return self.values[k]
        if self.rule == "harmonic":
            return 1.0 / (k + 1)
        return self.ratio ** k


@dataclass(frozen=True)
class DynamicSpec:
    """Incentive + geometry + time scale (+ optional mutation)."""

    incentive: IncentiveSpec
    geometry: MetricField = field(default_factory=MetricField.shahshahani)
    timescale: TimeScaleSpec = field(default_factory=lambda: TimeScaleSpec.uniform(0.01))
    mutation: Optional[np.ndarray] = None
    boundary_policy: str = "record_and_continue"

    def __post_init__(self):
        if self.boundary_policy not in BOUNDARY_POLICIES:
            raise DomainError(f"unknown boundary policy {self.boundary_policy!r}")
        if self.mutation is not None:
            m = np.asarray(self.mutation, dtype=float)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise DomainError("mutation matrix must be square")
            if np.any(m < 0.0) or not np.allclose(m.sum(axis=1), 1.0, atol=1e-12):
                raise DomainError("mutation matrix rows must be nonnegative and sum to 1")
            m = m.copy()
            m.flags.writeable = False
            object.__setattr__(self, "mutation", m)


@dataclass(frozen=True)
class BoundaryEvent:
    step: int
    kind: str
    detail: str = ""


@dataclass
class Trajectory:
    """Ordered (step, time, state) samples plus any boundary events."""

    steps: np.ndarray
    times: np.ndarray
    states: np.ndarray
    events: List[BoundaryEvent]
    spec: DynamicSpec
    truncated: bool = False

    def __len__(self) -> int:
        return self.states.shape[0]

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def vector_field(spec: DynamicSpec, x) -> np.ndarray:
    """Right-hand side of the dynamic at state x (sums to zero)."""
    xv = as_state(x)
    phi = evaluate_incentive(spec.incentive, xv)
    total = float(phi.sum())
    g = ghat_unchecked(spec.geometry, xv)
    if spec.mutation is not None:
        return spec.mutation.T @ phi - g * total
    return phi - g * total


def delta_step(spec: DynamicSpec, x, h: float) -> np.ndarray:
    """One forward step of size h along the dynamic."""
    if not (0.0 < h <= 1.0):
        raise DomainError(f"step size must lie in (0, 1], got {h}")
    xv = as_state(x)
    return xv + h * vector_field(spec, xv)


def _rk4_step(rhs: Callable[[np.ndarray], np.ndarray], x: np.ndarray, dt: float) -> np.ndarray:
    k1 = rhs(x)
    k2 = rhs(x + 0.5 * dt * k1)
    k3 = rhs(x + 0.5 * dt * k2)
    k4 = rhs(x + dt * k3)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def ts_replicator_step(landscape: FitnessLandscape, x, h: float) -> np.ndarray:
    """Discrete replicator step x' = x + h * x_i (f_i - fbar) / fbar.

    Needs fbar(x) > 0; at h=1 this is the classical update x_i f_i / fbar.
    """
    if not (0.0 < h <= 1.0):
        raise DomainError(f"step size must lie in (0, 1], got {h}")
    xv = as_state(x)
    f = landscape(xv)
    fbar = mean_fitness(xv, f)
    if fbar <= 0.0:
        raise DomainError(f"mean fitness must be positive, got {fbar!r}")
    return xv + h * xv * (f - fbar) / fbar


def best_reply_step(landscape: FitnessLandscape, x, h: float,
                    tie_rule: str = "lowest_index") -> np.ndarray:
    """Convex combination (1-h) x + h BR(x); h=1 jumps to the best reply."""
    if not (0.0 < h <= 1.0):
        raise DomainError(f"step size must lie in (0, 1], got {h}")
    xv = as_state(x)
    br = np.asarray(best_reply(xv, landscape(xv), tie_rule))
    return (1.0 - h) * xv + h * br


def _check_state(x: np.ndarray, k: int, events: List[BoundaryEvent],
                 tol: float = EVENT_TOL) -> bool:
    """Record boundary events for the state produced at step k."""
    bad = False
    mn = float(x.min())
    if mn < 0.0:
        events.append(BoundaryEvent(k, "negative_coordinate",
                                    f"x_{int(x.argmin())}={mn:.6e}"))
        bad = True
    drift = abs(float(x.sum()) - 1.0)
    if drift > tol:
        events.append(BoundaryEvent(k, "sum_drift", f"|sum-1|={drift:.3e}"))
        bad = True
    return bad


def run_trajectory(spec: DynamicSpec, x0, steps: int) -> Trajectory:
    """Iterate the dynamic from x0, recording states, times, and events."""
    if steps < 1:
        raise DomainError(f"need steps >= 1, got {steps}")
    start = x0 if isinstance(x0, SimplexPoint) else SimplexPoint(x0)
    x = np.asarray(start.coords, dtype=float).copy()
    n = x.size

    ts = spec.timescale
    continuous = ts.kind == "continuous"
    rhs = (lambda y: vector_field(spec, y)) if continuous else None

    states = [x.copy()]
    times = [0.0]
    steps_idx = [0]
    events: List[BoundaryEvent] = []
    truncated = False
    t = 0.0

    for k in range(steps):
        h = ts.step_size(k)
        try:
            if continuous and ts.integrator == "rk4":
                x_next = _rk4_step(rhs, x, h)
            else:
                x_next = x + h * vector_field(spec, x)
        except EvodynError as exc:
            events.append(BoundaryEvent(k, "evaluation_error", str(exc)))
            truncated = True
            break

        bad = _check_state(x_next, k + 1, events)
        if bad:
            if spec.boundary_policy == "halt":
                events.append(BoundaryEvent(k + 1, "halted"))
                truncated = True
                break
            if spec.boundary_policy == "clip_renormalize":
                x_next = np.clip(x_next, 0.0, None)
                x_next /= x_next.sum()

        x = x_next
        if ts.kind == "variable":
            t += h
        else:
            t = (k + 1) * h
        states.append(x.copy())
        times.append(t)
        steps_idx.append(k + 1)

    return Trajectory(
        steps=np.array(steps_idx, dtype=int),
        times=np.array(times, dtype=float),
        states=np.array(states, dtype=float),
        events=events,
        spec=spec,
        truncated=truncated,
    )


@dataclass(frozen=True)
class MultiPopSpec:
    """Several populations, each with its own incentive, geometry, and clock.

    coupling="independent" lets every population read only its own state; a
    callable coupling(states, alpha) -> fitness vector overrides the fitness
    each population sees, allowing cross-population games.
    """

    populations: Tuple[DynamicSpec, ...]
    coupling: Union[str, Callable] = "independent"

    def __post_init__(self):
        pops = tuple(self.populations)
        if not pops:
            raise DomainError("need at least one population")
        object.__setattr__(self, "populations", pops)
        if self.coupling != "independent" and not callable(self.coupling):
            raise DomainError("coupling must be 'independent' or a callable")


def _coupled_spec(mp: MultiPopSpec, states: Sequence[np.ndarray], alpha: int) -> DynamicSpec:
    pop = mp.populations[alpha]
    if mp.coupling == "independent":
        return pop
    f = np.asarray(mp.coupling([np.array(s) for s in states], alpha), dtype=float)
    pinned = FitnessLandscape.constant(f)
    inc = IncentiveSpec(pop.incentive.kind, pinned, q=pop.incentive.q,
                        eta=pop.incentive.eta, tie_rule=pop.incentive.tie_rule)
    return DynamicSpec(inc, pop.geometry, pop.timescale, pop.mutation,
                       pop.boundary_policy)


def multipop_step(mp: MultiPopSpec, states: Sequence, k: int) -> List[np.ndarray]:
    """Advance every population by one of its own steps (step index k)."""
    if len(states) != len(mp.populations):
        raise DomainError("one state per population required")
    out = []
    for alpha, x in enumerate(states):
        spec = _coupled_spec(mp, states, alpha)
        h = spec.timescale.step_size(k)
        out.append(delta_step(spec, x, h))
    return out


def run_multipop(mp: MultiPopSpec, x0s: Sequence, steps: int) -> List[Trajectory]:
    """Advance all populations jointly for `steps` of their own clocks."""
    if steps < 1:
        raise DomainError(f"need steps >= 1, got {steps}")
    if mp.coupling == "independent":
        return [run_trajectory(pop, x0, steps)
                for pop, x0 in zip(mp.populations, x0s)]
    states = [np.asarray(SimplexPoint(x).coords if not isinstance(x, SimplexPoint) else x.coords,
                         dtype=float).copy() for x in x0s]
    per_pop_states = [[s.copy()] for s in states]
    times = [[0.0] for _ in states]
    for k in range(steps):
        states = multipop_step(mp, states, k)
        for alpha, s in enumerate(states):
            per_pop_states[alpha].append(np.array(s))
            h = mp.populations[alpha].timescale.step_size(k)
            times[alpha].append(times[alpha][-1] + h)
    trajs = []
    for alpha, pop in enumerate(mp.populations):
        arr = np.array(per_pop_states[alpha])
        tarr = np.array(times[alpha])
        trajs.append(Trajectory(
            steps=np.arange(arr.shape[0]), times=tarr, states=arr,
            events=[], spec=pop,
        ))
    return trajs


def common_times(trajectories: Sequence[Trajectory], decimals: int = 9):
    """Sample times shared by every trajectory (intersection of the clocks).

    Returns (times, indices) where indices[a] gives, for each common time,
    the sample index into trajectory a.
    """
    keyed = [
        {round(float(t), decimals): i for i, t in enumerate(traj.times)}
        for traj in trajectories
    ]
    shared = set(keyed[0])
    for d in keyed[1:]:
        shared &= set(d)
    ts = sorted(shared)
    indices = [np.array([d[t] for t in ts], dtype=int) for d in keyed]
    return np.array(ts), indices


def uniform_mutation_matrix(n: int, eps: float) -> np.ndarray:
    """(1-eps) I + eps/(n-1) (ones - I): keep with prob 1-eps, else mutate uniformly."""
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    if not (0.0 <= eps <= 1.0):
        raise DomainError(f"mutation rate must lie in [0, 1], got {eps}")
    return (1.0 - eps) * np.eye(n) + (eps / (n - 1)) * (np.ones((n, n)) - np.eye(n))
