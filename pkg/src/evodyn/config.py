"""Scenario configuration: schema, validation, and assembly into engine specs.

Configs are plain JSON documents.  Validation accumulates problems with their
field paths so the CLI can report all of them at once (exit code 2).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from typing import List, Optional, Union

import numpy as np

from .dynamics import DynamicSpec, TimeScaleSpec, uniform_mutation_matrix
from .errors import ConfigError, EvodynError
from .escorts import EscortSpec
from .incentives import INCENTIVE_KINDS, TIE_RULES, IncentiveSpec
from .metrics import MetricField
from .simplex import FitnessLandscape, GameMatrix, SimplexPoint, rsp_matrix

BOUNDARY_POLICIES = ("record_and_continue", "clip_renormalize", "halt")
GEOMETRY_KINDS = ("shahshahani", "euclidean", "power_escort", "scaled", "constant")
TIMESCALE_KINDS = ("uniform", "harmonic", "explicit", "continuous")


@dataclass
class MatrixConfig:
    kind: str                       # "rsp" | "rows"
    a: Optional[float] = None
    b: Optional[float] = None
    rows: Optional[list] = None


@dataclass
class IncentiveConfig:
    kind: str
    q: Optional[float] = None
    eta: Optional[float] = None
    tie_rule: str = "lowest_index"


@dataclass
class GeometryConfig:
    kind: str
    q: Optional[float] = None
    beta: Optional[float] = None
    rows: Optional[list] = None


@dataclass
class TimescaleConfig:
    kind: str
    h: Optional[float] = None
    values: Optional[list] = None
    dt: Optional[float] = None
    integrator: str = "rk4"


@dataclass
class PopulationConfig:
    n: int
    matrix: MatrixConfig
    incentive: IncentiveConfig
    geometry: GeometryConfig
    timescale: TimescaleConfig
    x0: list = field(default_factory=list)
    mutation_epsilon: Optional[float] = None


@dataclass
class ScenarioConfig:
    populations: List[PopulationConfig]
    steps: int
    divergences: List[str] = field(default_factory=list)
    target: Union[str, list] = "barycenter"
    boundary_policy: str = "record_and_continue"
    output: str = "scenario"
    epsilon: float = 0.05

    def to_dict(self) -> dict:
        d = asdict(self)
        for p in d["populations"]:
            for key in ("matrix", "incentive", "geometry", "timescale"):
                p[key] = {k: v for k, v in p[key].items() if v is not None}
            if p["mutation_epsilon"] is None:
                del p["mutation_epsilon"]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _get(d: dict, key: str, path: str, problems: list, required=True, default=None):
    if key not in d:
        if required:
            problems.append(f"{path}.{key}: missing")
        return default
    return d[key]


def _subdict(d, path, problems) -> dict:
    if not isinstance(d, dict):
        problems.append(f"{path}: expected an object")
        return {}
    return d


def _parse_matrix(d, path, problems) -> MatrixConfig:
    d = _subdict(d, path, problems)
    kind = _get(d, "kind", path, problems, default="")
    if kind == "rsp":
        a = _get(d, "a", path, problems)
        b = _get(d, "b", path, problems)
        return MatrixConfig("rsp", a=a, b=b)
    if kind == "rows":
        rows = _get(d, "rows", path, problems, default=[])
        return MatrixConfig("rows", rows=rows)
    problems.append(f"{path}.kind: need 'rsp' or 'rows'")
    return MatrixConfig("rows", rows=[])


def _parse_incentive(d, path, problems) -> IncentiveConfig:
    d = _subdict(d, path, problems)
    kind = _get(d, "kind", path, problems, default="")
    if kind not in INCENTIVE_KINDS:
        problems.append(f"{path}.kind: unknown incentive {kind!r}")
    q, eta = d.get("q"), d.get("eta")
    if kind == "q_replicator" and q is None:
        problems.append(f"{path}.q: required for q_replicator")
    if kind != "q_replicator" and q is not None:
        problems.append(f"{path}.q: only allowed for q_replicator")
    if kind == "logit" and (eta is None or eta <= 0):
        problems.append(f"{path}.eta: logit needs eta > 0")
    if kind != "logit" and eta is not None:
        problems.append(f"{path}.eta: only allowed for logit")
    tie = d.get("tie_rule", "lowest_index")
    if tie not in TIE_RULES:
        problems.append(f"{path}.tie_rule: unknown rule {tie!r}")
    return IncentiveConfig(kind, q=q, eta=eta, tie_rule=tie)


def _parse_geometry(d, path, problems) -> GeometryConfig:
    d = _subdict(d, path, problems)
    kind = _get(d, "kind", path, problems, default="")
    if kind not in GEOMETRY_KINDS:
        problems.append(f"{path}.kind: unknown geometry {kind!r}")
    q, beta, rows = d.get("q"), d.get("beta"), d.get("rows")
    if kind == "power_escort" and (q is None or q < 0):
        problems.append(f"{path}.q: power_escort needs q >= 0")
    if kind != "power_escort" and q is not None:
        problems.append(f"{path}.q: only allowed for power_escort")
    if kind == "scaled" and (beta is None or beta <= 0):
        problems.append(f"{path}.beta: scaled needs beta > 0")
    if kind == "constant" and rows is None:
        problems.append(f"{path}.rows: constant geometry needs a matrix")
    return GeometryConfig(kind, q=q, beta=beta, rows=rows)


def _parse_timescale(d, path, problems) -> TimescaleConfig:
    d = _subdict(d, path, problems)
    kind = _get(d, "kind", path, problems, default="")
    if kind not in TIMESCALE_KINDS:
        problems.append(f"{path}.kind: unknown time scale {kind!r}")
    h, values, dt = d.get("h"), d.get("values"), d.get("dt")
    integ = d.get("integrator", "rk4")
    if kind == "uniform" and (h is None or not (0 < h <= 1)):
        problems.append(f"{path}.h: uniform needs h in (0, 1]")
    if kind == "explicit":
        if not values or any(not (0 < v <= 1) for v in values):
            problems.append(f"{path}.values: explicit steps must lie in (0, 1]")
    if kind == "continuous":
        if dt is None or dt <= 0:
            problems.append(f"{path}.dt: continuous needs dt > 0")
        if integ not in ("euler", "rk4"):
            problems.append(f"{path}.integrator: must be euler or rk4")
    return TimescaleConfig(kind, h=h, values=values, dt=dt, integrator=integ)


def _parse_population(d, path, problems) -> PopulationConfig:
    d = _subdict(d, path, problems)
    n = _get(d, "n", path, problems, default=0)
    if not isinstance(n, int) or n < 2:
        problems.append(f"{path}.n: need an integer >= 2")
    matrix = _parse_matrix(_get(d, "matrix", path, problems, default={}), f"{path}.matrix", problems)
    if matrix.kind == "rsp" and n != 3:
        problems.append(f"{path}.matrix: rsp matrices require n=3")
    if matrix.kind == "rows" and matrix.rows is not None:
        rows = matrix.rows
        if len(rows) != n or any(len(r) != n for r in rows):
            problems.append(f"{path}.matrix.rows: must be {n}x{n}")
    inc = _parse_incentive(_get(d, "incentive", path, problems, default={}), f"{path}.incentive", problems)
    geo = _parse_geometry(_get(d, "geometry", path, problems, default={}), f"{path}.geometry", problems)
    if geo.kind == "constant" and geo.rows is not None:
        if len(geo.rows) != n or any(len(r) != n for r in geo.rows):
            problems.append(f"{path}.geometry.rows: must be {n}x{n}")
    ts = _parse_timescale(_get(d, "timescale", path, problems, default={}), f"{path}.timescale", problems)
    x0 = _get(d, "x0", path, problems, default=[])
    if isinstance(x0, list) and len(x0) == n:
        try:
            SimplexPoint(x0)
        except EvodynError as exc:
            problems.append(f"{path}.x0: {exc}")
    else:
        problems.append(f"{path}.x0: need {n} coordinates")
    me = d.get("mutation_epsilon")
    if me is not None and not (0.0 <= me <= 1.0):
        problems.append(f"{path}.mutation_epsilon: must lie in [0, 1]")
    extra = set(d) - {"n", "matrix", "incentive", "geometry", "timescale", "x0", "mutation_epsilon"}
    if extra:
        problems.append(f"{path}: unknown keys {sorted(extra)}")
    return PopulationConfig(n=n, matrix=matrix, incentive=inc, geometry=geo,
                            timescale=ts, x0=list(x0), mutation_epsilon=me)


def _valid_divergence(name) -> bool:
    if name in ("kl", "escort", "metric"):
        return True
    if isinstance(name, str) and name.startswith("q:"):
        try:
            return float(name[2:]) >= 0
        except ValueError:
            return False
    return False


def parse_config(d: dict) -> ScenarioConfig:
    """Validate a config dict; raises ConfigError listing every problem."""
    problems: list = []
    d = _subdict(d, "$", problems)
    pops_raw = _get(d, "populations", "$", problems, default=[])
    if not isinstance(pops_raw, list) or not pops_raw:
        problems.append("$.populations: need a nonempty list")
        pops_raw = []
    pops = [_parse_population(p, f"$.populations[{i}]", problems)
            for i, p in enumerate(pops_raw)]
    steps = _get(d, "steps", "$", problems, default=0)
    if not isinstance(steps, int) or steps < 1:
        problems.append("$.steps: need an integer >= 1")
    divs = d.get("divergences", [])
    if not isinstance(divs, list):
        problems.append("$.divergences: need a list")
        divs = []
    for i, name in enumerate(divs):
        if not _valid_divergence(name):
            problems.append(f"$.divergences[{i}]: unknown divergence {name!r}")
    target = d.get("target", "barycenter")
    if target != "barycenter":
        if not isinstance(target, list):
            problems.append("$.target: 'barycenter' or a coordinate list")
        else:
            try:
                SimplexPoint(target)
            except EvodynError as exc:
                problems.append(f"$.target: {exc}")
    policy = d.get("boundary_policy", "record_and_continue")
    if policy not in BOUNDARY_POLICIES:
        problems.append(f"$.boundary_policy: unknown policy {policy!r}")
    output = d.get("output", "scenario")
    if not isinstance(output, str) or not output:
        problems.append("$.output: need a nonempty string")
    eps = d.get("epsilon", 0.05)
    if not isinstance(eps, (int, float)) or eps <= 0:
        problems.append("$.epsilon: need a positive number")
    extra = set(d) - {"populations", "steps", "divergences", "target",
                      "boundary_policy", "output", "epsilon"}
    if extra:
        problems.append(f"$: unknown keys {sorted(extra)}")
    if problems:
        raise ConfigError(problems)
    return ScenarioConfig(populations=pops, steps=steps, divergences=list(divs),
                          target=target, boundary_policy=policy, output=output,
                          epsilon=float(eps))


def load_config(path: str) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"$: invalid JSON ({exc})"]) from None
    return parse_config(raw)


# -- assembly into engine specs ----------------------------------------------


def build_landscape(pop: PopulationConfig) -> FitnessLandscape:
    if pop.matrix.kind == "rsp":
        return FitnessLandscape.linear(rsp_matrix(pop.matrix.a, pop.matrix.b))
    return FitnessLandscape.linear(GameMatrix(np.array(pop.matrix.rows, dtype=float)))


def build_incentive(pop: PopulationConfig) -> IncentiveSpec:
    c = pop.incentive
    return IncentiveSpec(c.kind, build_landscape(pop), q=c.q, eta=c.eta,
                         tie_rule=c.tie_rule)


def build_geometry(pop: PopulationConfig) -> MetricField:
    g = pop.geometry
    if g.kind == "shahshahani":
        return MetricField.shahshahani()
    if g.kind == "euclidean":
        return MetricField.euclidean()
    if g.kind == "power_escort":
        return MetricField.diagonal_escort(EscortSpec.power(g.q))
    if g.kind == "scaled":
        return MetricField.diagonal_escort(EscortSpec.scaled(g.beta))
    return MetricField.constant(np.array(g.rows, dtype=float))


def build_timescale(pop: PopulationConfig) -> TimeScaleSpec:
    t = pop.timescale
    if t.kind == "uniform":
        return TimeScaleSpec.uniform(t.h)
    if t.kind == "harmonic":
        return TimeScaleSpec.harmonic()
    if t.kind == "explicit":
        return TimeScaleSpec.explicit(t.values)
    return TimeScaleSpec.continuous(t.dt, t.integrator)


def build_dynamic(pop: PopulationConfig, boundary_policy: str) -> DynamicSpec:
    mutation = None
    if pop.mutation_epsilon is not None:
        mutation = uniform_mutation_matrix(pop.n, pop.mutation_epsilon)
    return DynamicSpec(build_incentive(pop), build_geometry(pop),
                       build_timescale(pop), mutation=mutation,
                       boundary_policy=boundary_policy)


def geometry_escort(pop: PopulationConfig) -> EscortSpec:
    g = pop.geometry
    if g.kind == "shahshahani":
        return EscortSpec.power(1.0)
    if g.kind == "euclidean":
        return EscortSpec.power(0.0)
    if g.kind == "power_escort":
        return EscortSpec.power(g.q)
    if g.kind == "scaled":
        return EscortSpec.scaled(g.beta)
    raise ConfigError(["'escort' divergence undefined for constant geometry"])


def resolve_divergence(name: str, pop: PopulationConfig):
    """Map a config divergence entry to a (name, spec) pair for this population."""
    from .stability import make_divergence
    if name == "kl":
        return make_divergence("kl")
    if name.startswith("q:"):
        return make_divergence(name)
    if name == "escort":
        return make_divergence(geometry_escort(pop))
    if name == "metric":
        return make_divergence(build_geometry(pop))
    raise ConfigError([f"unknown divergence {name!r}"])


def target_state(cfg: ScenarioConfig, pop: PopulationConfig) -> np.ndarray:
    if cfg.target == "barycenter":
        return np.full(pop.n, 1.0 / pop.n)
    return np.asarray(cfg.target, dtype=float)
