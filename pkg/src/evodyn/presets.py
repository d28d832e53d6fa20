"""Scenario presets for the reference phase portraits.

Each preset transcribes the published caption parameters for its scenario.
Captions leave some values open; the choices made here are fixed so runs are
reproducible:

  * step size defaults to h = 1/100 where unstated (figs 1-6, 11),
  * initial points: fig4 and fig11 use (1/10, 1/10, 8/10); figs 5-6 use
    (1/50, 9/50, 40/50), picked so that every swept dynamic converges while
    the q=2 run still shows a non-monotone KL trace over the window,
  * step counts are sized so the documented behavior (convergence or its
    failure) is visible at desk scale.
"""

from __future__ import annotations

from typing import Callable, Dict

from .config import (GeometryConfig, IncentiveConfig, MatrixConfig,
                     PopulationConfig, ScenarioConfig, TimescaleConfig)
from .errors import ConfigError

Q_SWEEP = (0.5, 1.0, 1.5, 2.0, 2.5, 4.0)


def _pop(a, b, inc_kind, x0, h=0.01, *, q=None, eta=None, geometry=None,
         mutation_epsilon=None, timescale=None) -> PopulationConfig:
    return PopulationConfig(
        n=3,
        matrix=MatrixConfig("rsp", a=a, b=b),
        incentive=IncentiveConfig(inc_kind, q=q, eta=eta),
        geometry=geometry or GeometryConfig("shahshahani"),
        timescale=timescale or TimescaleConfig("uniform", h=h),
        x0=list(x0),
        mutation_epsilon=mutation_epsilon,
    )


def _q_sweep_config(a, b, x0, output, steps=20000, policy="record_and_continue") -> ScenarioConfig:
    pops = [_pop(a, b, "q_replicator", x0, q=q) for q in Q_SWEEP]
    return ScenarioConfig(populations=pops, steps=steps, divergences=["kl"],
                          target="barycenter", boundary_policy=policy,
                          output=output, epsilon=0.02)


def fig1a() -> ScenarioConfig:
    return _q_sweep_config(-1.0, -2.0, (0.1, 0.1, 0.8), "fig1a")


def fig1b() -> ScenarioConfig:
    # q < 1 reaches the boundary in finite time from this near-vertex start;
    # clipping keeps the sweep on the simplex
    return _q_sweep_config(-1.0, -2.0, (1 / 83, 2 / 83, 80 / 83), "fig1b",
                           policy="clip_renormalize")


def fig2() -> ScenarioConfig:
    pops = [_pop(-1.0, -2.0, "q_replicator", (1 / 3, 1 / 3, 1 / 3), q=q)
            for q in (0.78, 1.0, 2.5)]
    return ScenarioConfig(populations=pops, steps=1, divergences=[],
                          target="barycenter", output="fig2", epsilon=0.02)


def fig3() -> ScenarioConfig:
    # diverging sweep: fractional-q members spiral into the boundary
    return _q_sweep_config(1.0, 2.0, (1 / 8, 1 / 8, 6 / 8), "fig3",
                           policy="clip_renormalize")


def fig4() -> ScenarioConfig:
    pops = [_pop(1.0, 2.0, "q_replicator", (0.1, 0.1, 0.8), q=1.0,
                 geometry=GeometryConfig("power_escort", q=q))
            for q in (0.2, 0.8, 1.0, 2.0, 4.0)]
    return ScenarioConfig(populations=pops, steps=20000, divergences=["kl"],
                          target="barycenter", output="fig4", epsilon=0.02)


def _double_q_config(output, divergences) -> ScenarioConfig:
    pops = [_pop(-1.0, -2.0, "q_replicator", (0.02, 0.18, 0.8), q=q,
                 geometry=GeometryConfig("power_escort", q=q))
            for q in (0.5, 1.0, 1.5, 2.0)]
    return ScenarioConfig(populations=pops, steps=14500, divergences=divergences,
                          target="barycenter", output=output, epsilon=0.02)


def fig5() -> ScenarioConfig:
    return _double_q_config("fig5", [])


def fig6() -> ScenarioConfig:
    return _double_q_config("fig6", ["kl", "escort"])


def brfp() -> ScenarioConfig:
    fixed = _pop(-1.0, -2.0, "best_reply", (0.1, 0.1, 0.8),
                 timescale=TimescaleConfig("uniform", h=1 / 3))
    harmonic = _pop(-1.0, -2.0, "best_reply", (0.1, 0.1, 0.8),
                    timescale=TimescaleConfig("harmonic"))
    return ScenarioConfig(populations=[fixed, harmonic], steps=10000,
                          divergences=[], target="barycenter", output="brfp",
                          epsilon=0.01)


def fig8() -> ScenarioConfig:
    pops = [
        _pop(-1.0, -2.0, "replicator", (0.2, 0.2, 0.6), h=0.1),
        _pop(-1.0, -2.0, "logit", (0.6, 0.2, 0.2), h=0.1, eta=0.4,
             geometry=GeometryConfig("euclidean")),
    ]
    return ScenarioConfig(populations=pops, steps=500, divergences=["escort"],
                          target="barycenter", output="fig8", epsilon=0.05)


def fig9() -> ScenarioConfig:
    pops = [
        _pop(-1.0, -2.0, "replicator", (0.2, 0.2, 0.6), h=0.1),
        _pop(-1.0, -2.0, "q_replicator", (0.6, 0.2, 0.2), h=0.1, q=2.0,
             geometry=GeometryConfig("euclidean")),
    ]
    return ScenarioConfig(populations=pops, steps=10000, divergences=[],
                          target="barycenter", output="fig9", epsilon=0.05)


def fig10() -> ScenarioConfig:
    pops = [
        _pop(-1.0, -2.0, "replicator", (0.2, 0.2, 0.6), h=0.1),
        _pop(-1.0, -4.0, "replicator", (0.6, 0.2, 0.2),
             geometry=GeometryConfig("power_escort", q=2.0),
             timescale=TimescaleConfig("uniform", h=0.05)),
    ]
    return ScenarioConfig(populations=pops, steps=400, divergences=["escort"],
                          target="barycenter", output="fig10", epsilon=0.02)


def fig11() -> ScenarioConfig:
    # the mutated best-reply field is not forward-invariant for large
    # mutation rates; clipping keeps the cycles on the simplex
    pops = [_pop(1.0, 2.0, "best_reply", (0.1, 0.1, 0.8), mutation_epsilon=eps)
            for eps in (0.1, 0.4, 0.8)]
    return ScenarioConfig(populations=pops, steps=20000, divergences=[],
                          target="barycenter", boundary_policy="clip_renormalize",
                          output="fig11", epsilon=0.05)


REGISTRY: Dict[str, Callable[[], ScenarioConfig]] = {
    "fig1a": fig1a, "fig1b": fig1b, "fig2": fig2, "fig3": fig3, "fig4": fig4,
    "fig5": fig5, "fig6": fig6, "brfp": brfp, "fig8": fig8, "fig9": fig9,
    "fig10": fig10, "fig11": fig11,
}


def figure(preset_id: str) -> ScenarioConfig:
    """Return the preset config for a figure id; unknown ids list the registry."""
    if preset_id not in REGISTRY:
        known = ", ".join(sorted(REGISTRY))
        raise ConfigError([f"unknown figure id {preset_id!r}; available: {known}"])
    return REGISTRY[preset_id]()
