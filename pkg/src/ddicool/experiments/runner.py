"""Sweep harness: evaluates cooling ratios over geometry and laser parameters."""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from ..geometry import coupling_matrices, find_magic_spacings, magic_spacing
from ..liouvillian import ModelParams, build_liouvillian, layout_for
from ..steady import DegenerateSteadyStateError, InvariantViolation, steady_state
from .scenario import GeometrySpec, Scenario, SweepRecord, SweepSpec

__all__ = [
    "evaluate_point",
    "single_reference",
    "run_scenario",
    "run_spacing_sweep",
    "run_magic_atlas",
    "run_detuning_diagram",
    "run_isosceles_sweep",
    "run_hexagon_suite",
    "HEXAGON_SUBSETS",
    "match_ratios",
    "detuning_grid",
]

#: distinct spectator arrangements on a hexagon, up to rotation and reflection
HEXAGON_SUBSETS = (
    (0, 1, 2), (0, 1, 3), (0, 2, 4),
    (0, 1, 2, 3), (0, 1, 2, 4), (0, 1, 3, 4),
)

SPACING_POINTS_PER_WAVELENGTH = 200


@lru_cache(maxsize=64)
def _reference(gamma: float, eta_omega: float, n_cut: int, method: str) -> float:
    params = ModelParams(eta_omega=(eta_omega,), gamma=gamma, delta=-1.0, n_cut=n_cut)
    layout = layout_for(params)
    config = GeometrySpec("single").build("magic")
    L = build_liouvillian(layout, params, coupling_matrices(config, gamma))
    return steady_state(L, layout, 0, method).n_target


def single_reference(scenario: Scenario) -> float:
    """Single-atom occupation at Delta = -nu with the scenario's other parameters."""
    return _reference(scenario.gamma, scenario.eta_omega, scenario.n_cut, scenario.method)


def evaluate_point(scenario: Scenario) -> dict:
    """Solve one configuration; failures land in the ``error`` field."""
    row = {"n_multi": math.nan, "n_single": math.nan, "ratio": math.nan,
           "g12": math.nan, "gamma12": math.nan, "residual": math.nan, "error": ""}
    try:
        if not scenario.eta_omega > 0:
            raise ValueError("the target atom must be driven (eta_omega > 0)")
        config = scenario.geometry.build(scenario.spacing, scenario.theta)
        params = ModelParams.target_driven(
            config.n_atoms, config.target_index, scenario.eta_omega,
            gamma=scenario.gamma, delta=scenario.delta, n_cut=scenario.n_cut,
        )
        couplings = coupling_matrices(config, params.gamma)
        if config.n_atoms > 1:
            row["g12"] = couplings.shifts[0, 1]
            row["gamma12"] = couplings.decays[0, 1]
        layout = layout_for(params)
        result = steady_state(build_liouvillian(layout, params, couplings), layout, 0, scenario.method)
        n_single = single_reference(scenario)
        row.update(n_multi=result.n_target, n_single=n_single,
                   ratio=result.n_target / n_single, residual=result.residual)
        row["error"] = "; ".join(result.violations())
    except (DegenerateSteadyStateError, InvariantViolation, ValueError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _apply(scenario: Scenario, variable: str, value: float) -> Scenario:
    if variable == "phi":
        return replace(scenario, geometry=replace(scenario.geometry, phi=float(value)))
    return replace(scenario, **{variable: float(value)})


def _map(fn: Callable, tasks: Sequence, jobs: int | None):
    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def run_scenario(scenario: Scenario, name: str = "scenario", jobs: int | None = None) -> SweepRecord:
    """Evaluate a scenario over its (up to two-dimensional) sweep."""
    jobs = scenario.jobs if jobs is None else jobs
    sweeps = scenario.sweep
    if not sweeps:
        row = evaluate_point(scenario)
        value = scenario.spacing if scenario.spacing != "magic" else magic_spacing()
        return SweepRecord(name, "spacing", [{"sweep_value": value, **row}])
    first = sweeps[0]
    grids = [s.values() for s in sweeps]
    points = list(itertools.product(*grids))
    tasks = []
    for combo in points:
        scn = scenario
        for spec, value in zip(sweeps, combo):
            scn = _apply(scn, spec.variable, value)
        tasks.append(scn)
    results = _map(evaluate_point, tasks, jobs)
    extra = tuple(s.variable for s in sweeps[1:])
    rows = []
    for combo, res in zip(points, results):
        row = {"sweep_value": combo[0]}
        row.update({spec.variable: v for spec, v in zip(sweeps[1:], combo[1:])})
        row.update(res)
        rows.append(row)
    return SweepRecord(name, first.variable, rows, extra)


def _default_points(lo: float, hi: float, per_unit: int) -> int:
    return int(round((hi - lo) * per_unit)) + 1


def run_spacing_sweep(
    kind: str = "line",
    s_range: tuple[float, float] = (0.05, 1.0),
    points: int | None = None,
    n_atoms: int = 2,
    base: Scenario | None = None,
    jobs: int | None = 1,
) -> SweepRecord:
    """Cooling ratio against nearest-neighbour spacing for a line or triangle."""
    if kind not in ("line", "triangle"):
        raise ValueError("kind must be 'line' or 'triangle'")
    base = base or Scenario()
    points = points or _default_points(*s_range, SPACING_POINTS_PER_WAVELENGTH)
    scn = replace(base, geometry=GeometrySpec(kind, atoms=n_atoms),
                  sweep=(SweepSpec("spacing", s_range[0], s_range[1], points),))
    return run_scenario(scn, f"spacing sweep ({kind})", jobs)


def run_isosceles_sweep(
    phi_range: tuple[float, float] = (math.pi / 90, math.pi),
    points: int = 90,
    side: float | str = "magic",
    base: Scenario | None = None,
    jobs: int | None = 1,
) -> SweepRecord:
    """Cooling ratio against the apex angle with both legs fixed at ``side``."""
    base = base or Scenario()
    scn = replace(base, geometry=GeometrySpec("isosceles"), spacing=side,
                  sweep=(SweepSpec("phi", phi_range[0], phi_range[1], points),))
    return run_scenario(scn, "isosceles apex-angle sweep", jobs)


def detuning_grid(offsets: np.ndarray, gamma: float, nu: float = 1.0) -> np.ndarray:
    """Map ``(Delta + nu)/Gamma`` offsets to detunings ``Delta``."""
    return -nu + np.asarray(offsets, dtype=float) * gamma


def run_detuning_diagram(
    s_range: tuple[float, float] = (0.1, 1.0),
    offset_range: tuple[float, float] = (-1.5, 1.0),
    points: tuple[int, int] = (100, 100),
    base: Scenario | None = None,
    jobs: int | None = 1,
) -> SweepRecord:
    """Two-atom ratio over spacing and detuning.

    ``offset_range`` bounds ``(Delta + nu)/Gamma``; the ``delta`` column holds
    ``Delta/nu``.  The reference stays at ``Delta = -nu``.
    """
    base = base or Scenario()
    d_lo, d_hi = detuning_grid(offset_range, base.gamma)
    scn = replace(base, geometry=GeometrySpec("line", atoms=2), sweep=(
        SweepSpec("spacing", s_range[0], s_range[1], points[0]),
        SweepSpec("delta", float(d_lo), float(d_hi), points[1]),
    ))
    return run_scenario(scn, "detuning-spacing diagram (two atoms)", jobs)


def run_magic_atlas(
    theta_range: tuple[float, float] = (0.0, math.pi / 2),
    theta_points: int = 91,
    s_range: tuple[float, float] = (0.05, 1.0),
    base: Scenario | None = None,
    jobs: int | None = 1,
) -> SweepRecord:
    """Two-atom ratio at every magic spacing for each polarization angle.

    The pair axis is x and the dipole tilts in the x-z plane, so ``theta`` is
    the dipole-axis angle.  Rows carry the spacing in an extra column.
    """
    base = base or Scenario()
    tasks, keys = [], []
    for theta in np.linspace(theta_range[0], theta_range[1], theta_points):
        theta = float(min(theta, math.pi / 2))
        for s in find_magic_spacings(theta, s_range):
            tasks.append(replace(base, geometry=GeometrySpec("line", atoms=2), spacing=s, theta=theta, sweep=()))
            keys.append((theta, s))
    results = _map(evaluate_point, tasks, jobs)
    rows = [{"sweep_value": t, "spacing": s, **r} for (t, s), r in zip(keys, results)]
    return SweepRecord("magic-spacing atlas (two atoms)", "theta", rows, ("spacing",))


def run_hexagon_suite(
    vertex_subsets: Iterable[Iterable[int]] = HEXAGON_SUBSETS,
    side: float | str = "magic",
    base: Scenario | None = None,
    jobs: int | None = 1,
) -> SweepRecord:
    """Target at a hexagon center with spectators on the listed vertices.

    ``sweep_value`` is the total atom count; the ``vertices`` column names the
    occupied vertices.
    """
    base = base or Scenario()
    subsets = [tuple(sorted(set(v))) for v in vertex_subsets]
    tasks = [replace(base, geometry=GeometrySpec("hexagon", vertices=v), spacing=side, sweep=())
             for v in subsets]
    results = _map(evaluate_point, tasks, jobs)
    rows = [{"sweep_value": len(v) + 1, "vertices": "-".join(map(str, v)), **r}
            for v, r in zip(subsets, results)]
    return SweepRecord("hexagon suite", "atoms", rows, ("vertices",))


def match_ratios(values: dict, targets: Sequence[float]) -> tuple[dict, float]:
    """Assign distinct keys of ``values`` to ``targets`` minimizing the worst error.

    Returns ``({target_index: key}, max_abs_error)``.
    """
    keys = list(values)
    if len(keys) < len(targets):
        raise ValueError("fewer candidates than targets")
    best, best_err = None, math.inf
    for perm in itertools.permutations(keys, len(targets)):
        err = max(abs(values[k] - t) for k, t in zip(perm, targets))
        if err < best_err:
            best, best_err = perm, err
    return dict(enumerate(best)), best_err
