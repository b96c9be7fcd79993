"""
Parameter sweeps behind `swbench sweep uniqueness|damping|convergence|smallness`.

Independent runs fan out over a process pool, one simulation per worker; results are read back in submission
order so every table is deterministic.
"""

import concurrent.futures as cf
import math
from collections.abc import Callable, Sequence
from typing import Any

import numpy as np
from loguru import logger

from swbench.analysis.norms import besov_norm
from swbench.common.constants import DAMPING_EXPONENT_TOLERANCE, DAMPING_PLATEAU_SPREAD
from swbench.common.errors import UsageError
from swbench.diagnostics.damping import damping_report, expected_boundary
from swbench.diagnostics.uniqueness import uniqueness_gap
from swbench.pydantic_models.diagnostics import SweepReport, SweepRow
from swbench.pydantic_models.indices import BesovIndex
from swbench.pydantic_models.scenario import Scenario
from swbench.scenarios.presets import SMALL_DATA, SMOOTH
from swbench.scenarios.simulation import make_grid, simulate

CONVERGENCE_SLOPE = 4.0
CONVERGENCE_SLOPE_TOLERANCE = 0.3
PERTURBATION_SIZE = 1e-6


def fan_out(job: Callable[..., Any], arguments: Sequence[tuple], workers: int = 1) -> list[Any]:
    """job(*args) for every entry, in submission order; runs inline for a single worker."""
    if workers <= 1 or len(arguments) <= 1:
        return [job(*args) for args in arguments]
    with cf.ProcessPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(job, *args) for args in arguments]
        return [f.result() for f in futures]


def _or_nan(value: float | None) -> float:
    return math.nan if value is None else value


def _sweep_report(name: str, rows: list[SweepRow], verdict: bool, fit: float | None, notes: list[str]) -> SweepReport:
    report = SweepReport(name=name, rows=rows, verdict=verdict, fit=fit, notes=notes)
    level = "INFO" if verdict else "WARNING"
    logger.log(level, f"[Sweep] {name}: verdict {'pass' if verdict else 'fail'} over {len(rows)} rows (fit {fit})")
    return report


# =============================================================
#                  Uniqueness
# =============================================================


def _uniqueness_job(scenario: Scenario, n: float, horizon: float) -> SweepRow:
    coarse = scenario.with_overrides({"run": {"n": n}})
    fine = scenario.with_overrides({"run": {"n": 2 * n}})
    _, run1 = simulate(coarse, horizon=horizon, survey=True)
    _, run2 = simulate(fine, horizon=horizon, survey=True)
    completed = run1.completed and run2.completed and len(run1) == len(run2)
    if not completed:
        return SweepRow(label=f"n={n:g}", parameter=n, value=math.nan, completed=False, extra={})
    gap = uniqueness_gap(run1, run2)
    return SweepRow(
        label=f"n={n:g} vs {2 * n:g}",
        parameter=n,
        value=gap.terminal.beta_delta,
        completed=True,
        extra={
            "dq_linf": gap.terminal.dq_linf,
            "osgood_modulus": gap.terminal.osgood_modulus,
            "gronwall_factor": gap.gronwall_factor,
        },
    )


def _perturbation_job(scenario: Scenario, horizon: float) -> SweepRow:
    base = scenario.initial_data
    _, run1 = simulate(scenario, horizon=horizon, survey=True)
    # Same seed with a rescaled target moves q0 by PERTURBATION_SIZE in B^{d/2}_{2,1} and leaves u0 alone.
    perturbed = scenario.with_overrides({"initial_data": {"q_target": base.q_target + PERTURBATION_SIZE}})
    _, run2 = simulate(perturbed, horizon=horizon, survey=True)
    if not (run1.completed and run2.completed):
        return SweepRow(label="perturbed q0", parameter=PERTURBATION_SIZE, value=math.nan, completed=False, extra={})
    gap = uniqueness_gap(run1, run2)
    return SweepRow(
        label="perturbed q0",
        parameter=PERTURBATION_SIZE,
        value=gap.terminal.dq_linf,
        completed=True,
        extra={
            "gronwall_factor": gap.gronwall_factor,
            "growth_exponent": _or_nan(gap.growth_exponent),
            "V": gap.terminal.V,
        },
    )


def uniqueness_sweep(
    scenario: Scenario = SMALL_DATA,
    *,
    truncations: Sequence[float] = (16, 32, 64),
    horizon: float = 0.01,
    workers: int = 1,
) -> SweepReport:
    """Terminal gap between the runs at n and 2n for each n; the gap has to shrink strictly as n grows."""
    if len(truncations) < 2:
        raise UsageError("A truncation sweep needs at least two values of n")
    truncations = sorted(truncations)
    rows = fan_out(_uniqueness_job, [(scenario, n, horizon) for n in truncations], workers)
    if scenario.initial_data.family == "multiscale":
        rows.append(_perturbation_job(scenario, horizon))
    gaps = [r.value for r in rows if r.label.startswith("n=")]
    decreasing = all(r.completed for r in rows) and all(b < a for a, b in zip(gaps, gaps[1:]))
    finite = all(math.isfinite(r.extra.get("gronwall_factor", 0.0)) for r in rows)
    return _sweep_report("uniqueness", rows, decreasing and finite, None, [f"horizon {horizon:g}"])


# =============================================================
#                  Damping
# =============================================================


def damping_sweep(slopes: Sequence[float] = (0.25, 1.0, 4.0), *, viscosity: str = "laplacian") -> SweepReport:
    rows, verdict, notes = [], True, []
    for slope in slopes:
        report = damping_report(slope, viscosity=viscosity)
        rows.append(
            SweepRow(
                label=f"P'(1)={slope:g}",
                parameter=slope,
                value=_or_nan(report.high_frequency_rate),
                completed=True,
                extra={
                    "boundary": _or_nan(report.boundary),
                    "expected_boundary": expected_boundary(slope, viscosity),
                    "low_frequency_exponent": _or_nan(report.low_frequency_exponent),
                    "high_frequency_spread": _or_nan(report.high_frequency_spread),
                },
            )
        )
        if report.degenerate:
            notes.append(f"P'(1)={slope:g} is degenerate")
            continue
        verdict &= (
            report.high_frequency_spread is not None
            and report.high_frequency_spread <= DAMPING_PLATEAU_SPREAD
            and report.low_frequency_exponent is not None
            and abs(report.low_frequency_exponent - 2.0) <= DAMPING_EXPONENT_TOLERANCE
        )
    return _sweep_report("damping", rows, verdict, None, notes)


# =============================================================
#                  Temporal convergence
# =============================================================


def _final_state_job(scenario: Scenario, dt: float) -> tuple[np.ndarray, np.ndarray]:
    _, trajectory = simulate(scenario.with_overrides({"run": {"dt": dt}}))
    final = trajectory.final
    return final.q.coeffs, final.u.coeffs


def convergence_sweep(
    scenario: Scenario = SMOOTH, *, refinements: int = 3, reference_factor: int = 16, workers: int = 1
) -> SweepReport:
    """Self-convergence of the step at dt0, dt0/2, ... against a dt0/reference_factor run; slope 4 expected."""
    if scenario.run.dt is None or scenario.horizon_is_auto:
        raise UsageError("The convergence sweep needs a fixed dt and a numeric horizon")
    dt0 = scenario.run.dt
    steps = [dt0 / 2**i for i in range(refinements)] + [dt0 / reference_factor]
    finals = fan_out(_final_state_job, [(scenario, dt) for dt in steps], workers)
    q_ref, u_ref = finals[-1]
    grid_volume = make_grid(scenario).volume
    rows, errors = [], []
    for dt, (q, u) in zip(steps[:-1], finals[:-1]):
        error = math.sqrt(grid_volume * (np.sum(np.abs(q - q_ref) ** 2) + np.sum(np.abs(u - u_ref) ** 2)))
        errors.append(error)
        rows.append(SweepRow(label=f"dt={dt:.4g}", parameter=dt, value=error, completed=True, extra={}))
    slope = float(np.polyfit(np.log(steps[:-1]), np.log(errors), 1)[0]) if all(e > 0 for e in errors) else None
    verdict = slope is not None and abs(slope - CONVERGENCE_SLOPE) <= CONVERGENCE_SLOPE_TOLERANCE
    return _sweep_report("convergence", rows, verdict, slope, [f"reference dt={steps[-1]:.4g}"])


# =============================================================
#                  Global smallness bracket
# =============================================================


def _smallness_job(scenario: Scenario, scale: float, horizon: float) -> SweepRow:
    params = scenario.initial_data
    scaled = scenario.with_overrides(
        {
            "initial_data": {
                "q_target": params.q_target * scale,
                "u_target": params.u_target * scale,
                "q_amplitude": params.q_amplitude * scale,
                "u_amplitude": params.u_amplitude * scale,
            }
        }
    )
    data, trajectory = simulate(scaled, horizon=horizon, survey=True)
    index = BesovIndex(s=scaled.grid.d / 2, p=2, r=1)
    initial = besov_norm(trajectory.initial.q, index)
    final = besov_norm(trajectory.final.q, index)
    ratio = final / initial if initial > 0 else 0.0
    global_like = trajectory.completed and ratio <= 1.0
    return SweepRow(
        label=f"scale={scale:.4g}",
        parameter=scale,
        value=ratio,
        completed=global_like,
        extra={"global_smallness": data.norms.global_smallness, "u_max": trajectory.final.max_velocity()},
    )


def smallness_sweep(
    scenario: Scenario = SMALL_DATA,
    *,
    scales: Sequence[float] = tuple(np.geomspace(0.5, 64.0, 8)),
    horizon: float = 0.5,
    workers: int = 1,
) -> SweepReport:
    """
    Brackets the amplitude scale at which runs stop looking global (completed and ||q(T)|| <= ||q0||).
    The bracket is empirical: it depends on the family, the grid and the horizon.
    """
    if scenario.physics.gamma * scenario.physics.coefficient <= 0:
        raise UsageError("The smallness sweep needs P'(1) > 0")
    scales = sorted(scales)
    rows = fan_out(_smallness_job, [(scenario, s, horizon) for s in scales], workers)
    first_failure = next((r for r in rows if not r.completed), None)
    notes = ["empirical bracket"]
    if first_failure is None:
        notes.append(f"every scale up to {scales[-1]:g} looked global")
        bracket = None
    else:
        passing = [r.parameter for r in rows if r.completed and r.parameter < first_failure.parameter]
        lower = max(passing) if passing else 0.0
        notes.append(f"threshold scale in ({lower:.4g}, {first_failure.parameter:.4g}]")
        bracket = first_failure.parameter
    return _sweep_report("smallness", rows, True, bracket, notes)


def run_sweep(name: str, *, workers: int = 1, **options) -> SweepReport:
    match name:
        case "uniqueness":
            return uniqueness_sweep(workers=workers, **options)
        case "damping":
            return damping_sweep(**options)
        case "convergence":
            return convergence_sweep(workers=workers, **options)
        case "smallness":
            return smallness_sweep(workers=workers, **options)
        case _:
            raise UsageError(f"Unknown sweep {name}")
