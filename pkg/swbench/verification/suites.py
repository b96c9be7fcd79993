"""
Fixed verification suites behind `swbench verify lp|paraproduct|semigroup`.

Each suite runs seeded random instances and closed-form single-mode cases and returns a SuiteReport; a failed
check is a row, never an exception.
"""

import math
from collections.abc import Callable

import numpy as np
from loguru import logger
from scipy.linalg import expm

from swbench.analysis.composition import LOG_DENSITY, composition_aliasing, compose, measure_composition_difference, measure_composition_estimate
from swbench.analysis.littlewood_paley import block, make_partition
from swbench.analysis.norms import besov_norm, chemin_lerner_norm, lebesgue_besov_norm, log_interpolation_check
from swbench.analysis.paraproduct import bony_split, measure_product_estimates
from swbench.common.constants import (
    BERNSTEIN_LOWER,
    BERNSTEIN_UPPER,
    BONY_TOLERANCE,
    DAMPING_EXPONENT_TOLERANCE,
    DAMPING_PLATEAU_SPREAD,
    DEFAULT_RANDOM_KMAX,
    DEFAULT_RANDOM_SAMPLES,
    PARTITION_TOLERANCE,
    ROUNDTRIP_TOLERANCE,
)
from swbench.common.errors import UsageError
from swbench.common.random_fields import random_field, random_trajectory, single_mode
from swbench.config import toggle
from swbench.diagnostics.damping import damping_report
from swbench.pydantic_models.indices import BesovIndex
from swbench.pydantic_models.reports import CheckResult, MeasuredConstant, SuiteReport
from swbench.solver.pressure import PressureLaw
from swbench.solver.semigroup import (
    coupled_linear_flow,
    coupled_mode_exponential,
    divergence_flow,
    duhamel,
    lame_flow,
    measure_smoothing_estimate,
)
from swbench.spectral.field import parseval_l2
from swbench.spectral.grid import PeriodicGrid
from swbench.spectral.operators import dealiased_product, differentiate
from swbench.spectral.trajectory import FieldTrajectory

CHAIN_RULE_TOLERANCE = 1e-8
FLOW_TOLERANCE = 1e-12
_BERNSTEIN_SLACK = 1e-6


def _relative(a, b) -> float:
    scale = parseval_l2(b)
    gap = parseval_l2(a - b)
    return gap / scale if scale > 0 else gap


def _finite_constant(measured: MeasuredConstant) -> CheckResult:
    return CheckResult(
        name=measured.name,
        value=measured.value,
        passed=math.isfinite(measured.value),
        detail=f"{measured.samples} samples" + (f", hypothesis {measured.hypothesis}" if measured.hypothesis else ""),
    )


def _at_most(name: str, value: float, bound: float, detail: str | None = None) -> CheckResult:
    return CheckResult(name=name, value=value, bound=bound, passed=bool(value <= bound), detail=detail)


# =============================================================
#                  Littlewood-Paley
# =============================================================


def verify_lp(grid: PeriodicGrid, *, samples: int = DEFAULT_RANDOM_SAMPLES, seed: int = 0) -> SuiteReport:
    partition = make_partition(grid)
    rng = np.random.default_rng(seed)
    kmax = min(DEFAULT_RANDOM_KMAX, grid.N // 2 - 1)
    checks = [_at_most("partition-of-unity", partition.residual(), PARTITION_TOLERANCE)]

    stack = partition.weight_stack()
    overlap = max(
        (
            float(np.max(np.abs(stack[a] * stack[b])))
            for a in range(len(stack))
            for b in range(a + 2, len(stack))
        ),
        default=0.0,
    )
    checks.append(_at_most("block-orthogonality", overlap, 0.0, "Delta_j Delta_j' for |j - j'| >= 2"))

    low, high = math.inf, 0.0
    embedding_low = embedding_high = 0.0
    for _ in range(samples):
        u = random_field(grid, rng, kmax=kmax)
        for j in partition.j_range:
            piece = block(u, j)
            mass = parseval_l2(piece)
            if mass == 0:
                continue
            ratio = parseval_l2(differentiate(piece, "gradient")) / (2.0**j * mass)
            low, high = min(low, ratio), max(high, ratio)
        l2 = parseval_l2(u)
        embedding_low = max(embedding_low, besov_norm(u, BesovIndex(s=0, p=2, r=math.inf)) / l2)
        embedding_high = max(embedding_high, l2 / besov_norm(u, BesovIndex(s=0, p=2, r=1)))
    checks.append(
        CheckResult(
            name="bernstein",
            value=high,
            bound=BERNSTEIN_UPPER * (1 + _BERNSTEIN_SLACK),
            passed=bool(low >= BERNSTEIN_LOWER * (1 - _BERNSTEIN_SLACK) and high <= BERNSTEIN_UPPER * (1 + _BERNSTEIN_SLACK)),
            detail=f"ratios in [{low:.6f}, {high:.6f}]",
        )
    )
    checks.append(_at_most("embedding B0_2inf <= L2", embedding_low, 1 + ROUNDTRIP_TOLERANCE))
    checks.append(_at_most("embedding L2 <= B0_21", embedding_high, 1 + ROUNDTRIP_TOLERANCE))

    s = grid.d / 2
    worst = 0.0
    for _ in range(samples):
        u = random_field(grid, rng, kmax=kmax)
        worst = max(
            worst,
            besov_norm(u, BesovIndex(s=s - grid.d / 2, p=math.inf, r=1)) / besov_norm(u, BesovIndex(s=s, p=2, r=1)),
        )
    checks.append(
        _finite_constant(MeasuredConstant(name="embedding B^s_21 -> B^(s-d/2)_inf1", value=worst, samples=samples, grid_points=grid.N))
    )

    times = np.linspace(0.0, 1.0, 9)
    minkowski_ok = True
    interpolation = 0.0
    for _ in range(max(samples // 10, 1)):
        traj = random_trajectory(grid, rng, times, kmax=kmax)
        for r, rho in ((1.0, math.inf), (math.inf, 1.0)):
            idx = BesovIndex(s=0.5, p=2, r=r, rho=rho)
            cl, plain = chemin_lerner_norm(traj, idx), lebesgue_besov_norm(traj, idx)
            tol = ROUNDTRIP_TOLERANCE * max(cl, plain)
            minkowski_ok &= cl >= plain - tol if r <= rho else cl <= plain + tol
        interpolation = max(interpolation, log_interpolation_check(traj, 1.0, 0.5, 1.0))
    checks.append(CheckResult(name="chemin-lerner-minkowski", value=float(minkowski_ok), passed=minkowski_ok))
    checks.append(
        _finite_constant(MeasuredConstant(name="log-interpolation (s=1, eps=1/2)", value=interpolation, samples=max(samples // 10, 1), grid_points=grid.N))
    )
    return _report("lp", grid, checks)


# =============================================================
#                  Paraproducts and composition
# =============================================================


def verify_paraproduct(grid: PeriodicGrid, *, samples: int = DEFAULT_RANDOM_SAMPLES, seed: int = 0) -> SuiteReport:
    rng = np.random.default_rng(seed)
    kmax = min(DEFAULT_RANDOM_KMAX, grid.N // 2 - 1)
    bony, bilinear = 0.0, 0.0
    for _ in range(samples):
        u = random_field(grid, rng, kmax=kmax)
        v = random_field(grid, rng, kmax=kmax)
        split = bony_split(u, v)
        bony = max(bony, _relative(split.total(), dealiased_product(u, v)))
    u = random_field(grid, rng, kmax=kmax)
    v = random_field(grid, rng, kmax=kmax)
    base, scaled = bony_split(u, v), bony_split(u * 3.0, v)
    for part in ("paraproduct_uv", "paraproduct_vu", "remainder"):
        bilinear = max(bilinear, _relative(getattr(scaled, part), getattr(base, part) * 3.0))
    checks = [
        _at_most("bony-identity", bony, BONY_TOLERANCE, f"max relative error over {samples} pairs"),
        _at_most("bony-bilinearity", bilinear, BONY_TOLERANCE),
    ]

    d = grid.d
    checks.append(_finite_constant(measure_product_estimates(grid, "paraproduct-linf", s=d / 2, samples=samples, seed=seed)))
    checks.append(_finite_constant(measure_product_estimates(grid, "paraproduct-negative", s=d / 2, t=-0.5, samples=samples, seed=seed)))
    checks.append(
        _finite_constant(measure_product_estimates(grid, "remainder", s1=d / 2, s2=d / 2, samples=samples, seed=seed))
    )

    law = PressureLaw(gamma=1.4)
    checks.append(_finite_constant(measure_composition_estimate(grid, LOG_DENSITY, s=d / 2, samples=samples, seed=seed)))
    checks.append(
        _finite_constant(measure_composition_difference(grid, law.as_nonlinearity(), samples=samples, seed=seed))
    )

    q = random_field(grid, rng, kmax=2)
    q = q * (0.05 / float(np.max(np.abs(q.values))))
    via_compose = differentiate(compose(q, law.as_nonlinearity()), "gradient")
    via_product = dealiased_product(compose(q, law.derivative_nonlinearity()), differentiate(q, "gradient"))
    checks.append(
        _at_most("composition-chain-rule", _relative(via_compose, via_product), CHAIN_RULE_TOLERANCE, "difference is aliasing")
    )

    if toggle("measure-composition-aliasing"):
        worst = 0.0
        for _ in range(max(samples // 10, 1)):
            f = random_field(grid, rng, kmax=kmax)
            f = f * (0.5 / float(np.max(np.abs(f.values))))
            worst = max(worst, composition_aliasing(f, LOG_DENSITY))
        checks.append(
            CheckResult(name="composition-aliasing", value=worst, passed=True, detail="2x against 4x padding, reported only")
        )
    return _report("paraproduct", grid, checks)


# =============================================================
#                  Semigroups
# =============================================================


def _mode_error(grid: PeriodicGrid, k: tuple[int, ...], speed: float, t: float) -> float:
    """(sin k.x, 0, ...) against its closed-form decay e^{-speed |xi|^2 t}."""
    u0 = single_mode(grid, k, amplitude=-0.5j, components=grid.d, component=0)
    xi_sq = sum((2 * math.pi * ki / a) ** 2 for ki, a in zip(k, grid.periods))
    expected = u0 * math.exp(-speed * xi_sq * t)
    return _relative(lame_flow(u0, t), expected)


def verify_semigroup(grid: PeriodicGrid, *, samples: int = DEFAULT_RANDOM_SAMPLES, seed: int = 0) -> SuiteReport:
    if grid.d < 2:
        raise UsageError("The semigroup suite needs d >= 2 for solenoidal test modes")
    rng = np.random.default_rng(seed)
    kmax = min(DEFAULT_RANDOM_KMAX, grid.N // 2 - 1)
    t, s = 0.3, 0.2
    e1 = tuple(int(i == 0) for i in range(grid.d))
    e2 = tuple(int(i == 1) for i in range(grid.d))
    checks = [
        _at_most("lame-solenoidal-mode", _mode_error(grid, e2, 1.0, t), FLOW_TOLERANCE),
        _at_most("lame-potential-mode", _mode_error(grid, e1, 2.0, t), FLOW_TOLERANCE),
    ]

    u0 = random_field(grid, rng, components=grid.d, kmax=kmax)
    checks.append(
        _at_most(
            "lame-divergence-heat",
            _relative(differentiate(lame_flow(u0, t), "divergence"), divergence_flow(u0, t)),
            FLOW_TOLERANCE,
        )
    )
    checks.append(
        _at_most("lame-semigroup", _relative(lame_flow(lame_flow(u0, s), t), lame_flow(u0, s + t)), FLOW_TOLERANCE)
    )

    forcing_mode = single_mode(grid, e1, amplitude=1.0, real=False)
    times = np.linspace(0.0, 1.0, 5)
    forcing = FieldTrajectory(grid, times, np.stack([forcing_mode.coeffs] * times.size))
    solution = duhamel(forcing_mode * 0.0, forcing, 1.0)
    checks.append(
        _at_most("duhamel-constant-forcing", _relative(solution, forcing_mode * (1 - math.exp(-1.0))), FLOW_TOLERANCE)
    )

    slope = 1.0
    worst = 0.0
    for k in (0.1, 1.0, 2.0, 3.7, 20.0):
        lam = k * k
        entries = coupled_mode_exponential(np.array([k]), np.array([lam]), slope, t)
        dense = expm(t * np.array([[0.0, -k], [slope * k, -lam]]))
        worst = max(worst, float(np.max(np.abs(np.array([e[0] for e in entries]).reshape(2, 2) - dense))))
    checks.append(_at_most("coupled-mode-expm", worst, FLOW_TOLERANCE, "against scipy.linalg.expm"))

    q0 = random_field(grid, rng, kmax=kmax)
    q_ts, u_ts = coupled_linear_flow(*coupled_linear_flow(q0, u0, s, pressure_slope=slope), t, pressure_slope=slope)
    q_direct, u_direct = coupled_linear_flow(q0, u0, s + t, pressure_slope=slope)
    checks.append(
        _at_most("coupled-semigroup", max(_relative(q_ts, q_direct), _relative(u_ts, u_direct)), FLOW_TOLERANCE)
    )

    smoothing_samples = max(samples // 10, 1)
    for rho1, rho2 in ((math.inf, 1.0), (1.0, 1.0)):
        checks.append(
            _finite_constant(measure_smoothing_estimate(grid, rho1=rho1, rho2=rho2, samples=smoothing_samples, seed=seed))
        )

    damping = damping_report(slope)
    checks.append(
        _at_most("damping-high-frequency-spread", damping.high_frequency_spread, DAMPING_PLATEAU_SPREAD, f"rate {damping.high_frequency_rate:.4f}")
    )
    checks.append(
        _at_most("damping-low-frequency-exponent", abs(damping.low_frequency_exponent - 2.0), DAMPING_EXPONENT_TOLERANCE)
    )
    return _report("semigroup", grid, checks)


def _report(name: str, grid: PeriodicGrid, checks: list[CheckResult]) -> SuiteReport:
    report = SuiteReport(name=name, grid_points=grid.N, dimension=grid.d, checks=checks, notes=grid.notes())
    failed = [c.name for c in checks if not c.passed]
    if failed:
        logger.warning(f"[Verify] Suite {name} on N={grid.N}: failed {failed}")
    else:
        logger.info(f"[Verify] Suite {name} on N={grid.N}: all {len(checks)} checks passed")
    return report


SUITES: dict[str, Callable[..., SuiteReport]] = {
    "lp": verify_lp,
    "paraproduct": verify_paraproduct,
    "semigroup": verify_semigroup,
}


def run_suite(name: str, grid: PeriodicGrid, *, samples: int = DEFAULT_RANDOM_SAMPLES, seed: int = 0) -> SuiteReport:
    if name not in SUITES:
        raise UsageError(f"Unknown suite {name}, expected one of {sorted(SUITES)}")
    return SUITES[name](grid, samples=samples, seed=seed)
