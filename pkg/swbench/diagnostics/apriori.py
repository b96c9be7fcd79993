"""
Local a priori estimate checks.

The constants of the estimate are existential, so the transport constant C is measured on the run itself
(EstimateLedger.transport_constant) and C' = e^{3C}(1 + ||q0||_{B^{d/2}_{2,1}}) - 1. With those values:

    hypotheses   ||q0 - S_m q0||_{B^{d/2}_{2,1}} <= eta^2
                 int_0^T (||grad u_L||_{B^{d/2}_{2,2} cap B^0_{inf,1}} + ||div u_L||_{B^{d/2}_{2,1}}) <= eta^2
                 T C' + (1 + C')(e^{C V(T)} - 1) + 2^{alpha m} T^{alpha/2} C' <= eta^2
                 eta e^{3 C eta} (1 + C') (1 + ||u0||_{B^{d/2-1}_{2,2} cap B^{-1}_{inf,1}}) <= 1/2
    conclusions  ||q||_{L~^inf_T B^{d/2}_{2,1}} <= e^{3 C eta}(1 + ||q0||_{B^{d/2}_{2,1}}) - 1
                 beta(T) <= 2 eta
"""

import math

import numpy as np
from loguru import logger

from swbench.analysis.littlewood_paley import low_cutoff, make_partition
from swbench.analysis.norms import besov_norm
from swbench.common.constants import (
    DEFAULT_ALPHA,
    HORIZON_BISECTION_STEPS,
    PILOT_HORIZON,
    PILOT_SAMPLES,
)
from swbench.common.errors import ResolutionError, UsageError
from swbench.diagnostics.ledger import EstimateLedger, LedgerRow
from swbench.pydantic_models.diagnostics import AprioriReport, HorizonChoice
from swbench.pydantic_models.indices import BesovIndex
from swbench.pydantic_models.reports import InequalityRow
from swbench.solver.friedrichs import FriedrichsSolver
from swbench.solver.state import Schedule, Trajectory
from swbench.spectral.field import SpectralField

# Largest constant tried when bracketing the admissible C from above.
_CONSTANT_CEILING = 1e6
_PILOT_DOUBLINGS = 10


def _require_eta(eta: float) -> None:
    if not 0 < eta <= 1:
        raise UsageError(f"eta must lie in (0, 1], received {eta}")


def cutoff_tail(q0: SpectralField, m: int) -> float:
    """||q0 - S_m q0||_{B^{d/2}_{2,1}}."""
    return besov_norm(q0 - low_cutoff(q0, m), BesovIndex(s=q0.grid.d / 2, p=2, r=1))


def select_cutoff(q0: SpectralField, eta: float) -> int:
    """Smallest m in the resolvable block range with ||q0 - S_m q0||_{B^{d/2}_{2,1}} <= eta^2."""
    _require_eta(eta)
    partition = make_partition(q0.grid)
    for m in partition.j_range:
        if cutoff_tail(q0, m) <= eta**2:
            logger.debug(f"[Apriori] Cut-off m={m} for eta={eta:g}")
            return m
    raise ResolutionError(
        f"No block up to j_max={partition.j_max} brings the tail of q0 below eta^2={eta**2:.3e}"
    )


def c_prime(transport_constant: float, q0_norm: float) -> float:
    return math.exp(3 * transport_constant) * (1 + q0_norm) - 1


def nonlinear_smallness(
    horizon: float, V: float, constant: float, q0_norm: float, m: int, alpha: float
) -> float:
    """T C' + (1 + C')(e^{C V(T)} - 1) + 2^{alpha m} T^{alpha/2} C'."""
    if math.isinf(constant):
        return math.inf
    cp = c_prime(constant, q0_norm)
    return (
        horizon * cp
        + (1 + cp) * math.expm1(constant * V)
        + 2.0 ** (alpha * m) * horizon ** (alpha / 2) * cp
    )


def eta_condition(eta: float, constant: float, q0_norm: float, u0_norm: float) -> float:
    """eta e^{3 C eta} (1 + C') (1 + ||u0||)."""
    return eta * math.exp(3 * constant * eta) * (1 + c_prime(constant, q0_norm)) * (1 + u0_norm)


def _constant_dependent_hold(
    constant: float, row: LedgerRow, eta: float, m: int, alpha: float, q0_norm: float, u0_norm: float
) -> bool:
    return (
        nonlinear_smallness(row.time, row.V, constant, q0_norm, m, alpha) <= eta**2
        and eta_condition(eta, constant, q0_norm, u0_norm) <= 0.5
    )


def largest_admissible_constant(
    row: LedgerRow, eta: float, m: int, alpha: float, q0_norm: float, u0_norm: float
) -> float | None:
    """Bisection for the largest C keeping the C-dependent hypotheses true; None when C = 0 already fails."""
    args = (row, eta, m, alpha, q0_norm, u0_norm)
    if not _constant_dependent_hold(0.0, *args):
        return None
    high = 1.0
    while _constant_dependent_hold(high, *args):
        high *= 2
        if high > _CONSTANT_CEILING:
            return math.inf
    low = 0.0
    for _ in range(HORIZON_BISECTION_STEPS):
        middle = (low + high) / 2
        if _constant_dependent_hold(middle, *args):
            low = middle
        else:
            high = middle
    return low


def check_apriori(
    trajectory: Trajectory,
    eta: float,
    m: int,
    *,
    alpha: float = DEFAULT_ALPHA,
    ledger: EstimateLedger | None = None,
) -> AprioriReport:
    """Evaluates hypotheses and conclusions at the last sample; failures are rows, never exceptions."""
    _require_eta(eta)
    ledger = ledger or EstimateLedger.from_trajectory(trajectory)
    first, last = ledger.rows[0], ledger.final
    q0 = trajectory.initial.q
    q0_norm = first.q_linf
    u0_norm = first.ulin_linf_b22 + first.ulin_linf_binf
    constant = ledger.transport_constant()
    cp = c_prime(constant, q0_norm)

    notes = list(trajectory.grid.notes())
    if not trajectory.completed:
        notes.append(f"run stopped early: {trajectory.blowup.describe()}")
    if math.isinf(constant):
        notes.append("density grew while V stayed 0: no finite transport constant")

    hypotheses = [
        InequalityRow(name="cutoff", lhs=cutoff_tail(q0, m), rhs=eta**2),
        InequalityRow(name="smallness-linear", lhs=last.linear_smallness, rhs=eta**2),
        InequalityRow(
            name="smallness-nonlinear",
            lhs=nonlinear_smallness(last.time, last.V, constant, q0_norm, m, alpha),
            rhs=eta**2,
        ),
        InequalityRow(
            name="eta-condition", lhs=eta_condition(eta, constant, q0_norm, u0_norm), rhs=0.5
        ),
    ]
    asserted = all(h.holds for h in hypotheses)
    conclusions = [
        InequalityRow(
            name="density-bound",
            lhs=last.q_linf,
            rhs=math.exp(3 * constant * eta) * (1 + q0_norm) - 1,
            kind="conclusion",
            asserted=asserted,
        ),
        InequalityRow(
            name="velocity-bound", lhs=last.beta, rhs=2 * eta, kind="conclusion", asserted=asserted
        ),
    ]
    report = AprioriReport(
        eta=eta,
        m=m,
        alpha=alpha,
        horizon=last.time,
        transport_constant=constant,
        c_prime=cp,
        largest_admissible_constant=largest_admissible_constant(
            last, eta, m, alpha, q0_norm, u0_norm
        ),
        rows=hypotheses + conclusions,
        notes=notes,
    )
    violation = report.first_violation()
    if violation is not None:
        logger.warning(
            f"[Apriori] Hypothesis {violation.name} violated: {violation.lhs:.4e} > {violation.rhs:.4e}; conclusions not asserted"
        )
    else:
        logger.info(
            f"[Apriori] Hypotheses hold at T={last.time:.4g}; beta(T)={last.beta:.4e} vs 2 eta={2 * eta:g}"
        )
    return report


def _time_conditions_hold(
    time: float, V: float, linear: float, constant: float, q0_norm: float, m: int, alpha: float, eta: float
) -> bool:
    return (
        linear <= eta**2
        and nonlinear_smallness(time, V, constant, q0_norm, m, alpha) <= eta**2
    )


def admissible_horizon(
    ledger: EstimateLedger, eta: float, m: int, alpha: float = DEFAULT_ALPHA
) -> tuple[float, str]:
    """
    Largest T inside the ledger's span meeting both time-dependent smallness conditions, with V and the linear
    integral interpolated linearly between samples. Returns (T, limiting condition or "pilot-horizon").
    """
    _require_eta(eta)
    constant = ledger.transport_constant()
    q0_norm = ledger.rows[0].q_linf
    times = ledger.column("time")
    V = ledger.column("V")
    linear = ledger.column("linear_smallness")

    def holds(t: float) -> bool:
        return _time_conditions_hold(
            t, float(np.interp(t, times, V)), float(np.interp(t, times, linear)),
            constant, q0_norm, m, alpha, eta,
        )

    failing = [i for i in range(len(times)) if not holds(float(times[i]))]
    if not failing:
        return float(times[-1]), "pilot-horizon"
    index = failing[0]
    low, high = float(times[index - 1]) if index > 0 else 0.0, float(times[index])
    for _ in range(HORIZON_BISECTION_STEPS):
        middle = (low + high) / 2
        if holds(middle):
            low = middle
        else:
            high = middle
    row_linear = float(np.interp(high, times, linear))
    limited_by = "smallness-linear" if row_linear > eta**2 else "smallness-nonlinear"
    return low, limited_by


def select_horizon(
    solver: FriedrichsSolver,
    q0: SpectralField,
    u0: SpectralField,
    eta: float,
    m: int,
    *,
    alpha: float = DEFAULT_ALPHA,
    pilot_horizon: float = PILOT_HORIZON,
) -> HorizonChoice:
    """
    Picks T from pilot runs: the pilot is doubled while the whole pilot stays admissible, then T is bisected
    inside the first pilot whose end violates a smallness condition.
    """
    for _ in range(_PILOT_DOUBLINGS):
        schedule = Schedule(sample_interval=pilot_horizon / PILOT_SAMPLES)
        pilot = solver.run(q0, u0, pilot_horizon, schedule, survey=True)
        ledger = EstimateLedger.from_trajectory(pilot)
        horizon, limited_by = admissible_horizon(ledger, eta, m, alpha)
        if limited_by != "pilot-horizon" or not pilot.completed:
            break
        pilot_horizon *= 2
    if not pilot.completed and limited_by == "pilot-horizon":
        limited_by = "pilot-blowup"
    if not horizon > 0:
        raise ResolutionError(
            f"The smallness conditions fail before the first pilot sample at t={pilot_horizon / PILOT_SAMPLES:.3e}"
        )
    choice = HorizonChoice(
        horizon=horizon,
        pilot_horizon=pilot_horizon,
        transport_constant=ledger.transport_constant(),
        limited_by=limited_by,
    )
    logger.info(
        f"[Apriori] Selected T={horizon:.4e} from a pilot to {pilot_horizon:.3g} (limited by {limited_by})"
    )
    return choice
