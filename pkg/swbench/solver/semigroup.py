"""
Exact Fourier propagators.

Every linear flow here is diagonal (heat, Lame) or 2x2 block-diagonal (coupled density-velocity system)
in the Fourier basis, so it is applied mode by mode in closed form. The Lame operator
A u = Delta u + grad div u has symbol -|xi|^2 on solenoidal modes and -(|xi|^2 + |xi~|^2) on potential
modes, where xi~ are the Nyquist-free derivative wavenumbers.
"""

import math
from typing import Literal

import numpy as np
from loguru import logger

from swbench.analysis.norms import besov_norm, chemin_lerner_norm
from swbench.common.constants import (
    COUPLED_SERIES_THRESHOLD,
    DEFAULT_RANDOM_KMAX,
    DEFAULT_RANDOM_SAMPLES,
    PHI_SERIES_THRESHOLD,
)
from swbench.common.errors import UsageError
from swbench.common.random_fields import random_field, random_trajectory
from swbench.pydantic_models.indices import BesovIndex
from swbench.pydantic_models.reports import MeasuredConstant
from swbench.spectral.field import SpectralField
from swbench.spectral.grid import PeriodicGrid
from swbench.spectral.operators import differentiate, helmholtz_split
from swbench.spectral.trajectory import FieldTrajectory

LinearOperator = Literal["heat", "lame"]
CoupledViscosity = Literal["laplacian", "lame"]


def _require_nonnegative_time(t: float) -> None:
    if t < 0:
        raise UsageError(f"Linear flows only run forward in time, got t={t}")


def _decay_pieces(
    u: SpectralField, operator: LinearOperator, diffusivity: float
) -> list[tuple[np.ndarray, np.ndarray]]:
    """(coefficients, decay rate per mode) for each invariant subspace of the operator."""
    grid = u.grid
    match operator:
        case "heat":
            return [(u.coeffs, diffusivity * grid.xi_norm_sq)]
        case "lame":
            solenoidal, potential = helmholtz_split(u)
            return [
                (solenoidal.coeffs, diffusivity * grid.xi_norm_sq),
                (
                    potential.coeffs,
                    diffusivity * (grid.xi_norm_sq + grid.derivative_xi_norm_sq),
                ),
            ]
        case _:
            raise UsageError(f"Unknown linear operator {operator}")


def heat_flow(u0: SpectralField, t: float, diffusivity: float = 1.0) -> SpectralField:
    """e^{t mu Delta} u0."""
    _require_nonnegative_time(t)
    return u0.with_coeffs(u0.coeffs * np.exp(-diffusivity * u0.grid.xi_norm_sq * t))


class LamePropagator:
    """
    e^{tA} for one fixed t, with the per-mode factors precomputed:
        e^{-|xi|^2 t} [(I - P) + e^{-|xi~|^2 t} P],   P = xi~ xi~^T / |xi~|^2.
    """

    def __init__(self, grid: PeriodicGrid, t: float) -> None:
        _require_nonnegative_time(t)
        self.grid = grid
        self.t = t
        self.solenoidal_factor = np.exp(-grid.xi_norm_sq * t)
        self.potential_factor = self.solenoidal_factor * np.exp(-grid.derivative_xi_norm_sq * t)

    def __call__(self, u: SpectralField) -> SpectralField:
        if u.grid != self.grid:
            raise UsageError("Propagator and field live on different grids")
        solenoidal, potential = helmholtz_split(u)
        coeffs = (
            self.solenoidal_factor * solenoidal.coeffs
            + self.potential_factor * potential.coeffs
        )
        return u.with_coeffs(coeffs)


def lame_flow(u0: SpectralField, t: float) -> SpectralField:
    """e^{tA} u0; its divergence is the diffusivity-2 heat flow of div u0 away from Nyquist planes."""
    if u0.components != u0.grid.d:
        raise UsageError(
            f"The Lame flow acts on vector fields with {u0.grid.d} components, got {u0.components}"
        )
    return LamePropagator(u0.grid, t)(u0)


def divergence_flow(u0: SpectralField, t: float) -> SpectralField:
    """Heat flow with diffusivity 2 of div u0, the evolution div(e^{tA} u0) is checked against."""
    return heat_flow(differentiate(u0, "divergence"), t, diffusivity=2.0)


def phi_functions(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    phi1(z) = (1 - e^-z) / z and psi(z) = (1 - e^-z (1 + z)) / z^2, i.e. the integrals over [0, 1] of
    e^{-z s} and s e^{-z s}. Taylor series near z = 0.
    """
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < PHI_SERIES_THRESHOLD
    safe = np.where(small, 1.0, z)
    decay = np.exp(-safe)
    phi1_series = 1 - z / 2 + z**2 / 6 - z**3 / 24 + z**4 / 120 - z**5 / 720 + z**6 / 5040
    psi_series = 0.5 - z / 3 + z**2 / 8 - z**3 / 30 + z**4 / 144 - z**5 / 840 + z**6 / 5760
    phi1 = np.where(small, phi1_series, -np.expm1(-safe) / safe)
    psi = np.where(small, psi_series, (1 - decay * (1 + safe)) / safe**2)
    return phi1, psi


def _segment_update(
    state: np.ndarray, rate: np.ndarray, h: float, f_start: np.ndarray, f_end: np.ndarray
) -> np.ndarray:
    """Exact solution over one segment of length h of y' = -rate y + f, f linear from f_start to f_end."""
    z = rate * h
    phi1, psi = phi_functions(z)
    return np.exp(-z) * state + h * (f_start * psi + f_end * (phi1 - psi))


def _check_forcing(u0: SpectralField, forcing: FieldTrajectory) -> None:
    if forcing.grid != u0.grid:
        raise UsageError("Forcing and initial data live on different grids")
    if forcing.components != u0.components:
        raise UsageError(
            f"Forcing has {forcing.components} components, initial data {u0.components}"
        )


def _march(
    u0: SpectralField,
    node_times: np.ndarray,
    node_coeffs: list[np.ndarray],
    operator: LinearOperator,
    diffusivity: float,
) -> list[np.ndarray]:
    """Coefficients of the Duhamel solution at every node, starting from u0 at node_times[0]."""
    pieces = _decay_pieces(u0, operator, diffusivity)
    forcing_pieces = [
        [c for c, _ in _decay_pieces(SpectralField(u0.grid, f), operator, diffusivity)]
        for f in node_coeffs
    ]
    states = [c for c, _ in pieces]
    rates = [r for _, r in pieces]
    history = [sum(states)]
    for i in range(len(node_times) - 1):
        h = float(node_times[i + 1] - node_times[i])
        states = [
            _segment_update(state, rate, h, forcing_pieces[i][p], forcing_pieces[i + 1][p])
            for p, (state, rate) in enumerate(zip(states, rates, strict=True))
        ]
        history.append(sum(states))
    return history


def duhamel(
    u0: SpectralField,
    forcing: FieldTrajectory,
    t: float,
    *,
    operator: LinearOperator = "heat",
    diffusivity: float = 1.0,
) -> SpectralField:
    """
    u(t) = e^{tL} u0 + int_0^t e^{(t - tau)L} f(tau) dtau with L = mu Delta or the Lame operator,
    the forcing taken piecewise linear between its samples and each mode integrated exactly.
    """
    _require_nonnegative_time(t)
    _check_forcing(u0, forcing)
    slack = 1e-12 * max(1.0, abs(t))
    if forcing.times[0] > slack or forcing.times[-1] < t - slack:
        raise UsageError(
            f"Forcing samples cover [{forcing.times[0]}, {forcing.times[-1]}], not [0, {t}]"
        )
    if t == 0:
        return u0
    t_end = min(t, float(forcing.times[-1]))
    inside = (forcing.times > 0) & (forcing.times < t_end)
    nodes = np.concatenate([[0.0], forcing.times[inside], [t_end]])
    start = max(0.0, float(forcing.times[0]))
    node_coeffs = [forcing.interpolate(start).coeffs]
    node_coeffs += list(forcing.coeffs[inside])
    node_coeffs.append(forcing.interpolate(t_end).coeffs)
    history = _march(u0, nodes, node_coeffs, operator, diffusivity)
    return u0.with_coeffs(history[-1], mean_zero=False)


def duhamel_trajectory(
    u0: SpectralField,
    forcing: FieldTrajectory,
    *,
    operator: LinearOperator = "heat",
    diffusivity: float = 1.0,
) -> FieldTrajectory:
    """The Duhamel solution at every forcing sample time, with u0 taken at the first one."""
    _check_forcing(u0, forcing)
    history = _march(
        u0, forcing.times, list(forcing.coeffs), operator, diffusivity
    )
    return FieldTrajectory(u0.grid, forcing.times, np.stack(history))


def measure_smoothing_estimate(
    grid: PeriodicGrid,
    *,
    rho1: float,
    rho2: float,
    s: float | None = None,
    diffusivity: float = 1.0,
    horizon: float = 1.0,
    steps: int = 64,
    samples: int = DEFAULT_RANDOM_SAMPLES,
    seed: int = 0,
    kmax: int = DEFAULT_RANDOM_KMAX,
) -> MeasuredConstant:
    """
    Measures the smallest C with
        ||u||_{L~^rho1 B^{s+2/rho1}_{2,1}} <= C (||u0||_{B^s_{2,1}} + mu^{1/rho2 - 1} ||f||_{L~^rho2 B^{s-2+2/rho2}_{2,1}})
    for random (u0, f) and u the heat-Duhamel solution with diffusivity mu; s = d/2 - 1 by default.
    """
    if not 1 <= rho2 <= rho1:
        raise UsageError(f"The smoothing estimate needs 1 <= rho2 <= rho1, got rho2={rho2}, rho1={rho1}")
    s = grid.d / 2 - 1 if s is None else s
    rng = np.random.default_rng(seed)
    times = np.linspace(0.0, horizon, steps + 1)
    kmax = min(kmax, grid.N // 2 - 1)
    gain1 = 0.0 if math.isinf(rho1) else 2.0 / rho1
    gain2 = 0.0 if math.isinf(rho2) else 2.0 / rho2
    solution_index = BesovIndex(s=s + gain1, p=2, r=1, rho=rho1)
    forcing_index = BesovIndex(s=s - 2 + gain2, p=2, r=1, rho=rho2)
    viscosity_weight = diffusivity ** ((0.0 if math.isinf(rho2) else 1.0 / rho2) - 1.0)
    worst = 0.0
    for _ in range(samples):
        u0 = random_field(grid, rng, kmax=kmax)
        forcing = random_trajectory(grid, rng, times, kmax=kmax)
        solution = duhamel_trajectory(u0, forcing, diffusivity=diffusivity)
        lhs = chemin_lerner_norm(solution, solution_index)
        rhs = besov_norm(u0, BesovIndex(s=s, p=2, r=1)) + viscosity_weight * chemin_lerner_norm(
            forcing, forcing_index
        )
        if rhs > 0:
            worst = max(worst, lhs / rhs)
    label = f"smoothing (s={s:g}, rho1={rho1:g}, rho2={rho2:g})"
    logger.info(f"[Verify] {label} constant on N={grid.N}: {worst:.4g}")
    return MeasuredConstant(
        name=label,
        value=worst,
        samples=samples,
        grid_points=grid.N,
        hypothesis="1 <= rho2 <= rho1 <= inf",
    )


# =============================================================
#              Coupled density-velocity linear flow
# =============================================================


def coupled_mode_exponential(
    frequency: np.ndarray, dissipation: np.ndarray, pressure_slope: float, t: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Entries (E00, E01, E10, E11) of exp(t M) with M = [[0, -k], [kappa k, -lam]], elementwise over the
    arrays k = frequency and lam = dissipation.
    """
    _require_nonnegative_time(t)
    k = np.asarray(frequency, dtype=float)
    lam = np.broadcast_to(np.asarray(dissipation, dtype=float), k.shape)
    center = -lam / 2
    omega = np.sqrt((lam**2 / 4 - pressure_slope * k**2).astype(np.complex128))
    x = omega * t
    series = np.abs(x) < COUPLED_SERIES_THRESHOLD

    # M - center I = [[lam/2, -k], [kappa k, -lam/2]]
    shifted = (lam / 2, -k, pressure_slope * k, -lam / 2)

    x2 = x * x
    cosh_series = 1 + x2 / 2 + x2**2 / 24 + x2**3 / 720
    sinhc_series = 1 + x2 / 6 + x2**2 / 120 + x2**3 / 5040

    # Eigenvalues mu_- = center - omega and mu_+ = det / mu_- (no cancellation for large real omega).
    mu_minus = center - omega
    determinant = pressure_slope * k**2
    safe_minus = np.where(mu_minus == 0, 1.0, mu_minus)
    mu_plus = np.where(mu_minus == 0, center + omega, determinant / safe_minus)
    gap = np.where(series, 1.0, mu_plus - mu_minus)
    exp_plus = np.exp(mu_plus * t)
    exp_minus = np.exp(mu_minus * t)

    scale = np.exp(center * t)
    entries = []
    diagonal = (True, False, False, True)
    for m, on_diagonal in zip(shifted, diagonal, strict=True):
        # Series: e^{ct} [cosh(x) I + t sinhc(x) (M - cI)]
        from_series = scale * ((cosh_series if on_diagonal else 0) + t * sinhc_series * m)
        # Eigen form: [e^{mu+ t} (M - mu- I) - e^{mu- t} (M - mu+ I)] / (mu+ - mu-)
        m_minus = m + (center - mu_minus if on_diagonal else 0)
        m_plus = m + (center - mu_plus if on_diagonal else 0)
        from_eigen = (exp_plus * m_minus - exp_minus * m_plus) / gap
        entries.append(np.real(np.where(series, from_series, from_eigen)))
    return entries[0], entries[1], entries[2], entries[3]


def coupled_dissipation(
    grid: PeriodicGrid, viscosity: CoupledViscosity, nu: float
) -> np.ndarray:
    """Decay rate lam of the potential velocity component: nu |xi|^2, or nu (|xi|^2 + |xi~|^2) for Lame."""
    match viscosity:
        case "laplacian":
            return nu * grid.xi_norm_sq
        case "lame":
            return nu * (grid.xi_norm_sq + grid.derivative_xi_norm_sq)
        case _:
            raise UsageError(f"Unknown viscosity {viscosity}")


def coupled_linear_flow(
    q0: SpectralField,
    u0: SpectralField,
    t: float,
    *,
    pressure_slope: float,
    viscosity: CoupledViscosity = "laplacian",
    nu: float = 1.0,
) -> tuple[SpectralField, SpectralField]:
    """
    Exact flow of  d_t q + div u = 0,  d_t u - nu L u + kappa grad q = 0  with kappa = P'(1).
    Per mode, with k = |xi~| and y = i (xi~ / k) . u, the pair (q, y) evolves by exp(t M); the solenoidal
    part of u evolves by heat with diffusivity nu.
    """
    _require_nonnegative_time(t)
    if not q0.is_scalar or u0.components != u0.grid.d or q0.grid != u0.grid:
        raise UsageError("coupled_linear_flow needs a scalar q0 and a vector u0 on one grid")
    if pressure_slope <= 0:
        logger.warning(
            f"[Damping] P'(1)={pressure_slope:g} <= 0: outside the damping regime"
        )
    grid = q0.grid
    xi = grid.derivative_wavenumbers
    k = np.sqrt(grid.derivative_xi_norm_sq)
    safe_k = np.where(k > 0, k, 1.0)
    unit = [np.where(k > 0, xi_i / safe_k, 0.0) for xi_i in xi]

    solenoidal, _ = helmholtz_split(u0)
    y = 1j * sum(unit[i] * u0.coeffs[i] for i in range(grid.d))
    e00, e01, e10, e11 = coupled_mode_exponential(
        k, coupled_dissipation(grid, viscosity, nu), pressure_slope, t
    )
    q_hat = q0.coeffs[0]
    q_t = e00 * q_hat + e01 * y
    y_t = e10 * q_hat + e11 * y

    solenoidal_t = solenoidal.coeffs * np.exp(-nu * grid.xi_norm_sq * t)
    potential_t = np.stack([-1j * unit[i] * y_t for i in range(grid.d)])
    return (
        q0.with_coeffs(q_t[np.newaxis]),
        u0.with_coeffs(solenoidal_t + potential_t),
    )
