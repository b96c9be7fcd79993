"""
Fourier-multiplier differential operators and dealiased pointwise operations.

Pointwise work happens on a zero-padded physical grid of M = factor * N points per axis. The Nyquist
coefficient of the stored grid is split evenly between +N/2 and -N/2 on the padded grid, so real fields
stay real; results are truncated back with the Nyquist plane discarded.
"""

from typing import Literal

import numpy as np
from scipy import fft

from swbench.common.constants import PRODUCT_PADDING
from swbench.common.errors import UsageError
from swbench.spectral.field import SpectralField
from swbench.spectral.grid import PeriodicGrid

DifferentialOp = Literal["gradient", "divergence", "curl", "lame", "laplacian"]


def padded_size(grid: PeriodicGrid, factor: float) -> int:
    size = int(round(grid.N * factor))
    if size % 2:
        size += 1
    if size <= grid.N:
        raise UsageError(f"Padding factor {factor} does not enlarge a grid of {grid.N} points")
    return size


def _pad_axis(coeffs: np.ndarray, axis: int, size: int) -> np.ndarray:
    a = np.moveaxis(coeffs, axis, 0)
    half = a.shape[0] // 2
    out = np.zeros((size,) + a.shape[1:], dtype=np.complex128)
    out[:half] = a[:half]
    out[size - half + 1 :] = a[half + 1 :]
    out[half] = 0.5 * a[half]
    out[size - half] = 0.5 * a[half]
    return np.moveaxis(out, 0, axis)


def _truncate_axis(coeffs: np.ndarray, axis: int, points: int) -> np.ndarray:
    a = np.moveaxis(coeffs, axis, 0)
    size, half = a.shape[0], points // 2
    out = np.zeros((points,) + a.shape[1:], dtype=np.complex128)
    out[:half] = a[:half]
    out[half + 1 :] = a[size - half + 1 :]
    return np.moveaxis(out, 0, axis)


def pad_coeffs(u: SpectralField, size: int) -> np.ndarray:
    coeffs = u.coeffs
    for axis in range(1, u.grid.d + 1):
        coeffs = _pad_axis(coeffs, axis, size)
    return coeffs


def truncate_coeffs(padded: np.ndarray, grid: PeriodicGrid) -> np.ndarray:
    for axis in range(1, grid.d + 1):
        padded = _truncate_axis(padded, axis, grid.N)
    return padded


def padded_values(u: SpectralField, factor: float = PRODUCT_PADDING) -> np.ndarray:
    """Complex physical values of u on the padded grid, shape (components, M, ..., M)."""
    size = padded_size(u.grid, factor)
    axes = tuple(range(1, u.grid.d + 1))
    return fft.ifftn(pad_coeffs(u, size), axes=axes, norm="forward")


def from_padded_values(
    values: np.ndarray, grid: PeriodicGrid, *, mean_zero: bool = False
) -> SpectralField:
    if values.ndim == grid.d:
        values = values[np.newaxis]
    axes = tuple(range(1, grid.d + 1))
    padded = fft.fftn(values, axes=axes, norm="forward")
    return SpectralField(grid, truncate_coeffs(padded, grid), mean_zero=mean_zero)


def check_product_operands(u: SpectralField, v: SpectralField) -> None:
    if u.grid != v.grid:
        raise UsageError("dealiased_product needs both fields on the same grid")
    if u.components != v.components and not (u.is_scalar or v.is_scalar):
        raise UsageError(
            f"Cannot multiply fields with {u.components} and {v.components} components"
        )


def dealiased_product(
    u: SpectralField, v: SpectralField, factor: float = PRODUCT_PADDING
) -> SpectralField:
    """
    Pointwise product uv, truncated to the grid.
    With the default 3/2 padding the result equals the exact lattice convolution of the coefficients
    restricted to |k_i| < N/2.
    A scalar factor is broadcast over the components of the other field; equal component counts multiply componentwise.
    """
    check_product_operands(u, v)
    product = padded_values(u, factor) * padded_values(v, factor)
    return from_padded_values(product, u.grid, mean_zero=False).flagged(
        *(u.flags | v.flags)
    )


def _require_vector(u: SpectralField, op: str) -> None:
    if u.components != u.grid.d:
        raise UsageError(
            f"{op} needs a vector field with {u.grid.d} components, got {u.components}"
        )


def differentiate(u: SpectralField, op: DifferentialOp) -> SpectralField:
    """
    Fourier multipliers: gradient = i xi (x), divergence = i xi ., curl, lame: -|xi|^2 u - xi (xi . u),
    laplacian: -|xi|^2.
    Odd symbols use the Nyquist-free wavenumbers; the gradient of a c-component field has c*d components
    ordered as (component, axis).
    """
    grid = u.grid
    xi = grid.derivative_wavenumbers
    match op:
        case "gradient":
            coeffs = np.stack(
                [
                    1j * xi[j] * u.coeffs[i]
                    for i in range(u.components)
                    for j in range(grid.d)
                ]
            )
        case "divergence":
            _require_vector(u, op)
            coeffs = (1j * sum(xi[j] * u.coeffs[j] for j in range(grid.d)))[np.newaxis]
        case "curl":
            _require_vector(u, op)
            if grid.d == 1:
                raise UsageError("curl is undefined in one dimension")
            if grid.d == 2:
                coeffs = (1j * (xi[0] * u.coeffs[1] - xi[1] * u.coeffs[0]))[np.newaxis]
            else:
                coeffs = 1j * np.stack(
                    [
                        xi[1] * u.coeffs[2] - xi[2] * u.coeffs[1],
                        xi[2] * u.coeffs[0] - xi[0] * u.coeffs[2],
                        xi[0] * u.coeffs[1] - xi[1] * u.coeffs[0],
                    ]
                )
        case "lame":
            _require_vector(u, op)
            xi_dot_u = sum(xi[j] * u.coeffs[j] for j in range(grid.d))
            coeffs = np.stack(
                [-grid.xi_norm_sq * u.coeffs[i] - xi[i] * xi_dot_u for i in range(grid.d)]
            )
        case "laplacian":
            coeffs = -grid.xi_norm_sq * u.coeffs
        case _:
            raise UsageError(f"Unknown differential operator {op}")
    return SpectralField(grid, coeffs, mean_zero=True, flags=u.flags)


def potential_part(u: SpectralField) -> SpectralField:
    """Projection xi (xi . u) / |xi|^2 onto the compressible (curl-free) modes."""
    _require_vector(u, "potential_part")
    grid = u.grid
    xi = grid.derivative_wavenumbers
    norm_sq = grid.derivative_xi_norm_sq
    safe = np.where(norm_sq > 0, norm_sq, 1.0)
    xi_dot_u = sum(xi[j] * u.coeffs[j] for j in range(grid.d))
    coeffs = np.stack([np.where(norm_sq > 0, xi[i] * xi_dot_u / safe, 0.0) for i in range(grid.d)])
    return SpectralField(grid, coeffs, mean_zero=u.mean_zero, flags=u.flags)


def helmholtz_split(u: SpectralField) -> tuple[SpectralField, SpectralField]:
    """(solenoidal, potential) with solenoidal + potential = u."""
    potential = potential_part(u)
    solenoidal = SpectralField(
        u.grid, u.coeffs - potential.coeffs, mean_zero=u.mean_zero, flags=u.flags
    )
    return solenoidal, potential
