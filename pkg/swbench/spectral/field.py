"""
Fourier-coefficient carrier for scalar and vector fields.

Normalization: the forward transform carries 1/N^d, so the k=0 coefficient is the spatial mean
and Parseval reads mean(|v|^2) = sum_k |c_k|^2, i.e. ||v||_{L^2}^2 = |T^d_a| * sum_k |c_k|^2.
"""

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import fft

from swbench.common.errors import UsageError
from swbench.spectral.grid import PeriodicGrid


@dataclass(frozen=True, eq=False)
class SpectralField:
    grid: PeriodicGrid
    coeffs: np.ndarray  # shape (components, *grid.shape), complex
    mean_zero: bool = False
    flags: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs)
        if coeffs.ndim != self.grid.d + 1 or coeffs.shape[1:] != self.grid.shape:
            raise UsageError(
                f"Coefficient array of shape {coeffs.shape} does not fit grid {self.grid.shape} with a leading component axis"
            )
        coeffs = coeffs.astype(np.complex128, copy=True)
        if self.mean_zero:
            coeffs[(slice(None),) + (0,) * self.grid.d] = 0.0
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def components(self) -> int:
        return self.coeffs.shape[0]

    @property
    def is_scalar(self) -> bool:
        return self.components == 1

    @property
    def mean(self) -> np.ndarray:
        """Zero-mode coefficient per component (the spatial mean)."""
        return self.coeffs[(slice(None),) + (0,) * self.grid.d].real.copy()

    @property
    def values(self) -> np.ndarray:
        return inverse(self)

    def component(self, index: int) -> "SpectralField":
        return replace(self, coeffs=self.coeffs[index : index + 1])

    def with_coeffs(self, coeffs: np.ndarray, **changes) -> "SpectralField":
        return replace(self, coeffs=coeffs, **changes)

    def flagged(self, *flags: str) -> "SpectralField":
        return replace(self, flags=self.flags | frozenset(flags))

    def _check_compatible(self, other: "SpectralField") -> None:
        if self.grid != other.grid:
            raise UsageError("Fields live on different grids")
        if self.components != other.components:
            raise UsageError(
                f"Component mismatch: {self.components} vs {other.components}"
            )

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return SpectralField(
            self.grid,
            self.coeffs + other.coeffs,
            mean_zero=self.mean_zero and other.mean_zero,
            flags=self.flags | other.flags,
        )

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return SpectralField(
            self.grid,
            self.coeffs - other.coeffs,
            mean_zero=self.mean_zero and other.mean_zero,
            flags=self.flags | other.flags,
        )

    def __mul__(self, scalar: complex) -> "SpectralField":
        return replace(self, coeffs=self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return replace(self, coeffs=-self.coeffs)

    def max_abs_coeff(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0


def _spatial_axes(grid: PeriodicGrid) -> tuple[int, ...]:
    return tuple(range(1, grid.d + 1))


def zeros(grid: PeriodicGrid, components: int = 1, mean_zero: bool = True) -> SpectralField:
    return SpectralField(
        grid, np.zeros((components,) + grid.shape, dtype=np.complex128), mean_zero
    )


def transform(
    grid: PeriodicGrid, values: np.ndarray, *, mean_zero: bool = False
) -> SpectralField:
    """Physical samples (grid.shape for a scalar, (c, *grid.shape) for c components) to coefficients."""
    values = np.asarray(values)
    if values.shape == grid.shape:
        values = values[np.newaxis]
    if values.ndim != grid.d + 1 or values.shape[1:] != grid.shape:
        raise UsageError(
            f"Sample array of shape {values.shape} does not match grid {grid.shape}"
        )
    coeffs = fft.fftn(values, axes=_spatial_axes(grid), norm="forward")
    return SpectralField(grid, coeffs, mean_zero=mean_zero)


def inverse(u: SpectralField, *, real: bool = True) -> np.ndarray:
    values = fft.ifftn(u.coeffs, axes=_spatial_axes(u.grid), norm="forward")
    return values.real if real else values


def pointwise_magnitude(values: np.ndarray) -> np.ndarray:
    """Euclidean norm over the leading component axis."""
    if values.shape[0] == 1:
        return np.abs(values[0])
    return np.sqrt(np.sum(np.abs(values) ** 2, axis=0))


def lp_norm_of_values(values: np.ndarray, grid: PeriodicGrid, p: float) -> float:
    """Rectangle-rule L^p norm over T^d_a of the pointwise Euclidean magnitude."""
    magnitude = pointwise_magnitude(values)
    if np.isinf(p):
        return float(magnitude.max())
    return float((grid.volume * np.mean(magnitude**p)) ** (1.0 / p))


def lp_norm(u: SpectralField, p: float = 2.0) -> float:
    if p == 2.0:
        return parseval_l2(u)
    return lp_norm_of_values(inverse(u, real=False), u.grid, p)


def parseval_l2(u: SpectralField) -> float:
    return float(np.sqrt(u.grid.volume * np.sum(np.abs(u.coeffs) ** 2)))


def hermitian_defect(u: SpectralField) -> float:
    """Relative size of the imaginary part of the physical field; 0 for an exactly real field."""
    values = inverse(u, real=False)
    scale = np.max(np.abs(values))
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(values.imag)) / scale)
