import numpy as np
from pydantic import ConfigDict
from pydantic.dataclasses import dataclass

from swbench.analysis.composition import Nonlinearity
from swbench.common.constants import DEFAULT_GAMMA, DEFAULT_PRESSURE_COEFFICIENT
from swbench.pydantic_models.common.constrained_types import PositiveFloat


@dataclass(frozen=True, config=ConfigDict(extra="forbid"))
class PressureLaw:
    """
    P(rho) = A rho^gamma, and G the primitive of P'(rho)/rho with G(1) = 0:
    G(rho) = A gamma / (gamma - 1) (rho^(gamma-1) - 1), or A ln(rho) for gamma = 1.
    gamma = 2, A = 1 is the classical shallow-water law with G(rho) = 2 (rho - 1).
    """

    gamma: PositiveFloat = DEFAULT_GAMMA
    coefficient: PositiveFloat = DEFAULT_PRESSURE_COEFFICIENT

    @property
    def equilibrium_slope(self) -> float:
        """P'(1), which decides the damping regime of the linearized system."""
        return self.coefficient * self.gamma

    def pressure(self, rho: np.ndarray) -> np.ndarray:
        return self.coefficient * np.power(rho, self.gamma)

    def pressure_derivative(self, rho: np.ndarray) -> np.ndarray:
        return self.coefficient * self.gamma * np.power(rho, self.gamma - 1)

    def enthalpy(self, rho: np.ndarray) -> np.ndarray:
        """G(rho)."""
        if self.gamma == 1.0:
            return self.coefficient * np.log(rho)
        scale = self.coefficient * self.gamma / (self.gamma - 1)
        return scale * np.expm1((self.gamma - 1) * np.log(rho))

    def enthalpy_derivative(self, rho: np.ndarray) -> np.ndarray:
        """G'(rho) = P'(rho) / rho."""
        return self.coefficient * self.gamma * np.power(rho, self.gamma - 2)

    def as_nonlinearity(self) -> Nonlinearity:
        """q -> G(1+q), which vanishes at q = 0."""
        return Nonlinearity(
            f"G(1+.) gamma={self.gamma:g}",
            lambda q: self.enthalpy(1.0 + q),
            vacuum_guard=True,
        )

    def derivative_nonlinearity(self) -> Nonlinearity:
        """q -> G'(1+q)."""
        return Nonlinearity(
            f"G'(1+.) gamma={self.gamma:g}",
            lambda q: self.enthalpy_derivative(1.0 + q),
            vacuum_guard=True,
        )
