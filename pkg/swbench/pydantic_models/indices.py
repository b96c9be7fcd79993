import math

from pydantic import ConfigDict
from pydantic.dataclasses import dataclass

from swbench.pydantic_models.common.constrained_types import Exponent, FiniteFloat


@dataclass(frozen=True, config=ConfigDict(extra="forbid"))
class BesovIndex:
    """
    Regularity s, Lebesgue exponent p, summation exponent r and, for Chemin-Lerner norms, time exponent rho.
    Infinite exponents are math.inf.
    """

    s: FiniteFloat
    p: Exponent = 2.0
    r: Exponent = 1.0
    rho: Exponent | None = None

    def label(self) -> str:
        def fmt(x: float) -> str:
            return "inf" if math.isinf(x) else f"{x:g}"

        base = f"B^{self.s:g}_{{{fmt(self.p)},{fmt(self.r)}}}"
        return base if self.rho is None else f"L~^{fmt(self.rho)} {base}"


@dataclass(frozen=True, config=ConfigDict(extra="forbid"))
class HybridIndex:
    """Regularity s_low on blocks j < threshold and s_high on blocks j >= threshold (p=2, r=1)."""

    s_low: FiniteFloat
    s_high: FiniteFloat
    threshold: int
