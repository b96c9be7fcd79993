import math

from pydantic import field_validator
from pydantic.dataclasses import dataclass

from swbench.pydantic_models.common.constrained_types import (
    NonNegativeFloat,
    PositiveFloat,
)
from swbench.pydantic_models.reports import InequalityRow


@dataclass(kw_only=True, frozen=True)
class AprioriReport:
    """
    One instance of the local a priori estimate: hypotheses evaluated with the measured transport constant,
    conclusions asserted only when every hypothesis holds.
    """

    eta: PositiveFloat
    m: int
    alpha: PositiveFloat
    horizon: NonNegativeFloat
    transport_constant: float
    c_prime: float
    largest_admissible_constant: float | None
    rows: list[InequalityRow]
    notes: list[str]

    @field_validator("eta")
    @classmethod
    def check_eta(cls, v: float) -> float:
        if v > 1:
            raise ValueError(f"eta must lie in (0, 1], received {v}")
        return v

    @property
    def hypotheses(self) -> list[InequalityRow]:
        return [r for r in self.rows if r.kind == "hypothesis"]

    @property
    def conclusions(self) -> list[InequalityRow]:
        return [r for r in self.rows if r.kind == "conclusion"]

    @property
    def hypotheses_hold(self) -> bool:
        return all(r.holds for r in self.hypotheses)

    @property
    def conclusions_hold(self) -> bool:
        return all(r.holds for r in self.conclusions)

    def first_violation(self) -> InequalityRow | None:
        return next((r for r in self.hypotheses if not r.holds), None)

    def row(self, name: str) -> InequalityRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "eta": self.eta,
            "m": self.m,
            "alpha": self.alpha,
            "horizon": self.horizon,
            "transport_constant": self.transport_constant,
            "c_prime": self.c_prime,
            "largest_admissible_constant": self.largest_admissible_constant,
            "hypotheses_hold": self.hypotheses_hold,
            "conclusions_hold": self.conclusions_hold,
            "rows": [r.to_json() for r in self.rows],
            "notes": self.notes,
        }


@dataclass(kw_only=True, frozen=True)
class HorizonChoice:
    """The horizon picked from a pilot run as the largest T meeting both time-dependent smallness conditions."""

    horizon: PositiveFloat
    pilot_horizon: PositiveFloat
    transport_constant: float
    limited_by: str


@dataclass(kw_only=True, frozen=True)
class GapRow:
    """Difference norms of two runs at one sample time."""

    time: float
    dq_linf: NonNegativeFloat  # L~^inf_t B^{d/2-1}_{2,1}
    du_linf: NonNegativeFloat  # L~^inf_t B^{d/2-2}_{2,1} (d >= 3) or B^{d/2-2}_{2,inf} (d <= 2)
    du_l1: NonNegativeFloat  # L^1_t B^{d/2}_{2,1} (d >= 3) or B^{d/2}_{2,inf} (d <= 2)
    du_l1_b21: NonNegativeFloat  # L^1_t B^{d/2}_{2,1}
    beta_delta: NonNegativeFloat
    osgood_modulus: NonNegativeFloat
    V: NonNegativeFloat


@dataclass(kw_only=True, frozen=True)
class GapReport:
    route: str
    rows: list[GapRow]
    gronwall_factor: NonNegativeFloat  # smallest c0 e^{CV(t)} bounding ||dq|| by ||du||_{L^1 B^{d/2}_{2,1}}
    interpolation_constant: NonNegativeFloat
    growth_exponent: float | None
    linear_part_mismatch: bool
    notes: list[str]

    @property
    def terminal(self) -> GapRow:
        return self.rows[-1]

    def to_json(self) -> dict:
        return {
            "route": self.route,
            "terminal": {
                "time": self.terminal.time,
                "dq_linf": self.terminal.dq_linf,
                "beta_delta": self.terminal.beta_delta,
                "osgood_modulus": self.terminal.osgood_modulus,
            },
            "gronwall_factor": self.gronwall_factor,
            "interpolation_constant": self.interpolation_constant,
            "growth_exponent": self.growth_exponent,
            "linear_part_mismatch": self.linear_part_mismatch,
            "notes": self.notes,
        }


@dataclass(kw_only=True, frozen=True)
class DampingRow:
    frequency: PositiveFloat
    rate: float
    regime: str


@dataclass(kw_only=True, frozen=True)
class DampingReport:
    pressure_slope: float
    viscosity: str
    rows: list[DampingRow]
    boundary: float | None
    low_frequency_exponent: float | None
    high_frequency_rate: float | None
    high_frequency_spread: float | None
    hybrid_decay: list[tuple[float, float]]
    degenerate: bool
    notes: list[str]

    @field_validator("low_frequency_exponent", "high_frequency_rate", "high_frequency_spread")
    @classmethod
    def check_finite(cls, v: float | None) -> float | None:
        if v is not None and math.isnan(v):
            raise ValueError("Damping fits cannot be NaN")
        return v

    def to_json(self) -> dict:
        return {
            "pressure_slope": self.pressure_slope,
            "viscosity": self.viscosity,
            "boundary": self.boundary,
            "low_frequency_exponent": self.low_frequency_exponent,
            "high_frequency_rate": self.high_frequency_rate,
            "high_frequency_spread": self.high_frequency_spread,
            "degenerate": self.degenerate,
            "rates": [
                {"frequency": r.frequency, "rate": r.rate, "regime": r.regime}
                for r in self.rows
            ],
            "hybrid_decay": [{"time": t, "norm": v} for t, v in self.hybrid_decay],
            "notes": self.notes,
        }


@dataclass(kw_only=True, frozen=True)
class SweepRow:
    """One run of a parameter sweep."""

    label: str
    parameter: float
    value: float
    completed: bool
    extra: dict[str, float]


@dataclass(kw_only=True, frozen=True)
class SweepReport:
    name: str
    rows: list[SweepRow]
    verdict: bool
    fit: float | None
    notes: list[str]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "verdict": self.verdict,
            "fit": self.fit,
            "rows": [
                {
                    "label": r.label,
                    "parameter": r.parameter,
                    "value": r.value,
                    "completed": r.completed,
                    **r.extra,
                }
                for r in self.rows
            ],
            "notes": self.notes,
        }


@dataclass(kw_only=True, frozen=True)
class HypothesisNorms:
    """Discrete norms of every quantity the well-posedness hypotheses constrain."""

    u0_b22: NonNegativeFloat  # B^{d/2-1}_{2,2}
    u0_binf: NonNegativeFloat  # B^{-1}_{inf,1}
    div_u0: NonNegativeFloat  # B^{d/2-2}_{2,1}
    q0_low: NonNegativeFloat  # B^{d/2-1}_{2,1}
    q0_high: NonNegativeFloat  # B^{d/2}_{2,1}
    min_density: float

    @property
    def global_smallness(self) -> float:
        """E0 = ||q0||_{B^{d/2-1}_{2,1} cap B^{d/2}_{2,1}} + ||u0||_{B^{d/2-1}_{2,2}}."""
        return self.q0_low + self.q0_high + self.u0_b22

    def to_json(self) -> dict[str, float]:
        return {
            "u0_b22": self.u0_b22,
            "u0_binf": self.u0_binf,
            "div_u0": self.div_u0,
            "q0_low": self.q0_low,
            "q0_high": self.q0_high,
            "min_density": self.min_density,
            "global_smallness": self.global_smallness,
        }
