import math

from pydantic import field_validator, model_validator
from pydantic.dataclasses import dataclass

from swbench.pydantic_models.common.constrained_types import (
    NonEmptyStr,
    NonNegativeFloat,
    NonNegativeInt,
)


@dataclass(kw_only=True, frozen=True)
class BlowUpReport:
    """
    Describes why a solver run stopped before its horizon.
    This is different from a 'failed estimate', which is a report row and never stops a run.
    """

    reason: NonEmptyStr
    time: NonNegativeFloat
    step: NonNegativeInt
    min_density: float
    max_velocity: float

    def describe(self) -> str:
        return (
            f"{self.reason} at t={self.time:.6g} (step {self.step}),"
            f" min(1+q)={self.min_density:.3e}, max|u|={self.max_velocity:.3e}"
        )


@dataclass(kw_only=True, frozen=True)
class InequalityRow:
    """One instance of an estimate: lhs <= rhs, with the margin rhs - lhs."""

    name: NonEmptyStr
    lhs: float
    rhs: float
    kind: NonEmptyStr = "hypothesis"
    asserted: bool = True

    @field_validator("kind")
    @classmethod
    def check_kind(cls, v: str) -> str:
        if v not in ("hypothesis", "conclusion", "check"):
            raise ValueError(f"Unknown inequality kind {v}")
        return v

    @property
    def holds(self) -> bool:
        return bool(self.lhs <= self.rhs)

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    def to_json(self) -> dict[str, float | str | bool]:
        return {
            "name": self.name,
            "kind": self.kind,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
            "margin": self.margin,
            "asserted": self.asserted,
        }


@dataclass(kw_only=True, frozen=True)
class MeasuredConstant:
    """
    The smallest constant making every sampled instance of an estimate true,
    i.e. the maximum over samples of lhs / rhs.
    """

    name: NonEmptyStr
    value: NonNegativeFloat
    samples: NonNegativeInt
    grid_points: NonNegativeInt
    hypothesis: str | None = None

    @field_validator("value")
    @classmethod
    def check_value(cls, v: float) -> float:
        if math.isnan(v):
            raise ValueError("A measured constant cannot be NaN")
        return v

    def to_json(self) -> dict[str, float | int | str | None]:
        return {
            "name": self.name,
            "value": self.value,
            "samples": self.samples,
            "grid_points": self.grid_points,
            "hypothesis": self.hypothesis,
        }


@dataclass(kw_only=True, frozen=True)
class CheckResult:
    name: NonEmptyStr
    value: float
    bound: float | None = None
    passed: bool
    detail: str | None = None

    def to_json(self) -> dict[str, float | str | bool | None]:
        return {
            "name": self.name,
            "value": self.value,
            "bound": self.bound,
            "passed": self.passed,
            "detail": self.detail,
        }


@dataclass(kw_only=True, frozen=True)
class SuiteReport:
    name: NonEmptyStr
    grid_points: NonNegativeInt
    dimension: NonNegativeInt
    checks: list[CheckResult]
    notes: list[str]

    @model_validator(mode="after")
    def check_at_least_one_check(self) -> "SuiteReport":
        if not self.checks:
            raise ValueError("A suite report needs at least one check")
        return self

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "grid_points": self.grid_points,
            "dimension": self.dimension,
            "passed": self.passed,
            "checks": [c.to_json() for c in self.checks],
            "notes": self.notes,
        }
