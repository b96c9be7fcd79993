"""
Scenario files: TOML with the sections [grid], [physics], [initial_data], [run], [estimates], [output].
Unknown keys anywhere are rejected.
"""

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from swbench.common.constants import (
    DEFAULT_ALPHA,
    DEFAULT_CFL_FACTOR,
    DEFAULT_ETA,
    DEFAULT_GAMMA,
    DEFAULT_PERIOD,
    DEFAULT_PRESSURE_COEFFICIENT,
    DEFAULT_RANDOM_KMAX,
    MAX_CFL_FACTOR,
)
from swbench.pydantic_models.common.constrained_types import (
    NonEmptyStr,
    NonNegativeFloat,
    PositiveFloat,
    PositiveInt,
)

InitialDataFamily = Literal["trigonometric", "multiscale", "near-vacuum"]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class GridSection(_Section):
    d: int = 2
    N: PositiveInt = 64
    a: PositiveFloat | list[PositiveFloat] = DEFAULT_PERIOD  # one period, or one per axis

    @model_validator(mode="after")
    def check_period_count(self) -> "GridSection":
        if isinstance(self.a, list) and len(self.a) != self.d:
            raise ValueError(f"Received {len(self.a)} periods for a {self.d}-dimensional grid")
        return self

    @property
    def periods(self) -> float | tuple[float, ...]:
        return tuple(self.a) if isinstance(self.a, list) else self.a



class PhysicsSection(_Section):
    gamma: PositiveFloat = DEFAULT_GAMMA
    coefficient: PositiveFloat = DEFAULT_PRESSURE_COEFFICIENT
    linear_only: bool = False


class InitialDataSection(_Section):
    family: InitialDataFamily = "multiscale"
    seed: int = 0

    # trigonometric and near-vacuum
    q_amplitude: float = 0.0
    u_amplitude: float = 0.0
    modes: list[list[int]] | None = None

    # multiscale
    q_target: NonNegativeFloat = 0.05  # ||q0||_{B^{d/2}_{2,1}}
    u_target: NonNegativeFloat = 0.05  # ||u0||_{B^{d/2-1}_{2,2}}
    decay: float = 1.0  # eps_j = 2^{-decay (j - j_min)}
    kmax: PositiveInt = DEFAULT_RANDOM_KMAX

    # near-vacuum
    min_density: PositiveFloat = 1e-3

    @field_validator("min_density")
    @classmethod
    def check_min_density(cls, v: float) -> float:
        if v >= 1:
            raise ValueError(f"min_density must lie below the equilibrium density 1, received {v}")
        return v


class RunSection(_Section):
    T: PositiveFloat | Literal["auto"] = "auto"
    n: PositiveFloat | None = None  # None -> N / 3
    dt: PositiveFloat | None = None
    cfl: PositiveFloat = DEFAULT_CFL_FACTOR
    samples: PositiveInt = 32

    @field_validator("cfl")
    @classmethod
    def check_cfl(cls, v: float) -> float:
        if v > MAX_CFL_FACTOR:
            raise ValueError(f"cfl={v} exceeds the admissible {MAX_CFL_FACTOR}")
        return v

    @field_validator("n")
    @classmethod
    def check_truncation(cls, v: float | None) -> float | None:
        if v is not None and v < 1:
            raise ValueError(f"The truncation parameter n must be >= 1, received {v}")
        return v


class EstimatesSection(_Section):
    eta: PositiveFloat = DEFAULT_ETA
    m: int | Literal["auto"] = "auto"
    alpha: PositiveFloat = DEFAULT_ALPHA

    @field_validator("eta")
    @classmethod
    def check_eta(cls, v: float) -> float:
        if v > 1:
            raise ValueError(f"eta must lie in (0, 1], received {v}")
        return v


class OutputSection(_Section):
    checkpoints: bool = False
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "DEBUG"


class Scenario(_Section):
    name: NonEmptyStr
    grid: GridSection = Field(default_factory=GridSection)
    physics: PhysicsSection = Field(default_factory=PhysicsSection)
    initial_data: InitialDataSection = Field(default_factory=InitialDataSection)
    run: RunSection = Field(default_factory=RunSection)
    estimates: EstimatesSection = Field(default_factory=EstimatesSection)
    output: OutputSection = Field(default_factory=OutputSection)

    @model_validator(mode="after")
    def check_modes(self) -> "Scenario":
        for mode in self.initial_data.modes or []:
            if len(mode) != self.grid.d:
                raise ValueError(f"Mode {mode} does not have d={self.grid.d} entries")
            if any(abs(k) >= self.grid.N // 2 for k in mode):
                raise ValueError(f"Mode {mode} is not resolved away from Nyquist on N={self.grid.N}")
        return self

    @property
    def truncation(self) -> float:
        return self.run.n if self.run.n is not None else max(self.grid.N / 3, 1.0)

    @property
    def horizon_is_auto(self) -> bool:
        return self.run.T == "auto"

    @classmethod
    def from_toml(cls, path: Path | str) -> "Scenario":
        path = Path(path)
        with path.open("rb") as f:
            data = tomllib.load(f)
        data.setdefault("name", path.stem)
        return cls.model_validate(data)

    def with_overrides(self, overrides: dict[str, dict[str, Any]]) -> "Scenario":
        """Section-wise overrides, e.g. {"grid": {"N": 128}}; None values are skipped."""
        data = self.model_dump()
        for section, values in overrides.items():
            for key, value in values.items():
                if value is None:
                    continue
                if section == "":
                    data[key] = value
                else:
                    data[section][key] = value
        return Scenario.model_validate(data)

    def to_json(self) -> dict:
        return self.model_dump(mode="json")
