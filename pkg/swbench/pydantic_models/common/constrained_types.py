import math
from typing import Annotated

from pydantic import AfterValidator, BeforeValidator, Field, conint


def _strip_whitespace(v: str) -> str:
    if not isinstance(v, str):
        raise TypeError("Expected str")
    return v.strip()


def _parse_exponent(v: object) -> object:
    # TOML and JSON have no infinity literal for our purposes, so "inf" is accepted as text.
    if isinstance(v, str) and v.strip().lower() in ("inf", "infinity", "∞"):
        return math.inf
    return v


def _reject_nan(v: float) -> float:
    if math.isnan(v):
        raise ValueError("NaN is not a valid value")
    return v


NonEmptyStr = Annotated[
    str,
    BeforeValidator(_strip_whitespace),
    Field(min_length=1),
]

PositiveInt = conint(gt=0)  # strictly > 0
NonNegativeInt = conint(ge=0)  # ≥ 0

PositiveFloat = Annotated[float, AfterValidator(_reject_nan), Field(gt=0)]
NonNegativeFloat = Annotated[float, AfterValidator(_reject_nan), Field(ge=0)]
FiniteFloat = Annotated[float, Field(allow_inf_nan=False)]

# Lebesgue / summation / time exponents live in [1, inf]; inf is encoded as math.inf.
Exponent = Annotated[
    float, BeforeValidator(_parse_exponent), AfterValidator(_reject_nan), Field(ge=1)
]
