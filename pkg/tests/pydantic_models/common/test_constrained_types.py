import math

import pytest
from pydantic import TypeAdapter, ValidationError

from swbench.pydantic_models.common.constrained_types import (
    Exponent,
    FiniteFloat,
    NonEmptyStr,
    NonNegativeFloat,
    PositiveFloat,
)


@pytest.mark.pydantic_model
@pytest.mark.parametrize("text", ["inf", " INF ", "infinity", "∞"])
def test_exponent_should_parse_infinity_from_text(text: str):
    assert TypeAdapter(Exponent).validate_python(text) == math.inf


@pytest.mark.pydantic_model
@pytest.mark.parametrize("value", [1, 2.5, math.inf])
def test_exponent_should_accept_values_from_one(value: float):
    assert TypeAdapter(Exponent).validate_python(value) == value


@pytest.mark.pydantic_model
@pytest.mark.parametrize("value", [0.5, 0, -2, math.nan, "two"])
def test_exponent_should_reject_values_below_one_or_nan(value):
    with pytest.raises(ValidationError):
        TypeAdapter(Exponent).validate_python(value)


@pytest.mark.pydantic_model
@pytest.mark.parametrize("value", [math.inf, -math.inf, math.nan])
def test_finite_float_should_reject_non_finite_values(value: float):
    with pytest.raises(ValidationError):
        TypeAdapter(FiniteFloat).validate_python(value)


@pytest.mark.pydantic_model
def test_positive_and_non_negative_floats_should_reject_nan_and_bounds():
    assert TypeAdapter(NonNegativeFloat).validate_python(0.0) == 0.0
    for adapter, value in [
        (TypeAdapter(PositiveFloat), 0.0),
        (TypeAdapter(PositiveFloat), math.nan),
        (TypeAdapter(NonNegativeFloat), -1e-300),
        (TypeAdapter(NonNegativeFloat), math.nan),
    ]:
        with pytest.raises(ValidationError):
            adapter.validate_python(value)


@pytest.mark.pydantic_model
def test_non_empty_str_should_strip_and_refuse_blank():
    assert TypeAdapter(NonEmptyStr).validate_python("  ledger \n") == "ledger"
    with pytest.raises(ValidationError):
        TypeAdapter(NonEmptyStr).validate_python(" \t ")
