"""Test the JSON Schema helpers that describe run configurations."""

import pytest
from jsonschema import Draft4Validator

from rough_harmonics.typing import (
    ArrayType,
    BooleanType,
    CustomType,
    DyadicIntegerType,
    IntegerType,
    NumberType,
    ObjectType,
    PropertiesList,
    Property,
    StringType,
    append_type,
    extend_validator_with_defaults,
    schema_types,
)


def test_to_json():
    schema = PropertiesList(
        Property(
            "variant",
            StringType,
            required=True,
            allowed_values=["notHs", "notCbeta"],
            description="Series variant.",
        ),
        Property("k", DyadicIntegerType, default=1024),
    )
    assert schema.to_dict() == {
        "type": "object",
        "properties": {
            "variant": {
                "type": ["string"],
                "enum": ["notHs", "notCbeta"],
                "description": "Series variant.",
            },
            "k": {"type": ["integer", "null"], "format": "dyadic", "default": 1024},
        },
        "required": ["variant"],
    }


def test_optional_enum_admits_null():
    prop = Property("format", StringType, allowed_values=["csv", "json"])
    assert prop.to_dict() == {
        "format": {"type": ["string", "null"], "enum": ["csv", "json", None]}
    }


def test_nested_types():
    schema = PropertiesList(
        Property("sigma", ArrayType(NumberType)),
        Property("seeds", ArrayType(IntegerType), required=True),
        Property("flags", ObjectType(Property("kelvin", BooleanType))),
        Property("extra", CustomType({"type": "string", "format": "uri"})),
    ).to_dict()
    assert schema["properties"]["sigma"] == {
        "type": ["array", "null"],
        "items": {"type": ["number"]},
    }
    assert schema["properties"]["seeds"] == {"type": "array", "items": {"type": ["integer"]}}
    assert schema["properties"]["flags"]["properties"] == {
        "kelvin": {"type": ["boolean", "null"]}
    }
    assert schema["properties"]["extra"] == {"type": ["string", "null"], "format": "uri"}


def test_wrapped_class_needs_instantiation():
    with pytest.raises(ValueError, match="ArrayType"):
        Property("sigma", ArrayType).to_dict()


def test_append_type_and_schema_types():
    assert append_type({"type": "string"}, "null") == {"type": ["string", "null"]}
    assert append_type({"type": ["string", "null"]}, "null") == {"type": ["string", "null"]}
    assert append_type({"enum": [1]}, "null") == {"enum": [1]}
    assert schema_types({"type": "integer"}) == ["integer"]
    assert schema_types({}) == []


def test_extend_skips_existing_names():
    first = PropertiesList(Property("n", IntegerType), Property("k", IntegerType))
    second = PropertiesList(Property("k", StringType), Property("tol", NumberType))
    merged = first.extend(second)
    assert [p.name for p in merged.wrapped] == ["n", "k", "tol"]
    assert merged.to_dict()["properties"]["k"]["type"] == ["integer", "null"]
    # The original list is untouched.
    assert len(first.wrapped) == 2


def test_validator_fills_defaults():
    schema = PropertiesList(
        Property("tol", NumberType, default=1e-6),
        Property("kelvin", BooleanType, default=False),
        Property("n", IntegerType, required=True),
    ).to_dict()
    validator = extend_validator_with_defaults(Draft4Validator)(schema)
    config = {"n": 3}
    assert not list(validator.iter_errors(config))
    assert config == {"n": 3, "tol": 1e-6, "kelvin": False}

    errors = list(validator.iter_errors({"n": "three"}))
    assert len(errors) == 1
