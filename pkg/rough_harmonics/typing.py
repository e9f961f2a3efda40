"""Classes and functions to streamline JSON Schema typing of run configurations.

Usage example:
--------------
.. code-block:: python

    jsonschema = PropertiesList(
        Property("n", IntegerType, required=True),
        Property("variant", StringType, allowed_values=["notHs", "notCbeta"]),
        Property("K", DyadicIntegerType, default=1024),
        Property("sigma", ArrayType(NumberType)),
        Property("kelvin", BooleanType, default=False),
    ).to_dict()

Note:
-----
- Integers given as strings may use the ``b^j`` literal syntax; see
  :class:`DyadicIntegerType` and :func:`rough_harmonics.configuration.coerce_config`.
"""

from __future__ import annotations

import sys
from typing import Generic, List, Mapping, Optional, Sequence, Type, TypeVar, Union, cast

from jsonschema import validators

from rough_harmonics.helpers._classproperty import classproperty

if sys.version_info >= (3, 10):
    from typing import TypeAlias
else:
    from typing_extensions import TypeAlias

__all__ = [
    "extend_validator_with_defaults",
    "JSONTypeHelper",
    "StringType",
    "BooleanType",
    "IntegerType",
    "DyadicIntegerType",
    "NumberType",
    "ArrayType",
    "Property",
    "ObjectType",
    "CustomType",
    "PropertiesList",
]

_JsonValue: TypeAlias = Union[
    str,
    int,
    float,
    bool,
    list,
    dict,
    None,
]


def extend_validator_with_defaults(validator_class):  # noqa
    """Fill in defaults, before validating with the provided JSON Schema Validator.

    See https://python-jsonschema.readthedocs.io/en/latest/faq/#why-doesn-t-my-schema-s-default-property-set-the-default-on-my-instance  # noqa
    for details.
    """
    validate_properties = validator_class.VALIDATORS["properties"]

    def set_defaults(validator, properties, instance, schema):  # noqa
        for property, subschema in properties.items():
            if "default" in subschema:
                instance.setdefault(property, subschema["default"])

        yield from validate_properties(
            validator,
            properties,
            instance,
            schema,
        )

    return validators.extend(
        validator_class,
        {"properties": set_defaults},
    )


def append_type(type_dict: dict, new_type: str) -> dict:
    """Return a copy of ``type_dict`` that also admits ``new_type``."""
    result = dict(type_dict)
    current = result.get("type")
    if current is None:
        return result
    types = [current] if isinstance(current, str) else list(current)
    if new_type not in types:
        types.append(new_type)
    result["type"] = types
    return result


def schema_types(type_dict: Mapping) -> List[str]:
    """The JSON types named by a schema, as a list."""
    current = type_dict.get("type", [])
    return [current] if isinstance(current, str) else list(current)


class JSONTypeHelper:
    """Base class of the schema builders."""

    @classproperty
    def type_dict(cls) -> dict:
        """Return dict describing the type.

        Raises:
            NotImplementedError: If the derived class does not override this method.
        """
        raise NotImplementedError()

    def to_dict(self) -> dict:
        """Convert to dictionary.

        Returns:
            A JSON Schema dictionary describing the object.
        """
        return cast(dict, self.type_dict)


class _ScalarType(JSONTypeHelper):
    """A schema with a single primitive JSON type."""

    json_type: str = "null"

    @classproperty
    def type_dict(cls) -> dict:
        """Get type dictionary.

        Returns:
            A dictionary describing the type.
        """
        return {"type": [cls.json_type]}


class StringType(_ScalarType):
    """String type."""

    json_type = "string"


class BooleanType(_ScalarType):
    """Boolean type."""

    json_type = "boolean"


class IntegerType(_ScalarType):
    """Integer type."""

    json_type = "integer"


class DyadicIntegerType(IntegerType):
    """Integer type whose string form may be a power literal such as ``2^20``."""

    @classproperty
    def type_dict(cls) -> dict:  # noqa: D102
        return {"type": ["integer"], "format": "dyadic"}


class NumberType(_ScalarType):
    """Number type."""

    json_type = "number"


W = TypeVar("W", bound=JSONTypeHelper)


class ArrayType(JSONTypeHelper, Generic[W]):
    """Array type."""

    def __init__(self, wrapped_type: Union[W, Type[W]]) -> None:
        """Array of ``wrapped_type`` items, e.g. a sigma list or a degree list."""
        self.wrapped_type = wrapped_type

    @property
    def type_dict(self) -> dict:  # type: ignore  # OK: @classproperty vs @property
        """Get type dictionary.

        Returns:
            A dictionary describing the type.
        """
        return {"type": "array", "items": self.wrapped_type.type_dict}


class Property(JSONTypeHelper, Generic[W]):
    """One named experiment setting, nested within a `PropertiesList`."""

    def __init__(
        self,
        name: str,
        wrapped: Union[W, Type[W]],
        required: bool = False,
        default: _JsonValue = None,
        description: Optional[str] = None,
        allowed_values: Optional[Sequence[_JsonValue]] = None,
    ) -> None:
        """Initialize Property object.

        Args:
            name: Setting name, also the CLI flag with dashes.
            wrapped: JSON Schema type of the property.
            required: Whether this is a required property.
            default: Default value in the JSON Schema.
            description: Help text shown by ``--about``.
            allowed_values: Optional enumeration of accepted values.
        """
        self.name = name
        self.wrapped = wrapped
        self.optional = not required
        self.default = default
        self.description = description
        self.allowed_values = list(allowed_values) if allowed_values else None

    @property
    def type_dict(self) -> dict:  # type: ignore  # OK: @classproperty vs @property
        """Get type dictionary.

        Returns:
            A dictionary describing the type.

        Raises:
            ValueError: If the type dict is not valid.
        """
        wrapped = self.wrapped

        if isinstance(wrapped, type) and not isinstance(wrapped.type_dict, Mapping):
            raise ValueError(
                f"Type dict for {wrapped} is not defined. "
                + "Try instantiating it with a nested type such as "
                + f"{wrapped.__name__}(NumberType)."
            )

        return dict(cast(dict, wrapped.type_dict))

    def to_dict(self) -> dict:
        """Return a dict mapping the property name to its definition.

        Returns:
            A JSON Schema dictionary describing the object.
        """
        type_dict = self.type_dict
        if self.optional:
            type_dict = append_type(type_dict, "null")
        if self.default is not None:
            type_dict.update({"default": self.default})
        if self.description:
            type_dict.update({"description": self.description})
        if self.allowed_values:
            values = list(self.allowed_values)
            if self.optional:
                values.append(None)
            type_dict.update({"enum": values})
        return {self.name: type_dict}


class ObjectType(JSONTypeHelper):
    """Object schema built from named settings."""

    def __init__(self, *properties: Property) -> None:
        """Initialize ObjectType from its list of properties.

        Args:
            properties: Zero or more attributes for this JSON object.
        """
        self.wrapped: List[Property] = list(properties)

    @property
    def type_dict(self) -> dict:  # type: ignore  # OK: @classproperty vs @property
        """Get type dictionary.

        Returns:
            A dictionary describing the type.
        """
        merged_props = {}
        required = []
        for w in self.wrapped:
            merged_props.update(w.to_dict())
            if not w.optional:
                required.append(w.name)
        result = {"type": "object", "properties": merged_props}

        if required:
            result["required"] = required

        return result


class CustomType(JSONTypeHelper):
    """Pass-through for a hand-written JSON Schema fragment."""

    def __init__(self, jsonschema_type_dict: dict) -> None:
        """Wrap ``jsonschema_type_dict`` unchanged."""
        self._jsonschema_type_dict = jsonschema_type_dict

    @property
    def type_dict(self) -> dict:  # type: ignore  # OK: @classproperty vs @property
        """Get type dictionary.

        Returns:
            A dictionary describing the type.
        """
        return self._jsonschema_type_dict


class PropertiesList(ObjectType):
    """The settings of one experiment, in CLI order."""

    def append(self, property: Property) -> None:
        """Append a property to the property list.

        Args:
            property: Property to add
        """
        self.wrapped.append(property)

    def extend(self, other: "PropertiesList") -> "PropertiesList":
        """Return a new list with the properties of ``other`` appended.

        Args:
            other: Properties to add; names already present are skipped.

        Returns:
            The merged list.
        """
        names = {p.name for p in self.wrapped}
        merged = PropertiesList(*self.wrapped)
        for p in other.wrapped:
            if p.name not in names:
                merged.append(p)
        return merged
