# flake8: noqa

"""Defines the `classproperty` decorator used by experiment metadata."""


class classproperty(property):
    """Read-only property evaluated against the owning class."""

    def __get__(self, obj, objtype=None):
        return super().__get__(objtype if objtype is not None else type(obj))
