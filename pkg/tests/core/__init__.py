"""Core library and CLI tests."""
