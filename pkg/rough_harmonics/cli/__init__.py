"""Helpers for the rough-harmonics command line."""
