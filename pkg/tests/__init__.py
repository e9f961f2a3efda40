"""rough-harmonics tests."""
