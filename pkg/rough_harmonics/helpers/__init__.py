"""Helper library for the rough_harmonics package."""
