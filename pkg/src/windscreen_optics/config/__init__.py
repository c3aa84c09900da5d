"""Configuration for windscreen optics."""
