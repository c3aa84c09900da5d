# src/windscreen_optics/__init__.py
"""Windscreen optics - wavefront metrology for windscreen and camera systems."""

__version__ = "0.1.0"
