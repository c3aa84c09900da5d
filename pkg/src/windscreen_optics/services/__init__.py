# src/windscreen_optics/services/__init__.py
"""Computational services: Zernike basis, Shack-Hartmann, MTF, SFR and system."""
