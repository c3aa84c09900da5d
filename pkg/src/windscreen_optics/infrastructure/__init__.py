# src/windscreen_optics/infrastructure/__init__.py
"""Infrastructure layer: file formats."""
