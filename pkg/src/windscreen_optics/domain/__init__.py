# src/windscreen_optics/domain/__init__.py
"""Domain module for windscreen optics.

This module contains the immutable domain entities and the error
hierarchy shared by the services and the command line tool.
"""
