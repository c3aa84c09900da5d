"""Test suite for windscreen optics."""
