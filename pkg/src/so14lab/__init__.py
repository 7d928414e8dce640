"""Numerical workbench for SO(1,4) mass operators and their unitary equivalences."""

__version__ = "0.1.0"
