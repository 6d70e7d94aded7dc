"""Simulation and verification of aperiodic plugs for 1-dimensional foliations."""

__version__ = "0.1.0"
