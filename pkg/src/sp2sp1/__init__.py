"""Sp(2)Sp(1)-orbits of real Grassmannians of H^2 and the invariant valuations they carry."""

__version__ = "0.1.0"
