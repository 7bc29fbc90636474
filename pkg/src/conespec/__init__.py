"""Spectra of Laplace-type operators on conically degenerating cylinders."""

__version__ = "0.1.0"
