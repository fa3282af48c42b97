"""Vacuum-induced atomic grating: optical response of a cavity-driven Lambda
medium and the Fraunhofer diffraction of a probe passing through it."""

__version__ = "0.1.0"
