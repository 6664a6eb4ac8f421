"""Phonon creation in a cavity-trapped condensate by a gravitational wave, and
the quantum-metrological bound on estimating the wave amplitude."""

__version__ = "0.1.0"
