"""Phaseless inverse scattering for the 1-D Schrodinger equation.

Potentials vanish on x < 0; all measurements are taken there.
"""

__version__ = "0.1.0"
