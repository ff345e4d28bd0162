"""Murmurations of Hecke L-functions of imaginary quadratic fields: empirical averages and closed-form densities."""
__version__ = "0.1.0"
