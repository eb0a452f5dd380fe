"""Bessel-operator heat kernels, Riesz transforms, and atomic Hardy/BMO
machinery on the positive orthant, with a bound-verification harness."""

__version__ = "0.1.0"
