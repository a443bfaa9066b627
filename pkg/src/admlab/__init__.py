"""Numerical laboratory for Orlicz-space admissibility of diagonal semigroup models.

Subpackage map:

- ``orlicz``        Young functions, Luxemburg norms, complementary pairs.
- ``spectral``      diagonal generators, semigroup/resolvent/fractional-power arithmetic.
- ``signals``       piecewise inputs and exact mode integrals.
- ``admissibility`` input/observation maps and two-sided norm bounds.
- ``certify``       resolvent-condition, square-function, ISS/iISS certificates.
- ``cli``           scenario-driven command line front end.
"""

__version__ = "0.1.0"
