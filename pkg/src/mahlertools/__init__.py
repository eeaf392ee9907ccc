"""Certified arbitrary-precision toolkit: ball arithmetic, integer
polynomials, an enumerated field of algebraic numbers, minimum searches
over bounded-height polynomial families, and the entire function built
on that enumeration.

Modules, bottom to top: balls (mid/rad arithmetic over mpfr), intpoly
(exact integer/rational polynomials and the certified length bound),
realroots and roots (certified root isolation), qbar (the enumeration),
mahler (minimum search and height exponents), interpseries (the
interpolation-style series over the enumeration), funcs (Liouville
constant, witnesses, explicit entire functions), cli (batch frontend).

Import the submodules directly; nothing is re-exported here.
"""

__version__ = "0.1.0"
