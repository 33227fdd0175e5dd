"""Exact computation with one-variable hypergeometric variations.

The package provides exact rational and certified ball numerics
(:mod:`hgvkit.numerics`), the noncommutative operator ring in ``z`` and
``D = z d/dz`` (:mod:`hgvkit.opalg`), classification of hypergeometric
data (:mod:`hgvkit.hgdef`), truncated series machinery including jet and
logarithmic solutions (:mod:`hgvkit.series`), verification and discovery
of zeta value identities at Hodge points (:mod:`hgvkit.identities`),
algebraicity certificates for exponential integrals
(:mod:`hgvkit.algebraicity`), and a fully worked elliptic family
pipeline (:mod:`hgvkit.ellfam`).  Everything is computed in exact
rational arithmetic; floating point never enters a certified result.
"""

__version__ = "0.1.0"
