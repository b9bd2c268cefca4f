"""Exact-rational and numerical certificates for arithmetic holonomy bounds.

The package recomputes, at desk scale, the certificate data behind a family
of irrationality proofs: lcm-based denominator growth rates, conformal sizes
of explicit disc maps, modular and holonomic power series with exact
denominator witnesses, growth integrals on the torus, and the assembled
holonomy quotients (13.9938 < 14, 16.103 < 17, and friends).
"""

__version__ = "0.1.0"
