"""Numerical experiments on a-points of the Riemann zeta function.

Modules: ``special_fn`` (theta, Z, zeta, Lambert W, J0, primes), ``gram``
(shifted Gram points), ``zeros_apoints`` (zeros and a-points), ``approx``
(prime-sum approximation of log|zeta|), ``stats`` (distribution and
correlation statistics) and ``cli``.
"""

__version__ = "0.1.0"
