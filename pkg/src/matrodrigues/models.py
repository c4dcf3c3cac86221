"""Ready-made model constructors for the classical and Jordan-type families.

These are convenience wrappers around :class:`~matrodrigues.core.ModelSpec`
for the data sets used throughout the test-suite, the scripts and the
documentation:

* Hermite data (constant Q) reproduces ``(-1)**n * H_n`` in dimension one.
* Laguerre data (Q = x) reproduces ``n! * L_n^(alpha)``.
* Jacobi data (Q = x**2 - 1) reproduces ``2**n * n! * P_n^(alpha, beta)``.
* Upper-triangular Toeplitz data gives the genuinely matrix-valued
  commutative families generated by a 2x2 Jordan-type pair.
"""

from __future__ import annotations

import numpy as np

from .core import ModelSpec, Quadratic

__all__ = [
    "hermite_model",
    "laguerre_model",
    "jacobi_model",
    "toeplitz2_model",
]


def hermite_model(max_degree: int = 12) -> ModelSpec:
    """Scalar model with Q = 1, L1 = -2, L2 = 0 (weight exp(-x**2))."""
    return ModelSpec(Quadratic(0.0, 0.0, 1.0), -2.0, 0.0, dim=1, max_degree=max_degree)


def laguerre_model(alpha: float = 0.0, max_degree: int = 12) -> ModelSpec:
    """Scalar model with Q = x, L1 = -1, L2 = alpha (weight x**alpha * exp(-x))."""
    return ModelSpec(Quadratic(0.0, 1.0, 0.0), -1.0, alpha, dim=1, max_degree=max_degree)


def jacobi_model(alpha: float, beta: float, max_degree: int = 12) -> ModelSpec:
    """Scalar model with Q = x**2 - 1, L1 = alpha + beta, L2 = alpha - beta.

    The associated weight is ``(1 - x)**alpha * (1 + x)**beta`` on [-1, 1].
    """
    return ModelSpec(
        Quadratic(1.0, 0.0, -1.0), alpha + beta, alpha - beta, dim=1, max_degree=max_degree
    )


def toeplitz2_model(
    a1: complex,
    b1: complex,
    a2: complex,
    b2: complex,
    q: Quadratic | None = None,
    max_degree: int = 12,
) -> ModelSpec:
    """Commutative 2x2 model with L_i = a_i*I + b_i*N, N the nilpotent shift.

    Both matrices are upper-triangular Toeplitz, hence commute without
    being simultaneously diagonalizable whenever some ``b_i != 0``.  The
    default Q is x (half-line weight ``exp(a1*x) * x**a2 * (I + ... N)``).
    """
    if q is None:
        q = Quadratic(0.0, 1.0, 0.0)
    n = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    eye = np.eye(2, dtype=complex)
    return ModelSpec(q, a1 * eye + b1 * n, a2 * eye + b2 * n, dim=2, max_degree=max_degree)
