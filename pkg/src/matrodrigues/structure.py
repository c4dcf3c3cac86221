"""Structure theory: recurrence coefficients, eigen-equations, ladders.

Three constant matrices ``alpha_n, beta_n, gamma_n`` (multiplying on the
right) make ``x*P_n = P_(n+1)*alpha_n + P_n*beta_n + P_(n-1)*gamma_n``
hold for any nonresonant model, commuting or not.  In the commutative
case the family members are additionally eigenfunctions of the
second-order operator ``A_1 * d/dx``, and a first-order ladder operator
``L_n = A*x + B + C*Q(x)*d/dx`` maps P_n to P_(n-1).

The ladder coefficients are solved inside the commutative algebra
generated by ``L1`` and ``L2``: for one-dimensional data they are plain
scalars, for Jordan-type (upper-triangular Toeplitz) data they pick up a
nilpotent part which is required for the ladder identity to close.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    LadderDegenerateError,
    MatrixPolynomial,
    ModelSpec,
    ResonanceError,
)
from .rodrigues import FamilyCache, apply_operator

__all__ = [
    "RecurrenceCoeffs",
    "LadderCoeffs",
    "recurrence_coeffs",
    "alpha_closed_form",
    "recurrence_residual",
    "eigen_check",
    "eigen_matrix",
    "ladder_coeffs",
    "ladder_apply",
]


def _solve_factor(factor: np.ndarray, rhs: np.ndarray, name: str) -> np.ndarray:
    smin = np.linalg.svd(factor, compute_uv=False)[-1]
    if smin <= 1e-12 * max(1.0, float(np.linalg.norm(factor))):
        raise ResonanceError(f"factor {name} is singular")
    return np.linalg.solve(factor, rhs)


@dataclass(frozen=True)
class RecurrenceCoeffs:
    """Solved three-term recurrence coefficients for one degree index."""

    n: int
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray


def recurrence_coeffs(spec: ModelSpec, n: int) -> RecurrenceCoeffs:
    """Solve the triangular linear system for ``alpha_n, beta_n, gamma_n``.

    The system couples the three coefficients through the invertible
    factors ``L1 + k*sigma`` with k up to 2n + 2, so nonresonance through
    that range is required; a singular solve raises
    :class:`~matrodrigues.core.ResonanceError` naming the factor.
    """
    if n < 1:
        raise ValueError("recurrence_coeffs needs n >= 1")
    sig, tau, dlt = spec.q.sigma, spec.q.tau, spec.q.delta
    l1, l2 = np.asarray(spec.l1), np.asarray(spec.l2)
    eye = spec.identity()

    f_low = l1 + (2 * n + 1) * sig * eye
    f_high = l1 + (2 * n + 2) * sig * eye
    rhs = l1 + (n + 1) * sig * eye
    alpha = _solve_factor(f_high, _solve_factor(f_low, rhs, f"L1+{2 * n + 1}*sigma"), f"L1+{2 * n + 2}*sigma")

    mid = (
        2 * (2 * n + 1) * sig * l2
        + 2 * (n + 1) * tau * l1
        + 2 * (n + 1) * (2 * n + 1) * sig * tau * eye
        + l1 @ l2
        + l2 @ l1
    )
    beta = _solve_factor(
        2 * n * sig * eye + l1, (l2 + tau * eye) - mid @ alpha, f"L1+{2 * n}*sigma"
    )

    gamma = (
        -(n - 1) * dlt * eye
        - ((n * tau * eye + l2) @ ((n + 1) * tau * eye + l2) + dlt * (2 * (n + 1) * sig * eye + l1)) @ alpha
        - (n * tau * eye + l2) @ beta
    )
    return RecurrenceCoeffs(n, alpha, beta, gamma)


def alpha_closed_form(spec: ModelSpec, n: int) -> np.ndarray:
    """Independent closed form for ``alpha_n`` (product of two inverses).

    All factors are polynomials in ``L1`` and hence commute; this path is
    kept separate from the linear-system solve so the two can be compared.
    """
    sig = spec.q.sigma
    eye = spec.identity()
    l1 = np.asarray(spec.l1)
    inv_low = np.linalg.inv(l1 + (2 * n + 1) * sig * eye)
    inv_high = np.linalg.inv(l1 + (2 * n + 2) * sig * eye)
    return inv_low @ inv_high @ (l1 + (n + 1) * sig * eye)


def recurrence_residual(cache: FamilyCache, n: int) -> float:
    """Max coefficient norm of ``x*P_n - (P_(n+1)a_n + P_n b_n + P_(n-1) c_n)``."""
    if not 1 <= n <= cache.n_max - 1:
        raise ValueError(f"need 1 <= n <= {cache.n_max - 1}")
    rc = recurrence_coeffs(cache.spec, n)
    lhs = cache.polys[n].times_x()
    rhs = (
        cache.polys[n + 1].right_mul(rc.alpha)
        + cache.polys[n].right_mul(rc.beta)
        + cache.polys[n - 1].right_mul(rc.gamma)
    )
    return (lhs - rhs).coeff_norm()


# ---------------------------------------------------------------------------
# eigen-equation (commutative case)
# ---------------------------------------------------------------------------


def _require_commutative(spec: ModelSpec, what: str) -> None:
    scale = max(1.0, float(np.linalg.norm(spec.l1) * np.linalg.norm(spec.l2)))
    if spec.commutator_norm() > 1e-12 * scale:
        raise ValueError(f"{what} requires commuting L1, L2 "
                         f"(commutator norm {spec.commutator_norm():.3e})")


def eigen_matrix(spec: ModelSpec, n: int) -> np.ndarray:
    """Eigenvalue matrix ``n * ((n+1)*sigma + L1)`` of ``A_1 * d/dx``."""
    return n * ((n + 1) * spec.q.sigma * spec.identity() + np.asarray(spec.l1))


def eigen_check(spec: ModelSpec, cache: FamilyCache, n: int) -> tuple[np.ndarray, float]:
    """Residual of the second-order eigen-equation for P_n.

    Returns ``(eigen_matrix, residual)`` where the residual is the max
    coefficient norm of ``A_1(P_n') - eigen_matrix @ P_n``.  Only valid
    in the commutative case; the eigenvalue matrix multiplies on the left.
    """
    _require_commutative(spec, "the eigen-equation")
    lam = eigen_matrix(spec, n)
    if n == 0:
        return lam, 0.0
    lhs = apply_operator(spec, 1, cache.polys[n].derivative())
    rhs = cache.polys[n].left_mul(lam)
    return lam, (lhs - rhs).coeff_norm()


# ---------------------------------------------------------------------------
# ladder operators (commutative case)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LadderCoeffs:
    """Coefficients of the lowering operator ``L_n = a*x + b + c*Q*d/dx``.

    The entries live in the commutative algebra generated by the model
    matrices: they are (d, d) arrays that reduce to plain scalars (1x1)
    for one-dimensional data and to upper-triangular Toeplitz matrices
    for Jordan-type data.  ``g`` is the normalization matrix whose
    invertibility the construction requires, and ``thetas[k-1]`` is the
    commutation defect ``2*sigma*k*c + c@L1 - a`` of L_n past A_k.
    """

    n: int
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    g: np.ndarray
    thetas: tuple[np.ndarray, ...]


def ladder_coeffs(spec: ModelSpec, n: int) -> LadderCoeffs:
    """Closed-form lowering-operator coefficients for degree n >= 1.

    With gamma denoting the constant term of Q,

        G = n*(4*sigma*gamma - tau**2)*(n*sigma + L1)
            + gamma*L1**2 + sigma*L2**2 - tau*L1@L2
        C = (1/n) * (2*n*sigma + L1) @ G**-1
        A = -n*sigma*C,   B = (sigma*L2 - n*sigma*tau - tau*L1) @ G**-1

    Raises :class:`~matrodrigues.core.LadderDegenerateError` when G is
    (numerically) singular and ``ValueError`` for noncommuting data.
    """
    if n < 1:
        raise ValueError("ladder_coeffs needs n >= 1")
    _require_commutative(spec, "the ladder construction")
    sig, tau, dlt = spec.q.sigma, spec.q.tau, spec.q.delta
    l1, l2 = np.asarray(spec.l1), np.asarray(spec.l2)
    eye = spec.identity()

    g = (
        n * (4 * sig * dlt - tau**2) * (n * sig * eye + l1)
        + dlt * (l1 @ l1)
        + sig * (l2 @ l2)
        - tau * (l1 @ l2)
    )
    smin = np.linalg.svd(g, compute_uv=False)[-1]
    scale = max(1.0, float(np.linalg.norm(g)))
    if smin <= 1e-12 * scale:
        raise LadderDegenerateError(f"ladder degenerate at n={n}: normalization matrix is singular")
    g_inv = np.linalg.inv(g)

    c = (2 * n * sig * eye + l1) @ g_inv / n
    a = -n * sig * c
    b = (sig * l2 - tau * n * sig * eye - tau * l1) @ g_inv
    thetas = tuple(2 * sig * k * c + c @ l1 - a for k in range(1, n + 1))
    return LadderCoeffs(n, a, b, c, g, thetas)


def ladder_apply(spec: ModelSpec, coeffs: LadderCoeffs, p_n: MatrixPolynomial) -> MatrixPolynomial:
    """Apply the lowering operator: ``(a*x + b) p_n + c * Q * p_n'``.

    For P_n of the family the coefficients were built for, the result is
    P_(n-1).  The coefficient matrices act on the left.
    """
    out = p_n.left_mul(coeffs.a).times_x() + p_n.left_mul(coeffs.b)
    out = out + p_n.derivative().left_mul(coeffs.c).mul_scalar_poly(spec.q)
    return out
