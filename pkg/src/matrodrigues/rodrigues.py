"""Family generation by the product-of-operators representation.

The degree-n member of a family with data ``(Q, L1, L2)`` is obtained by
applying the first-order operators

    A_k = k*Q'(x) + x*L1 + L2 + Q(x) * d/dx

to the identity, innermost first:  P_n = A_1 A_2 ... A_n I.  This module
also provides the closed-form leading coefficients, expansion of arbitrary
polynomials in the generated basis, and an independent numeric oracle that
evaluates the defining n-th derivative formula by finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    MatrixPolynomial,
    ModelSpec,
    ResonanceError,
    require_valid,
)

__all__ = [
    "FamilyCache",
    "apply_operator",
    "generate_family",
    "leading_coefficient",
    "expand_in_basis",
    "rodrigues_numeric_oracle",
    "fd_weights",
]


def apply_operator(spec: ModelSpec, k: int, r: MatrixPolynomial) -> MatrixPolynomial:
    """Apply ``A_k = k*Q' + x*L1 + L2 + Q*d/dx`` to a matrix polynomial.

    The constant matrices multiply each coefficient of ``r`` on the left,
    matching the operators acting on the identity from the left in the
    product representation.  The result has degree at most deg(r) + 1.
    """
    if r.dim != spec.dim:
        raise ValueError(f"dimension mismatch: polynomial is {r.dim}x{r.dim}, model is {spec.dim}x{spec.dim}")
    q = spec.q
    # k*Q'(x) * r = 2*k*sigma * (x*r) + k*tau * r
    out = r.times_x().scaled(2 * k * q.sigma) + r.scaled(k * q.tau)
    out = out + r.left_mul(spec.l1).times_x()
    out = out + r.left_mul(spec.l2)
    out = out + r.derivative().mul_scalar_poly(q)
    return out


@dataclass(frozen=True)
class FamilyCache:
    """Generated members P_0..P_n and their closed-form leading coefficients.

    ``polys[n]`` has exact degree n (guaranteed by nonresonance) and
    ``leading[n]`` is the invertible product form of the x**n coefficient
    for n >= 1 (``leading[0]`` is the identity).
    """

    spec: ModelSpec
    polys: tuple[MatrixPolynomial, ...]
    leading: tuple[np.ndarray, ...]

    @property
    def n_max(self) -> int:
        return len(self.polys) - 1

    def __getitem__(self, n: int) -> MatrixPolynomial:
        return self.polys[n]

    def scale(self) -> float:
        """Largest coefficient norm over the cached polynomials."""
        return max(p.coeff_norm() for p in self.polys)


def generate_family(spec: ModelSpec, n_max: int) -> FamilyCache:
    """Generate P_0..P_n_max by right-to-left operator products.

    Each P_n starts from the identity and applies A_n, then A_(n-1), down
    to A_1.  The generation aborts with :class:`ResonanceError` when the
    model data fails validation.
    """
    if n_max > spec.max_degree:
        raise ValueError(f"n_max={n_max} exceeds the spec horizon N={spec.max_degree}")
    require_valid(spec)
    polys = [MatrixPolynomial.identity(spec.dim)]
    for n in range(1, n_max + 1):
        r = MatrixPolynomial.identity(spec.dim)
        for k in range(n, 0, -1):
            r = apply_operator(spec, k, r)
        polys.append(r)
    leading = [spec.identity()] + [leading_coefficient(spec, n) for n in range(1, n_max + 1)]
    return FamilyCache(spec, tuple(polys), tuple(leading))


def leading_coefficient(spec: ModelSpec, n: int) -> np.ndarray:
    """Closed-form x**n coefficient of P_n.

    The product ``(L1 + 2n*sigma) (L1 + (2n-1)*sigma) ... (L1 + (n+1)*sigma)``
    of n commuting factors; it is invertible under nonresonance.  For
    sigma = 0 this collapses to ``L1**n``.
    """
    if n < 1:
        raise ValueError("leading_coefficient needs n >= 1")
    eye = spec.identity()
    out = eye
    for k in range(n + 1, 2 * n + 1):
        factor = np.asarray(spec.l1) + k * spec.q.sigma * eye
        smin = np.linalg.svd(factor, compute_uv=False)[-1]
        if smin <= 1e-13 * max(1.0, np.linalg.norm(factor)):
            raise ResonanceError(f"L1 + {k}*sigma is singular (resonance at k={k})")
        out = out @ factor
    return out


def expand_in_basis(cache: FamilyCache, p: MatrixPolynomial) -> list[np.ndarray]:
    """Coefficients q_0..q_n with ``p(x) = sum_k P_k(x) q_k``.

    The family members multiply the coefficients on the right.  The
    expansion is computed by top-down elimination: the top coefficient of
    the remainder is divided by the invertible leading coefficient, the
    matched multiple of P_n is subtracted, and the degree drops.
    """
    if p.dim != cache.spec.dim:
        raise ValueError("dimension mismatch between polynomial and family")
    if p.degree > cache.n_max:
        raise ValueError(f"degree {p.degree} exceeds the cached horizon {cache.n_max}")
    d = p.dim
    qs = [np.zeros((d, d), dtype=complex) for _ in range(p.degree + 1)]
    rem = p
    for n in range(p.degree, 0, -1):
        if rem.degree < n:
            continue
        qn = np.linalg.solve(cache.leading[n], rem.coeff(n))
        qs[n] = qn
        rem = rem - cache.polys[n].right_mul(qn)
    qs[0] = rem.coeff(0)
    return qs


# ---------------------------------------------------------------------------
# finite-difference oracle for the n-th derivative definition
# ---------------------------------------------------------------------------


def fd_weights(deriv_order: int, offsets) -> np.ndarray:
    """Finite-difference weights for the given derivative on integer offsets.

    Solves the moment system ``sum_i w_i * s_i**k / k! = delta(k, m)`` so
    the returned stencil is exact on polynomials of degree < len(offsets).
    """
    s = np.asarray(offsets, dtype=float)
    n = len(s)
    if deriv_order >= n:
        raise ValueError("stencil too short for the requested derivative")
    a = np.vander(s, n, increasing=True).T  # a[k, i] = s_i**k
    rhs = np.zeros(n)
    rhs[deriv_order] = float(math.factorial(deriv_order))
    return np.linalg.solve(a, rhs)


# Leading error order of a 7-point central stencil for each derivative.
_STENCIL_ORDER = {1: 6, 2: 6, 3: 4}


def _fd_derivative(f, x: float, n: int, h: float) -> np.ndarray:
    offsets = np.arange(-3, 4)
    w = fd_weights(n, offsets)
    vals = f(x + offsets * h)
    return np.einsum("i,ijk->jk", w.astype(complex), vals) / h**n


def rodrigues_numeric_oracle(spec: ModelSpec, weight, n: int, x: float) -> np.ndarray:
    """Evaluate P_n(x) directly from ``W**-1 * d^n/dx^n [Q**n * W]``.

    An independence check against the operator-product path: the n-th
    derivative is approximated by 7-point central stencils with one
    Richardson refinement.  Restricted to n <= 3, where the differencing
    stays numerically meaningful; expected agreement is about 1e-5
    relative.

    ``weight`` must be an evaluable Pearson solution for ``spec``
    (anything with an ``eval_batch`` method, see the weights module) and
    ``x`` must be interior to its interval with ``W(x)`` invertible.
    """
    if not 1 <= n <= 3:
        raise ValueError("the finite-difference oracle supports n in 1..3 only")
    q = spec.q

    def g(xs: np.ndarray) -> np.ndarray:
        w = weight.eval_batch(xs)
        return q(xs)[:, None, None] ** n * w

    lo, hi = weight.interval.a, weight.interval.b
    h = 1e-2 * max(1.0, abs(x))
    gap = min(x - lo, hi - x)
    if np.isfinite(gap):
        h = min(h, gap / 8.0)
    if h <= 0 or x + 3.5 * h >= hi or x - 3.5 * h <= lo:
        raise ValueError(f"x={x} is too close to the interval boundary for differencing")

    coarse = _fd_derivative(g, x, n, h)
    fine = _fd_derivative(g, x, n, h / 2)
    p = _STENCIL_ORDER[n]
    deriv = (2**p * fine - coarse) / (2**p - 1)

    w_at_x = weight.eval_batch(np.array([x]))[0]
    return np.linalg.solve(w_at_x, deriv)
