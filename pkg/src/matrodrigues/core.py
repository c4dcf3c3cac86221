"""Dense complex matrix algebra and matrix-coefficient polynomial arithmetic.

Everything downstream (family generation, recurrences, weights, quadrature)
is built on three value types defined here:

* :class:`Quadratic` -- a scalar polynomial ``sigma*x**2 + tau*x + delta``
  of degree at most two.
* :class:`MatrixPolynomial` -- a polynomial with d-by-d complex matrix
  coefficients, stored lowest degree first with a tight top coefficient.
* :class:`ModelSpec` -- the defining data ``(Q, L1, L2)`` of a polynomial
  family, together with the working dimension and degree horizon.

All values are immutable after construction and all operations are pure
functions, so instances can be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.linalg

__all__ = [
    "COEFF_TRIM_REL",
    "TOL_INVERTIBLE",
    "ResonanceError",
    "IntegrabilityError",
    "LadderDegenerateError",
    "Quadratic",
    "MatrixPolynomial",
    "ModelSpec",
    "as_matrix",
    "matrix_exp",
    "matrix_power",
    "matrix_inverse",
    "commutator",
    "validate_model",
    "require_valid",
    "poly_eval",
    "poly_derivative",
    "poly_add",
    "poly_scale_by_matrix",
    "poly_mul_by_scalar_poly",
]

# Relative threshold below which a top coefficient counts as zero when
# normalizing polynomial degree.
COEFF_TRIM_REL = 1e-13

# A matrix factor counts as invertible when its smallest singular value
# exceeds TOL_INVERTIBLE times its norm; this separates exact resonance
# from mere ill-conditioning.
TOL_INVERTIBLE = 1e-10


class ResonanceError(ValueError):
    """A required matrix factor is singular (resonant model data)."""


class IntegrabilityError(ValueError):
    """A weight fails the spectral conditions needed for its integrals."""


class LadderDegenerateError(ValueError):
    """The ladder normalization matrix is singular; no ladder operator."""


def as_matrix(value, dim: int | None = None) -> np.ndarray:
    """Coerce ``value`` to an immutable d-by-d complex array.

    Scalars become 1x1 matrices.  Raises ``ValueError`` on non-square
    input, a dimension mismatch, or non-finite entries.
    """
    m = np.atleast_2d(np.asarray(value, dtype=complex))
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if dim is not None and m.shape[0] != dim:
        raise ValueError(f"expected a {dim}x{dim} matrix, got {m.shape[0]}x{m.shape[1]}")
    if not np.all(np.isfinite(m.view(float))):
        raise ValueError("matrix entries must be finite")
    m = m.copy()
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class Quadratic:
    """Scalar polynomial ``sigma*x**2 + tau*x + delta`` of degree <= 2."""

    sigma: complex = 0.0
    tau: complex = 0.0
    delta: complex = 0.0

    @property
    def degree(self) -> int:
        if self.sigma != 0:
            return 2
        if self.tau != 0:
            return 1
        return 0

    def __call__(self, x):
        return (self.sigma * x + self.tau) * x + self.delta

    def deriv(self, x):
        """Value of the derivative ``2*sigma*x + tau``."""
        return 2 * self.sigma * x + self.tau

    @property
    def coeffs(self) -> tuple[complex, complex, complex]:
        """Scalar coefficients, lowest degree first."""
        return (self.delta, self.tau, self.sigma)


class MatrixPolynomial:
    """Polynomial with d-by-d complex matrix coefficients.

    Coefficients are stored lowest degree first.  After every operation
    the representation is normalized: trailing coefficients whose
    Frobenius norm is below ``COEFF_TRIM_REL`` times the largest
    coefficient norm are dropped, so the stored degree is tight (the
    identically zero polynomial keeps a single zero coefficient).
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs, *, trim: bool = True):
        arr = [np.atleast_2d(np.asarray(c, dtype=complex)) for c in coeffs]
        if not arr:
            raise ValueError("need at least one coefficient")
        d = arr[0].shape[0]
        for c in arr:
            if c.shape != (d, d):
                raise ValueError("all coefficients must share one square shape")
        stacked = np.stack(arr)
        if trim:
            norms = np.linalg.norm(stacked, axis=(1, 2))
            cut = COEFF_TRIM_REL * norms.max()
            top = len(arr) - 1
            while top > 0 and norms[top] <= cut:
                top -= 1
            stacked = stacked[: top + 1]
        stacked.setflags(write=False)
        self._coeffs = stacked

    # -- constructors -------------------------------------------------

    @classmethod
    def identity(cls, dim: int) -> "MatrixPolynomial":
        return cls([np.eye(dim, dtype=complex)])

    @classmethod
    def zero(cls, dim: int) -> "MatrixPolynomial":
        return cls([np.zeros((dim, dim), dtype=complex)])

    @classmethod
    def constant(cls, matrix) -> "MatrixPolynomial":
        return cls([as_matrix(matrix)])

    # -- inspection ----------------------------------------------------

    @property
    def coeffs(self) -> np.ndarray:
        """Read-only array of shape ``(degree + 1, d, d)``."""
        return self._coeffs

    @property
    def dim(self) -> int:
        return self._coeffs.shape[1]

    @property
    def degree(self) -> int:
        return self._coeffs.shape[0] - 1

    @property
    def is_zero(self) -> bool:
        return bool(np.all(self._coeffs == 0))

    def coeff(self, k: int) -> np.ndarray:
        """Coefficient of ``x**k`` (zero matrix beyond the degree)."""
        if 0 <= k <= self.degree:
            return self._coeffs[k]
        return np.zeros((self.dim, self.dim), dtype=complex)

    @property
    def top(self) -> np.ndarray:
        """Leading (highest stored degree) coefficient."""
        return self._coeffs[-1]

    def coeff_norm(self) -> float:
        """Largest Frobenius norm over the coefficients."""
        return float(np.linalg.norm(self._coeffs, axis=(1, 2)).max())

    # -- arithmetic ----------------------------------------------------

    def __call__(self, x):
        """Horner evaluation; ``x`` may be a scalar or a 1-d array.

        Returns a ``(d, d)`` matrix for scalar ``x`` and an ``(m, d, d)``
        stack for an array of m points.
        """
        xs = np.asarray(x)
        if xs.ndim == 0:
            out = np.array(self._coeffs[-1])
            for c in self._coeffs[-2::-1]:
                out = out * complex(xs) + c
            return out
        fac = xs.astype(complex)[:, None, None]
        out = np.broadcast_to(self._coeffs[-1], (len(xs),) + self._coeffs[-1].shape).copy()
        for c in self._coeffs[-2::-1]:
            out = out * fac + c
        return out

    def derivative(self) -> "MatrixPolynomial":
        if self.degree == 0:
            return MatrixPolynomial.zero(self.dim)
        ks = np.arange(1, self.degree + 1, dtype=complex)
        return MatrixPolynomial(self._coeffs[1:] * ks[:, None, None])

    def __add__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch in polynomial addition")
        n = max(self.degree, other.degree) + 1
        out = np.zeros((n, self.dim, self.dim), dtype=complex)
        out[: self.degree + 1] += self._coeffs
        out[: other.degree + 1] += other._coeffs
        return MatrixPolynomial(out)

    def __neg__(self) -> "MatrixPolynomial":
        return MatrixPolynomial(-self._coeffs)

    def __sub__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        return self + (-other)

    def left_mul(self, matrix) -> "MatrixPolynomial":
        """Multiply every coefficient by a constant matrix on the left."""
        m = as_matrix(matrix, self.dim)
        return MatrixPolynomial(np.einsum("ij,kjl->kil", m, self._coeffs))

    def right_mul(self, matrix) -> "MatrixPolynomial":
        """Multiply every coefficient by a constant matrix on the right."""
        m = as_matrix(matrix, self.dim)
        return MatrixPolynomial(np.einsum("kij,jl->kil", self._coeffs, m))

    def scaled(self, s: complex) -> "MatrixPolynomial":
        return MatrixPolynomial(self._coeffs * s)

    def times_x(self) -> "MatrixPolynomial":
        """Multiply by the scalar monomial x."""
        out = np.zeros((self.degree + 2, self.dim, self.dim), dtype=complex)
        out[1:] = self._coeffs
        return MatrixPolynomial(out)

    def mul_scalar_poly(self, scalar_coeffs) -> "MatrixPolynomial":
        """Multiply by a scalar polynomial given lowest degree first.

        Accepts a :class:`Quadratic` or any sequence of scalar
        coefficients.  Scalars commute with the matrix coefficients, so
        there is no left/right distinction.
        """
        if isinstance(scalar_coeffs, Quadratic):
            scalar_coeffs = scalar_coeffs.coeffs
        sc = np.asarray(scalar_coeffs, dtype=complex)
        out = np.zeros((self.degree + len(sc), self.dim, self.dim), dtype=complex)
        for j, s in enumerate(sc):
            if s != 0:
                out[j : j + self.degree + 1] += s * self._coeffs
        return MatrixPolynomial(out)

    def allclose(self, other: "MatrixPolynomial", tol: float = 1e-12) -> bool:
        scale = max(self.coeff_norm(), other.coeff_norm(), 1.0)
        return (self - other).coeff_norm() <= tol * scale

    def __repr__(self) -> str:
        return f"MatrixPolynomial(degree={self.degree}, dim={self.dim})"


@dataclass(frozen=True)
class ModelSpec:
    """Defining data of a matrix polynomial family.

    Parameters
    ----------
    q : Quadratic
        The scalar polynomial of degree at most two.
    l1, l2 : array_like
        The two d-by-d complex matrices entering the first-order data
        ``x*L1 + L2``.  Scalars are accepted for d = 1.
    dim : int
        Matrix dimension d >= 1.
    max_degree : int
        Working degree horizon N; nonresonance is checked for
        k = 1..2N (see :func:`validate_model`).
    """

    q: Quadratic
    l1: np.ndarray
    l2: np.ndarray
    dim: int
    max_degree: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.max_degree < 1:
            raise ValueError("max_degree must be >= 1")
        object.__setattr__(self, "l1", as_matrix(self.l1, self.dim))
        object.__setattr__(self, "l2", as_matrix(self.l2, self.dim))

    @cached_property
    def resonance_report(self) -> tuple[str, ...]:
        """Violated nonresonance conditions, computed once at first use."""
        return tuple(validate_model(self))

    def commutator_norm(self) -> float:
        return float(np.linalg.norm(commutator(self.l1, self.l2)))

    @property
    def is_commutative(self) -> bool:
        scale = max(1.0, float(np.linalg.norm(self.l1) * np.linalg.norm(self.l2)))
        return self.commutator_norm() <= 1e-12 * scale

    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)


# ---------------------------------------------------------------------------
# matrix functions
# ---------------------------------------------------------------------------


def matrix_exp(m) -> np.ndarray:
    """Matrix exponential by Pade scaling-and-squaring.

    Backed by ``scipy.linalg.expm`` (degree-13 rational approximant with
    norm-driven squaring count), which meets a 1e-12 relative accuracy
    target for the small dense matrices used here.

    Raises
    ------
    OverflowError
        If ``exp(m)`` exceeds the double precision range.
    """
    m = as_matrix(m)
    out = scipy.linalg.expm(np.asarray(m))
    if not np.all(np.isfinite(out.view(float))):
        raise OverflowError("matrix exponential exceeds the floating range")
    return out


def matrix_power(m, x: float) -> np.ndarray:
    """Real power ``x**M = exp(M * log(x))`` for x > 0.

    Only positive real bases are supported: weights are evaluated on the
    interior of their orthogonality interval, where no branch choice is
    needed.
    """
    if np.iscomplexobj(x) or not x > 0:
        raise ValueError(f"matrix_power needs a real base x > 0, got {x!r}")
    m = as_matrix(m)
    return matrix_exp(np.asarray(m) * np.log(float(x)))


def matrix_inverse(m) -> tuple[np.ndarray, float]:
    """Inverse together with the 2-norm condition number."""
    m = as_matrix(m)
    cond = float(np.linalg.cond(m))
    return np.linalg.inv(m), cond


def commutator(m1, m2) -> np.ndarray:
    m1 = np.asarray(m1, dtype=complex)
    m2 = np.asarray(m2, dtype=complex)
    return m1 @ m2 - m2 @ m1


# ---------------------------------------------------------------------------
# model validation
# ---------------------------------------------------------------------------


def _factor_is_invertible(factor: np.ndarray) -> bool:
    smin = np.linalg.svd(factor, compute_uv=False)[-1]
    return bool(smin > TOL_INVERTIBLE * max(np.linalg.norm(factor), 1e-300))


def validate_model(spec: ModelSpec) -> list[str]:
    """Report violated model conditions; an empty list means valid.

    Checks invertibility of ``L1 + k*sigma*I`` for every k = 1..2N: the
    smallest singular value must exceed ``TOL_INVERTIBLE`` times the
    factor norm.  Each failing k is named in the report.
    """
    report = []
    eye = spec.identity()
    for k in range(1, 2 * spec.max_degree + 1):
        factor = np.asarray(spec.l1) + k * spec.q.sigma * eye
        if not _factor_is_invertible(factor):
            report.append(f"L1 + {k}*sigma is singular (resonance at k={k})")
    return report


def require_valid(spec: ModelSpec) -> None:
    """Raise :class:`ResonanceError` if the model data is resonant."""
    report = spec.resonance_report
    if report:
        raise ResonanceError("; ".join(report))


# ---------------------------------------------------------------------------
# operation-style aliases over MatrixPolynomial methods
# ---------------------------------------------------------------------------


def poly_eval(p: MatrixPolynomial, x):
    """Evaluate ``p`` at a scalar (or 1-d array of) complex point(s)."""
    return p(x)


def poly_derivative(p: MatrixPolynomial) -> MatrixPolynomial:
    return p.derivative()


def poly_add(p: MatrixPolynomial, q: MatrixPolynomial) -> MatrixPolynomial:
    return p + q


def poly_scale_by_matrix(p: MatrixPolynomial, matrix, side: str = "left") -> MatrixPolynomial:
    """Multiply by a constant matrix on the chosen side.

    Order matters: family generation composes matrices on the left of
    the coefficients, while recurrence and expansion coefficients act on
    the right.
    """
    if side == "left":
        return p.left_mul(matrix)
    if side == "right":
        return p.right_mul(matrix)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def poly_mul_by_scalar_poly(p: MatrixPolynomial, scalar_coeffs) -> MatrixPolynomial:
    return p.mul_scalar_poly(scalar_coeffs)
