"""Pearson weights: construction, evaluation, and structural checks.

A weight is a matrix-valued solution of ``Q(x) * W**-1 * W' = x*L1 + L2``
on the interval matched to Q: the whole real line for constant Q, the
half line [0, inf) when Q vanishes at the origin, and [-1, 1] when Q has
roots at +-1.  Three constructions are provided:

* :func:`closed_commutative_weight` -- products of matrix exponentials
  and powers, valid whenever ``L1`` and ``L2`` commute.
* :func:`frobenius_weight` -- a truncated series ``t**E * Phi(t)`` at a
  regular singular endpoint, with the analytic factor determined by
  Sylvester recursions; valid for arbitrary (noncommuting) data as long
  as the exponent matrix has no nonzero-integer eigenvalue gaps.
  Evaluation outside the series trust radius continues the first-order
  equation with a high-order explicit integrator.
* :func:`selfadjoint2d_weight` -- the two-parameter-family of genuinely
  matrix-valued self-adjoint solutions built from a Jordan-type pair;
  these are indefinite (negative determinant) on the whole interior.

Residual and grid checks (:func:`pearson_residual`, :func:`grid_checks`)
and the constructive scalar-reduction test (:func:`reduce_to_scalar`)
complete the module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .core import (
    MatrixPolynomial,
    ModelSpec,
    Quadratic,
    ResonanceError,
    as_matrix,
    commutator,
    matrix_exp,
    matrix_power,
)
from .rodrigues import fd_weights

__all__ = [
    "Interval",
    "Weight",
    "ClosedCommutativeWeight",
    "FrobeniusWeight",
    "SelfAdjoint2DParams",
    "SelfAdjoint2DWeight",
    "closed_commutative_weight",
    "frobenius_weight",
    "selfadjoint2d_weight",
    "pearson_residual",
    "grid_checks",
    "GridChecks",
    "reduce_to_scalar",
    "ScalarReduction",
    "simultaneous_diagonalization",
]


@dataclass(frozen=True)
class Interval:
    """Orthogonality interval, determined by the degree of Q."""

    kind: str  # "real_line" | "half_line" | "jacobi"
    a: float
    b: float

    @classmethod
    def for_model(cls, spec: ModelSpec) -> "Interval":
        deg = spec.q.degree
        if deg == 0:
            return cls("real_line", -np.inf, np.inf)
        if deg == 1:
            if abs(spec.q.delta) > 1e-14 * max(1.0, abs(spec.q.tau)):
                raise ValueError("degree-1 Q must vanish at the origin (delta = 0)")
            return cls("half_line", 0.0, np.inf)
        if abs(spec.q.tau) > 1e-14 * abs(spec.q.sigma) or abs(
            spec.q.delta + spec.q.sigma
        ) > 1e-14 * abs(spec.q.sigma):
            raise ValueError("degree-2 Q must have roots at +-1 (tau = 0, delta = -sigma)")
        return cls("jacobi", -1.0, 1.0)

    def interior_grid(self, n: int = 50) -> np.ndarray:
        if self.kind == "real_line":
            return np.linspace(-2.5, 2.5, n)
        if self.kind == "half_line":
            return np.geomspace(0.04, 8.0, n)
        return np.linspace(-0.96, 0.96, n)

    def contains_interior(self, x: float) -> bool:
        return self.a < x < self.b


class Weight:
    """Evaluable Pearson solution attached to a model and an interval."""

    form = "abstract"

    def __init__(self, spec: ModelSpec, interval: Interval):
        self.spec = spec
        self.interval = interval

    def eval(self, x: float) -> np.ndarray:
        return self.eval_batch(np.array([float(x)]))[0]

    __call__ = eval

    def eval_batch(self, xs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def derivative_at(self, x: float) -> np.ndarray | None:
        """Analytic derivative where one is available, else None."""
        return None

    def default_grid(self, n: int = 50) -> np.ndarray:
        return self.interval.interior_grid(n)


# ---------------------------------------------------------------------------
# closed commutative forms
# ---------------------------------------------------------------------------

# Scalar coordinate functions multiplying the commuting matrix exponents.
_G_FUNCS = {
    "half_square": lambda x: 0.5 * x * x,
    "linear": lambda x: x,
    "log": np.log,
    "log1m": lambda x: np.log(1.0 - x),
    "log1p": lambda x: np.log(1.0 + x),
}


def simultaneous_diagonalization(mats, tol: float = 1e-9):
    """Common eigenbasis of a family of commuting matrices.

    Returns ``(V, diags)`` with every ``V**-1 @ M @ V`` diagonal (listed
    eigenvalues in ``diags``), or ``(None, reason)`` when some member is
    defective or the family fails to diagonalize to the tolerance.  Uses
    eigen-decompositions blockwise, splitting by eigenvalue clusters; a
    basis condition number above 1e8 is treated as defective.
    """
    mats = [np.asarray(m, dtype=complex) for m in mats]
    d = mats[0].shape[0]
    v = np.eye(d, dtype=complex)
    blocks = [list(range(d))]
    for m in mats:
        scale = max(1.0, float(np.linalg.norm(m)))
        mt = np.linalg.solve(v, m @ v)
        new_blocks = []
        for idx in blocks:
            if len(idx) == 1:
                new_blocks.append(idx)
                continue
            sub = mt[np.ix_(idx, idx)]
            w, u = np.linalg.eig(sub)
            if np.linalg.cond(u) > 1e8:
                return None, "defective: no eigenbasis (nilpotent part present)"
            # greedy eigenvalue clustering
            remaining = list(range(len(idx)))
            clusters = []
            while remaining:
                seed = remaining[0]
                cluster = [j for j in remaining if abs(w[j] - w[seed]) <= 1e-8 * scale]
                remaining = [j for j in remaining if j not in cluster]
                clusters.append(cluster)
            order = [j for cluster in clusters for j in cluster]
            cols = np.array(idx)
            v[:, cols] = v[:, cols] @ u[:, order]
            pos = 0
            for cluster in clusters:
                new_blocks.append([idx[i] for i in range(pos, pos + len(cluster))])
                pos += len(cluster)
        blocks = new_blocks
    diags = []
    for m in mats:
        mt = np.linalg.solve(v, m @ v)
        off = mt - np.diag(np.diag(mt))
        if np.linalg.norm(off) > tol * max(1.0, np.linalg.norm(mt)):
            return None, "not simultaneously diagonalizable to tolerance"
        diags.append(np.diag(mt).copy())
    return (v, diags), None


def _scalar_plus_nilpotent(mats, d):
    """Write every matrix as ``a*I + b*K`` with one shared K, K @ K = 0.

    Returns ``(alphas, betas, K)`` or None.  This covers the
    upper-triangular Toeplitz (Jordan-type) commutative data in any basis.
    """
    alphas, kparts = [], []
    for m in mats:
        a = np.trace(m) / d
        alphas.append(a)
        kparts.append(m - a * np.eye(d))
    norms = [np.linalg.norm(k) for k in kparts]
    ref = int(np.argmax(norms))
    if norms[ref] < 1e-14:
        return list(alphas), [0.0] * len(mats), np.zeros((d, d), dtype=complex)
    k = kparts[ref] / norms[ref]
    if np.linalg.norm(k @ k) > 1e-10:
        return None
    betas = []
    for part, nrm in zip(kparts, norms):
        if nrm < 1e-14:
            betas.append(0.0)
            continue
        b = np.vdot(k, part)  # projection onto the unit nilpotent direction
        if np.linalg.norm(part - b * k) > 1e-10 * nrm:
            return None
        betas.append(b)
    return list(alphas), betas, k


class ClosedCommutativeWeight(Weight):
    """Weight ``exp(sum_i g_i(x) * M_i)`` for commuting matrices M_i.

    The concrete pairs ``(g_i, M_i)`` depend on the degree of Q:

    * deg 0:  ``exp(x**2/2 * L1/delta) * exp(x * L2/delta)``
    * deg 1:  ``exp(x * L1/tau) * x**(L2/tau)``
    * deg 2:  ``(1-x)**((L1+L2)/(2 sigma)) * (1+x)**((L1-L2)/(2 sigma))``

    Evaluation is vectorized through a common eigenbasis when the family
    is diagonalizable, through the shared scalar-plus-nilpotent form for
    Jordan-type data, and falls back to per-point matrix exponentials
    otherwise.
    """

    form = "closed_commutative"

    def __init__(self, spec: ModelSpec):
        scale = max(1.0, float(np.linalg.norm(spec.l1) * np.linalg.norm(spec.l2)))
        if spec.commutator_norm() > 1e-12 * scale:
            raise ValueError("closed commutative weight requires commuting L1, L2")
        super().__init__(spec, Interval.for_model(spec))
        q = spec.q
        l1, l2 = np.asarray(spec.l1), np.asarray(spec.l2)
        if q.degree == 0:
            terms = [("half_square", l1 / q.delta), ("linear", l2 / q.delta)]
        elif q.degree == 1:
            terms = [("linear", l1 / q.tau), ("log", l2 / q.tau)]
        else:
            terms = [
                ("log1m", (l1 + l2) / (2 * q.sigma)),
                ("log1p", (l1 - l2) / (2 * q.sigma)),
            ]
        self._terms = terms
        self._structure = self._build_structure()

    def _build_structure(self):
        mats = [m for _, m in self._terms]
        d = self.spec.dim
        res, _ = simultaneous_diagonalization(mats)
        if res is not None:
            v, diags = res
            return ("diag", v, np.linalg.inv(v), diags)
        spn = _scalar_plus_nilpotent(mats, d)
        if spn is not None:
            return ("nilpotent", *spn)
        return ("general",)

    def eval_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        gvals = [_G_FUNCS[name](xs) for name, _ in self._terms]
        kind = self._structure[0]
        d = self.spec.dim
        if kind == "diag":
            _, v, vinv, diags = self._structure
            expo = np.zeros((len(xs), d), dtype=complex)
            for g, lam in zip(gvals, diags):
                expo += np.multiply.outer(g.astype(complex), lam)
            core = np.exp(expo)
            return np.einsum("ij,xj,jk->xik", v, core, vinv)
        if kind == "nilpotent":
            _, alphas, betas, k = self._structure
            u = sum(g * a for g, a in zip(gvals, alphas))
            w = sum(g * b for g, b in zip(gvals, betas))
            eye = np.eye(d, dtype=complex)
            return np.exp(u)[:, None, None] * (eye + w[:, None, None] * k)
        out = np.empty((len(xs), d, d), dtype=complex)
        for i in range(len(xs)):
            expo = sum(g[i] * m for g, (_, m) in zip(gvals, self._terms))
            out[i] = matrix_exp(expo)
        return out


def closed_commutative_weight(spec: ModelSpec) -> ClosedCommutativeWeight:
    """Closed-form weight for commuting model data (see class docs)."""
    return ClosedCommutativeWeight(spec)


# ---------------------------------------------------------------------------
# Frobenius series at a regular singular endpoint
# ---------------------------------------------------------------------------


def _local_connection(spec: ModelSpec, anchor: float, n_terms: int):
    """Exponent matrix and Taylor coefficients of the local connection.

    In the local coordinate t (distance to the anchor) the equation reads
    ``V'(t) = V(t) * (E + sum_m t**m M_m) / t``; this returns ``(E, [M_m])``
    with the list starting at m = 1.
    """
    q = spec.q
    l1, l2 = np.asarray(spec.l1), np.asarray(spec.l2)
    if anchor == 0.0:
        if q.degree != 1:
            raise ValueError("anchor 0 requires a degree-1 Q vanishing at the origin")
        mats = [l1 / q.tau] + [np.zeros_like(l1)] * (n_terms - 1)
        return l2 / q.tau, mats
    if q.degree != 2:
        raise ValueError("anchors +-1 require a degree-2 Q with roots at +-1")
    sig = q.sigma
    if anchor == 1.0:
        exponent = (l1 + l2) / (2 * sig)
        gen = l2 - l1
    elif anchor == -1.0:
        exponent = (l1 - l2) / (2 * sig)
        gen = -(l1 + l2)
    else:
        raise ValueError(f"anchor must be one of 0, +1, -1, got {anchor!r}")
    mats = [gen / (sig * 2.0 ** (m + 1)) for m in range(1, n_terms)]
    return exponent, [mats[m - 1] for m in range(1, n_terms)] + [np.zeros_like(l1)]


def _sylvester_step(exponent: np.ndarray, n: int, rhs: np.ndarray) -> np.ndarray:
    """Solve ``n*X + E@X - X@E = rhs`` through the Kronecker form."""
    d = exponent.shape[0]
    eye = np.eye(d)
    op = n * np.eye(d * d) + np.kron(eye, exponent) - np.kron(exponent.T, eye)
    x = np.linalg.solve(op, rhs.flatten(order="F"))
    return x.reshape((d, d), order="F")


class FrobeniusWeight(Weight):
    """Series weight ``t**E * Phi(t)`` at a regular singular endpoint.

    ``t`` measures the distance to the anchor (t = x at 0, 1 - x at +1,
    1 + x at -1).  Inside the trust radius the truncated series is used
    and an analytic derivative is available; outside, values are continued
    by integrating the Pearson equation from the series region with an
    adaptive 8th-order Runge-Kutta scheme.
    """

    form = "frobenius"

    def __init__(self, spec, anchor, exponent, phis, trust_radius):
        super().__init__(spec, Interval.for_model(spec))
        self.anchor = float(anchor)
        self.exponent = exponent
        self.phis = tuple(phis)
        self.truncation = len(phis) - 1
        self.trust_radius = float(trust_radius)

    # -- local coordinate helpers ---------------------------------------

    def _to_local(self, x):
        if self.anchor == 0.0:
            return x
        if self.anchor == 1.0:
            return 1.0 - x
        return 1.0 + x

    @property
    def _dt_dx(self) -> float:
        return -1.0 if self.anchor == 1.0 else 1.0

    def _phi(self, t: float) -> np.ndarray:
        out = np.array(self.phis[-1])
        for c in self.phis[-2::-1]:
            out = out * t + c
        return out

    def _phi_deriv(self, t: float) -> np.ndarray:
        out = self.truncation * np.array(self.phis[-1])
        for k in range(self.truncation - 1, 0, -1):
            out = out * t + k * self.phis[k]
        return out

    def _series_value(self, t: float) -> np.ndarray:
        return matrix_power(self.exponent, t) @ self._phi(t)

    # -- evaluation ------------------------------------------------------

    def eval_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        d = self.spec.dim
        out = np.empty((len(xs), d, d), dtype=complex)
        ts = self._to_local(xs)
        if np.any(ts <= 0):
            raise ValueError("evaluation points must lie strictly inside the interval")
        inside = ts <= self.trust_radius
        for i in np.flatnonzero(inside):
            out[i] = self._series_value(float(ts[i]))
        idx = np.flatnonzero(~inside)
        if len(idx):
            out[idx] = self._continued_values(xs[idx])
        return out

    def derivative_at(self, x: float) -> np.ndarray | None:
        t = self._to_local(x)
        if not 0 < t <= self.trust_radius:
            return None
        dphi = (np.asarray(self.exponent) / t) @ self._phi(t) + self._phi_deriv(t)
        return self._dt_dx * (matrix_power(self.exponent, t) @ dphi)

    def _pearson_rhs(self, x: float, wvec: np.ndarray) -> np.ndarray:
        d = self.spec.dim
        w = wvec.reshape(d, d)
        m = (x * np.asarray(self.spec.l1) + np.asarray(self.spec.l2)) / self.spec.q(x)
        return (w @ m).ravel()

    def _continued_values(self, xs: np.ndarray) -> np.ndarray:
        t0 = 0.75 * min(self.trust_radius, 1.0)
        x0 = t0 if self.anchor == 0.0 else self.anchor - self._dt_dx * t0
        w0 = self._series_value(t0)
        d = self.spec.dim
        out = np.empty((len(xs), d, d), dtype=complex)
        order = np.argsort(xs)
        for direction in (+1, -1):
            sel = order[xs[order] > x0] if direction > 0 else order[xs[order] < x0][::-1]
            if len(sel) == 0:
                continue
            targets = xs[sel]
            sol = solve_ivp(
                self._pearson_rhs,
                (x0, targets[-1]),
                w0.ravel(),
                t_eval=targets,
                method="DOP853",
                rtol=1e-12,
                atol=1e-14,
            )
            if not sol.success:
                raise RuntimeError(f"Pearson continuation failed: {sol.message}")
            out[sel] = sol.y.T.reshape(len(targets), d, d)
        exact = np.flatnonzero(xs == x0)
        if len(exact):
            out[exact] = w0
        return out


def frobenius_weight(spec: ModelSpec, anchor: float = 0.0, truncation: int = 60) -> FrobeniusWeight:
    """Construct the series weight at a regular singular endpoint.

    The analytic factor is determined term by term from the Sylvester
    equations ``n*Phi_n + E@Phi_n - Phi_n@E = sum_m Phi_(n-m) M_m``; each
    step is uniquely solvable exactly when no two exponent eigenvalues
    differ by the integer n, and a violation raises
    :class:`~matrodrigues.core.ResonanceError` naming n and the pair.

    The trust radius rho is fixed by the tail estimate
    ``norm(Phi_M) * rho**M <= 1e-10``.
    """
    if truncation < 4:
        raise ValueError("truncation must be at least 4")
    exponent, taylor = _local_connection(spec, float(anchor), truncation + 1)
    d = spec.dim
    eigs = np.linalg.eigvals(exponent)
    scale = max(1.0, float(np.abs(eigs).max()))
    phis = [np.eye(d, dtype=complex)]
    for n in range(1, truncation + 1):
        gaps = n + eigs[:, None] - eigs[None, :]
        if np.abs(gaps).min() <= 1e-9 * scale:
            i, j = np.unravel_index(np.abs(gaps).argmin(), gaps.shape)
            raise ResonanceError(
                f"Frobenius recursion resonant at step n={n}: exponent eigenvalues "
                f"{eigs[j]:.6g} and {eigs[i]:.6g} differ by the integer {n}"
            )
        rhs = np.zeros((d, d), dtype=complex)
        for m in range(1, n + 1):
            rhs += phis[n - m] @ taylor[m - 1]
        phis.append(_sylvester_step(exponent, n, rhs))
    tail = float(np.linalg.norm(phis[-1]))
    if tail < 1e-300:
        rho = 1e6 if anchor == 0.0 else 1.9
    else:
        rho = (1e-10 / tail) ** (1.0 / truncation)
    cap = 1e6 if anchor == 0.0 else 1.9
    rho = float(min(max(rho, 1e-6), cap))
    return FrobeniusWeight(spec, anchor, exponent, phis, rho)


# ---------------------------------------------------------------------------
# self-adjoint two-dimensional families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SelfAdjoint2DParams:
    """Real parameters of the non-scalar self-adjoint weight family.

    ``alpha, beta`` sit in the Jordan-type matrix ``L = alpha*I + beta*N``,
    ``lam`` in ``D = lam*I + N``, and ``c != 0, d_entry`` fill the constant
    symmetric factor ``T = [[0, c], [c, d_entry]]`` whose determinant
    ``-c**2`` makes every member indefinite.  ``s`` is the change of basis.
    """

    alpha: float
    beta: float
    lam: float
    c: float
    d_entry: float
    s: np.ndarray = field(default_factory=lambda: np.eye(2))

    def __post_init__(self):
        if self.c == 0:
            raise ValueError("parameter c must be nonzero")
        s = as_matrix(self.s, 2)
        if abs(np.linalg.det(s)) < 1e-12:
            raise ValueError("basis matrix s must be invertible")
        object.__setattr__(self, "s", s)


class SelfAdjoint2DWeight(Weight):
    """Self-adjoint, indefinite 2x2 weight built from a Jordan-type pair.

    For Q = x the weight is
    ``exp(alpha x) x**lam * S* [[0, c], [c, c(beta x + log x) + d]] S``;
    for Q = x**2 - 1 the scalar prefactor is
    ``(1-x)**((alpha+lam)/2) (1+x)**((alpha-lam)/2)`` and the log-bracket
    becomes ``(beta+1)/2 log(1-x) + (beta-1)/2 log(1+x)``.  Both solve the
    Pearson equation of the conjugated model ``L1 = S**-1 L S``,
    ``L2 = S**-1 D S`` and satisfy ``W = W*`` with ``det W < 0`` on the
    whole interior.
    """

    form = "selfadjoint2d"

    def __init__(self, params: SelfAdjoint2DParams, q_kind: str, max_degree: int = 8):
        if q_kind not in ("x", "x2m1"):
            raise ValueError(f"q_kind must be 'x' or 'x2m1', got {q_kind!r}")
        self.params = params
        self.q_kind = q_kind
        n = np.array([[0.0, 1.0], [0.0, 0.0]])
        eye = np.eye(2)
        lmat = params.alpha * eye + params.beta * n
        dmat = params.lam * eye + n
        s = np.asarray(params.s)
        sinv = np.linalg.inv(s)
        q = Quadratic(0.0, 1.0, 0.0) if q_kind == "x" else Quadratic(1.0, 0.0, -1.0)
        spec = ModelSpec(q, sinv @ lmat @ s, sinv @ dmat @ s, dim=2, max_degree=max_degree)
        super().__init__(spec, Interval.for_model(spec))

    def eval_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        p = self.params
        if self.q_kind == "x":
            scal = np.exp(p.alpha * xs) * xs**p.lam
            bracket = p.beta * xs + np.log(xs)
        else:
            scal = (1 - xs) ** ((p.alpha + p.lam) / 2) * (1 + xs) ** ((p.alpha - p.lam) / 2)
            bracket = 0.5 * (p.beta + 1) * np.log(1 - xs) + 0.5 * (p.beta - 1) * np.log(1 + xs)
        mid = np.zeros((len(xs), 2, 2), dtype=complex)
        mid[:, 0, 1] = p.c
        mid[:, 1, 0] = p.c
        mid[:, 1, 1] = p.c * bracket + p.d_entry
        s = np.asarray(p.s)
        return scal[:, None, None] * np.einsum("ij,xjk,kl->xil", s.conj().T, mid, s)


def selfadjoint2d_weight(params: SelfAdjoint2DParams, q_kind: str = "x") -> SelfAdjoint2DWeight:
    """Self-adjoint indefinite 2x2 weight; see :class:`SelfAdjoint2DWeight`."""
    return SelfAdjoint2DWeight(params, q_kind)


# ---------------------------------------------------------------------------
# residual and grid checks
# ---------------------------------------------------------------------------

_FD9_OFFSETS = np.arange(-4, 5)
_FD9_WEIGHTS = fd_weights(1, _FD9_OFFSETS)


def _fd_weight_derivative(weight: Weight, x: float) -> np.ndarray:
    """8th-order derivative estimate in a coordinate adapted to the endpoints.

    Near an algebraic singularity the stencil is laid out in log (half
    line) or atanh (finite interval) coordinates so the differentiated
    function has bounded relative derivatives.
    """
    kind = weight.interval.kind
    h = 0.02
    if kind == "half_line" and x <= 1.0:
        pts = x * np.exp(_FD9_OFFSETS * h)
        jac = 1.0 / x
    elif kind == "jacobi":
        u = np.arctanh(x)
        pts = np.tanh(u + _FD9_OFFSETS * h)
        jac = 1.0 / (1.0 - x * x)
    elif kind == "real_line":
        h = 0.01
        pts = x + _FD9_OFFSETS * h
        jac = 1.0
    else:
        pts = x + _FD9_OFFSETS * h
        jac = 1.0
    vals = weight.eval_batch(pts)
    dd = np.einsum("i,ijk->jk", _FD9_WEIGHTS.astype(complex), vals) / h
    return dd * jac


def pearson_residual(weight: Weight, x: float) -> float:
    """Norm of ``Q(x) * W**-1 W' - (x*L1 + L2)`` at an interior point.

    The derivative uses the analytic series form where the weight provides
    one and an 8th-order adapted finite-difference stencil otherwise, so
    the residual is an independent check of the constructed weight, not a
    restatement of its defining equation.
    """
    if not weight.interval.contains_interior(x):
        raise ValueError(f"x={x} is not interior to {weight.interval.kind}")
    w = weight.eval(x)
    dw = weight.derivative_at(x)
    if dw is None:
        dw = _fd_weight_derivative(weight, x)
    spec = weight.spec
    lhs = spec.q(x) * np.linalg.solve(w, dw)
    rhs = x * np.asarray(spec.l1) + np.asarray(spec.l2)
    return float(np.linalg.norm(lhs - rhs))


@dataclass(frozen=True)
class GridChecks:
    """Pointwise self-adjointness / definiteness summary over a grid."""

    points: np.ndarray
    selfadjoint: bool
    positive_semidefinite: bool
    indefinite: bool
    selfadjoint_pointwise: np.ndarray
    eig_min: np.ndarray
    eig_max: np.ndarray


def grid_checks(weight: Weight, grid: np.ndarray | None = None) -> GridChecks:
    """Classify a weight on interior points.

    A weight is reported self-adjoint when ``norm(W - W*) <= 1e-9 norm(W)``
    at every grid point, positive semidefinite when all eigenvalues of the
    Hermitian part stay above ``-1e-9 norm(W)``, and indefinite when
    eigenvalues of both signs occur at some point.
    """
    if grid is None:
        grid = weight.default_grid()
    grid = np.asarray(grid, dtype=float)
    vals = weight.eval_batch(grid)
    nrm = np.maximum(np.linalg.norm(vals, axis=(1, 2)), 1e-300)
    herm = 0.5 * (vals + np.conj(np.swapaxes(vals, 1, 2)))
    sa_defect = np.linalg.norm(vals - np.conj(np.swapaxes(vals, 1, 2)), axis=(1, 2))
    sa_pt = sa_defect <= 1e-9 * nrm
    eigs = np.linalg.eigvalsh(herm)
    eig_min, eig_max = eigs[:, 0], eigs[:, -1]
    psd_pt = eig_min >= -1e-9 * nrm
    indef_pt = (eig_min < -1e-9 * nrm) & (eig_max > 1e-9 * nrm)
    return GridChecks(
        points=grid,
        selfadjoint=bool(sa_pt.all()),
        positive_semidefinite=bool(psd_pt.all()),
        indefinite=bool(indef_pt.any()),
        selfadjoint_pointwise=sa_pt,
        eig_min=eig_min,
        eig_max=eig_max,
    )


# ---------------------------------------------------------------------------
# scalar reduction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalarReduction:
    """Outcome of the simultaneous-diagonalization attempt.

    When ``s`` is not None, ``s @ L_i @ s**-1`` is diagonal to 1e-10 and
    the weight splits into scalar weights in that basis; otherwise
    ``reason`` tells why no such basis exists.
    """

    s: np.ndarray | None
    l1_diag: np.ndarray | None
    l2_diag: np.ndarray | None
    reason: str | None = None

    @property
    def reducible(self) -> bool:
        return self.s is not None


def reduce_to_scalar(spec: ModelSpec) -> ScalarReduction:
    """Attempt to split the model into scalar ones.

    Succeeds exactly when ``L1`` and ``L2`` commute and are both
    diagonalizable; Jordan-type data is reported as defective (the
    generated polynomials then live in a genuinely non-semisimple
    commutative algebra and no diagonalizing basis exists).
    """
    scale = max(1.0, float(np.linalg.norm(spec.l1) * np.linalg.norm(spec.l2)))
    if spec.commutator_norm() > 1e-10 * scale:
        return ScalarReduction(None, None, None, reason="noncommuting")
    res, why = simultaneous_diagonalization([np.asarray(spec.l1), np.asarray(spec.l2)])
    if res is None:
        return ScalarReduction(None, None, None, reason=why)
    v, (d1, d2) = res
    s = np.linalg.inv(v)
    for m, dd in ((spec.l1, d1), (spec.l2, d2)):
        off = s @ np.asarray(m) @ v - np.diag(dd)
        if np.linalg.norm(off) > 1e-10 * max(1.0, float(np.linalg.norm(m))):
            return ScalarReduction(None, None, None, reason="diagonalization above tolerance")
    return ScalarReduction(s, d1, d2)
