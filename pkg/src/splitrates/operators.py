"""Smooth convex functions and linear maps: the building blocks activated by
the splitting schemes.

Every function object exposes value / gradient and, when a closed form
exists, the proximity operator prox(x, tau) = argmin_y tau*h(y) + ||y-x||^2/2,
together with its gradient-Lipschitz constant and strong-convexity modulus.
Linear maps carry an explicit adjoint and an operator-norm-squared estimate.
All objects are immutable after construction; factorizations are cached so
repeated prox calls at a fixed step-size are cheap.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from .exceptions import ConstructionError, ParameterError

_SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# spectral utilities


def power_iteration_norm_sq(apply, adjoint, dim, max_sweeps=10000, tol=1e-10, seed=0):
    """Largest eigenvalue of L^T L for the map given by apply/adjoint pairs."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim)
    nv = np.linalg.norm(v)
    if nv == 0 or dim == 0:
        return 0.0
    v /= nv
    lam = 0.0
    for _ in range(max_sweeps):
        w = adjoint(apply(v))
        lam = float(v @ w)
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        if np.linalg.norm(w - lam * v) <= tol * max(1.0, abs(lam)):
            return lam
        v = w / nw
    return lam


def extreme_eigenvalues(S, max_sweeps=10000, tol=1e-10, seed=0):
    """(lam_min, lam_max) of a dense symmetric PSD matrix.

    lam_max comes from power iteration, lam_min from inverse iteration on a
    Cholesky factorization; if the factorization fails (rank deficiency
    within rounding) lam_min is reported as 0.
    """
    S = np.asarray(S, dtype=float)
    n = S.shape[0]
    rng = np.random.default_rng(seed)

    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    lam_max = 0.0
    for _ in range(max_sweeps):
        w = S @ v
        lam_max = float(v @ w)
        nw = np.linalg.norm(w)
        if nw == 0:
            lam_max = 0.0
            break
        if np.linalg.norm(w - lam_max * v) <= tol * max(1.0, lam_max):
            break
        v = w / nw

    try:
        factor = cho_factor(S)
    except LinAlgError:
        return 0.0, lam_max
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    lam_min = lam_max
    for _ in range(max_sweeps):
        w = cho_solve(factor, v)
        w /= np.linalg.norm(w)
        lam_min = float(w @ (S @ w))
        if np.linalg.norm(S @ w - lam_min * w) <= tol * max(1.0, lam_max):
            break
        v = w
    return lam_min, lam_max


# ---------------------------------------------------------------------------
# linear maps


class LinearMap:
    """Bounded linear operator with an explicit adjoint.

    The adjoint identity <L x, y> = <x, L* y> is the caller's promise; tests
    probe it on random pairs.  ``operator_norm_sq`` is exact when supplied at
    construction, otherwise a power-iteration estimate (``norm_sq_exact``
    records which).
    """

    def __init__(self, apply, adjoint, in_dim, out_dim, norm_sq=None, norm_sq_exact=False, matrix=None):
        self._apply = apply
        self._adjoint = adjoint
        self.in_dim = int(in_dim)
        self.out_dim = int(out_dim)
        self.matrix = matrix
        if norm_sq is None:
            norm_sq = power_iteration_norm_sq(apply, adjoint, self.in_dim)
            norm_sq_exact = False
        self.operator_norm_sq = float(norm_sq)
        self.norm_sq_exact = bool(norm_sq_exact)

    def __call__(self, x):
        return self._apply(np.asarray(x, dtype=float))

    def adjoint(self, y):
        return self._adjoint(np.asarray(y, dtype=float))

    @classmethod
    def from_matrix(cls, m, norm_sq=None, norm_sq_exact=False):
        m = np.asarray(m, dtype=float)
        return cls(
            apply=lambda x: m @ x,
            adjoint=lambda y: m.T @ y,
            in_dim=m.shape[1],
            out_dim=m.shape[0],
            norm_sq=norm_sq,
            norm_sq_exact=norm_sq_exact,
            matrix=m,
        )


def identity_map(n) -> LinearMap:
    return LinearMap(lambda x: x, lambda y: y, n, n, norm_sq=1.0, norm_sq_exact=True)


def difference_operator(n) -> LinearMap:
    """Half first-differences: row k of the (n-1) x n matrix maps x to
    (x_{k+1} - x_k) / 2."""
    if n < 2:
        raise ParameterError(f"difference operator needs n >= 2, got {n}")
    m = np.zeros((n - 1, n))
    idx = np.arange(n - 1)
    m[idx, idx] = -0.5
    m[idx, idx + 1] = 0.5
    return LinearMap.from_matrix(m)


def odd_even_split(D: LinearMap) -> tuple[LinearMap, LinearMap]:
    """Row restrictions of the difference operator to odd and even rows.

    Within each half the rows touch disjoint coordinate pairs, so
    L L^T = Id/2 holds exactly and the returned maps carry norm_sq = 1/2
    as an exact value.
    """
    if D.matrix is None:
        raise ParameterError("odd_even_split needs a matrix-backed map")
    odd = D.matrix[0::2]
    even = D.matrix[1::2]

    def restricted(rows):
        norm_sq = 0.5 if rows.shape[0] else 0.0
        return LinearMap.from_matrix(rows, norm_sq=norm_sq, norm_sq_exact=True)

    return restricted(odd), restricted(even)


def haar_transform(n, levels=None) -> LinearMap:
    """Orthonormal multilevel Haar analysis map on length-n vectors.

    n must be a power of two; levels defaults to the full log2(n) depth.
    The adjoint is the synthesis (inverse) transform, so W^T W = W W^T = Id
    holds to rounding and the operator norm is exactly 1.
    """
    n = int(n)
    if n < 2 or n & (n - 1):
        raise ParameterError(f"haar transform needs a power-of-two length, got {n}")
    max_levels = n.bit_length() - 1
    if levels is None:
        levels = max_levels
    if not 1 <= levels <= max_levels:
        raise ParameterError(f"levels must be in [1, {max_levels}], got {levels}")

    def forward(x):
        w = np.array(x, dtype=float)
        m = n
        for _ in range(levels):
            a = (w[0:m:2] + w[1:m:2]) / _SQRT2
            d = (w[0:m:2] - w[1:m:2]) / _SQRT2
            w[: m // 2] = a
            w[m // 2 : m] = d
            m //= 2
        return w

    def inverse(w):
        y = np.array(w, dtype=float)
        m = n >> levels
        for _ in range(levels):
            a = y[:m].copy()
            d = y[m : 2 * m].copy()
            y[0 : 2 * m : 2] = (a + d) / _SQRT2
            y[1 : 2 * m : 2] = (a - d) / _SQRT2
            m *= 2
        return y

    return LinearMap(forward, inverse, n, n, norm_sq=1.0, norm_sq_exact=True)


# ---------------------------------------------------------------------------
# scalar Huber machinery


def huber_value(zeta, mu):
    """Huber loss: |z| - mu/2 outside [-mu, mu], z^2/(2 mu) inside."""
    z = np.asarray(zeta, dtype=float)
    a = np.abs(z)
    out = np.where(a > mu, a - mu / 2.0, z * z / (2.0 * mu))
    return float(out) if np.ndim(zeta) == 0 else out


def huber_gradient(zeta, mu):
    """Derivative of the Huber loss: sign outside [-mu, mu], z/mu inside."""
    z = np.asarray(zeta, dtype=float)
    out = np.where(np.abs(z) > mu, np.sign(z), z / mu)
    return float(out) if np.ndim(zeta) == 0 else out


def huber_prox(zeta, mu, tau):
    """Proximity operator of the Huber loss with step tau.

    Shrinks by tau outside [-(tau+mu), tau+mu] and scales by mu/(tau+mu)
    inside; the boundary belongs to the linear branch (both agree there).
    """
    z = np.asarray(zeta, dtype=float)
    out = np.where(np.abs(z) > tau + mu, z - tau * np.sign(z), mu * z / (tau + mu))
    return float(out) if np.ndim(zeta) == 0 else out


# ---------------------------------------------------------------------------
# composite prox rules


def semiorthogonal_prox(h, L: LinearMap, x, tau, c=None):
    """Exact prox of tau*(h o L) when L L^T = c Id.

    prox(x) = x - (1/c) L^T (Id - prox_{c tau h})(L x); h must have a prox.
    """
    if c is None:
        c = semiorthogonal_scale(L)
    w = L(x)
    return x - (1.0 / c) * L.adjoint(w - h.prox(w, c * tau))


def orthonormal_prox(h, W: LinearMap, x, tau):
    """Exact prox of tau*(h o W) for orthonormal W: W^T prox_{tau h}(W x)."""
    return W.adjoint(h.prox(W(x), tau))


def scaled_shifted_prox(z, g, x, tau):
    """Exact prox of tau*(q + g) with q = ||. - z||^2 / 2.

    Completing the square folds q into the quadratic coupling term:
    prox(x) = prox_{(tau/(1+tau)) g}((x + tau z) / (1 + tau)).
    """
    w = (x + tau * z) / (1.0 + tau)
    return g.prox(w, tau / (1.0 + tau))


def semiorthogonal_scale(L: LinearMap, n_checks=5, tol=1e-10, seed=0):
    """Measure c with L L^T = c Id, raising if the identity fails."""
    if L.out_dim == 0:
        return 1.0
    rng = np.random.default_rng(seed)
    c = None
    for _ in range(n_checks):
        u = rng.standard_normal(L.out_dim)
        v = L(L.adjoint(u))
        if c is None:
            c = float(u @ v) / float(u @ u)
        if np.linalg.norm(v - c * u) > tol * np.linalg.norm(u):
            raise ConstructionError("L L^T is not a multiple of the identity")
    if not c > 0:
        raise ConstructionError(f"semi-orthogonality scale must be positive, got {c}")
    return c


def check_orthonormal(W: LinearMap, n_checks=5, tol=1e-10, seed=0):
    """Verify W^T W = W W^T = Id on random vectors, raising on failure."""
    rng = np.random.default_rng(seed)
    for _ in range(n_checks):
        u = rng.standard_normal(W.in_dim)
        if np.linalg.norm(W.adjoint(W(u)) - u) > tol * np.linalg.norm(u):
            raise ConstructionError("W^T W differs from the identity")
        v = rng.standard_normal(W.out_dim)
        if np.linalg.norm(W(W.adjoint(v)) - v) > tol * np.linalg.norm(v):
            raise ConstructionError("W W^T differs from the identity")


# ---------------------------------------------------------------------------
# smooth function objects


class SmoothFunction:
    """Convex function with gradient; subclasses may add a closed-form prox."""

    has_prox = False
    grad_lipschitz = math.inf
    strong_convexity = 0.0

    def value(self, x) -> float:
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def prox(self, x, tau):
        raise NotImplementedError(f"{type(self).__name__} has no closed-form prox")


class Zero(SmoothFunction):
    """The zero function; its prox is the identity."""

    has_prox = True
    grad_lipschitz = 0.0

    def value(self, x):
        return 0.0

    def gradient(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def prox(self, x, tau):
        return np.asarray(x, dtype=float)


class Huber(SmoothFunction):
    """weight * sum_i phi_mu(x_i): the coordinatewise smoothed-l1 loss."""

    has_prox = True

    def __init__(self, mu, weight=1.0):
        if not mu > 0:
            raise ParameterError(f"mu must be positive, got {mu}")
        if not weight > 0:
            raise ParameterError(f"weight must be positive, got {weight}")
        self.mu = float(mu)
        self.weight = float(weight)
        self.grad_lipschitz = self.weight / self.mu
        self.strong_convexity = 0.0

    def value(self, x):
        return self.weight * float(np.sum(huber_value(np.asarray(x, dtype=float), self.mu)))

    def gradient(self, x):
        return self.weight * huber_gradient(np.asarray(x, dtype=float), self.mu)

    def prox(self, x, tau):
        return huber_prox(np.asarray(x, dtype=float), self.mu, tau * self.weight)


class QuadraticFidelity(SmoothFunction):
    """f(x) = ||A x - z||^2 / 2; A = None means the identity.

    The prox solves (Id + tau A^T A) y = x + tau A^T z through a Cholesky
    factorization cached per step-size.  The curvature constants are the
    extreme eigenvalues of A^T A; rank deficiency yields strong_convexity 0
    while the prox stays well defined.
    """

    has_prox = True

    def __init__(self, A, z):
        if A is not None and hasattr(A, "matrix"):
            A = A.matrix
        self.A = None if A is None else np.asarray(A, dtype=float)
        self.z = np.asarray(z, dtype=float)
        if self.A is None:
            self.grad_lipschitz = 1.0
            self.strong_convexity = 1.0
            self._gram = None
            self._Atz = self.z
        else:
            self._gram = self.A.T @ self.A
            self._Atz = self.A.T @ self.z
            lam_min, lam_max = extreme_eigenvalues(self._gram)
            self.grad_lipschitz = lam_max
            self.strong_convexity = max(lam_min, 0.0)
        self._chol = {}

    def value(self, x):
        r = x - self.z if self.A is None else self.A @ x - self.z
        return 0.5 * float(r @ r)

    def gradient(self, x):
        if self.A is None:
            return x - self.z
        return self.A.T @ (self.A @ x - self.z)

    def prox(self, x, tau):
        if self.A is None:
            return (x + tau * self.z) / (1.0 + tau)
        key = float(tau)
        if key not in self._chol:
            n = self._gram.shape[0]
            self._chol[key] = cho_factor(np.eye(n) + tau * self._gram)
        return cho_solve(self._chol[key], x + tau * self._Atz)


class DiagonalQuadratic(SmoothFunction):
    """0.5 * sum_i lam_i * (x_i - z_i)^2 with everything in closed form."""

    has_prox = True

    def __init__(self, eigenvalues, z=None):
        self.lam = np.asarray(eigenvalues, dtype=float)
        if np.any(self.lam < 0):
            raise ParameterError("eigenvalues must be nonnegative")
        self.z = np.zeros_like(self.lam) if z is None else np.asarray(z, dtype=float)
        self.grad_lipschitz = float(self.lam.max()) if self.lam.size else 0.0
        self.strong_convexity = float(self.lam.min()) if self.lam.size else 0.0

    def value(self, x):
        d = x - self.z
        return 0.5 * float((self.lam * d) @ d)

    def gradient(self, x):
        return self.lam * (x - self.z)

    def prox(self, x, tau):
        return (x + tau * self.lam * self.z) / (1.0 + tau * self.lam)


class Composite(SmoothFunction):
    """h o L: value and gradient only; prox needs structure on L."""

    def __init__(self, h, L: LinearMap):
        self.h = h
        self.L = L
        self.grad_lipschitz = h.grad_lipschitz * L.operator_norm_sq
        self.strong_convexity = 0.0

    def value(self, x):
        return self.h.value(self.L(x))

    def gradient(self, x):
        return self.L.adjoint(self.h.gradient(self.L(x)))


class SemiOrthogonalComposite(Composite):
    """h o L with L L^T = c Id, so the prox is exact.

    The scale c is measured and verified at construction; empty maps (zero
    rows) degenerate to the zero function.
    """

    has_prox = True

    def __init__(self, h, L: LinearMap):
        super().__init__(h, L)
        self.scale = semiorthogonal_scale(L)

    def value(self, x):
        if self.L.out_dim == 0:
            return 0.0
        return super().value(x)

    def gradient(self, x):
        if self.L.out_dim == 0:
            return np.zeros_like(np.asarray(x, dtype=float))
        return super().gradient(x)

    def prox(self, x, tau):
        if self.L.out_dim == 0:
            return np.asarray(x, dtype=float)
        return semiorthogonal_prox(self.h, self.L, x, tau, c=self.scale)


class OrthonormalComposite(Composite):
    """h o W for orthonormal W: prox(x) = W^T prox_h(W x)."""

    has_prox = True

    def __init__(self, h, W: LinearMap):
        check_orthonormal(W)
        super().__init__(h, W)
        self.strong_convexity = h.strong_convexity

    def prox(self, x, tau):
        return orthonormal_prox(self.h, self.L, x, tau)


class QuadraticPlusProxable(SmoothFunction):
    """||. - z||^2 / 2 + g, with the prox folded through the quadratic part."""

    def __init__(self, z, g: SmoothFunction):
        self.z = np.asarray(z, dtype=float)
        self.g = g
        self.has_prox = g.has_prox
        self.grad_lipschitz = 1.0 + g.grad_lipschitz
        self.strong_convexity = 1.0 + g.strong_convexity

    def value(self, x):
        r = x - self.z
        return 0.5 * float(r @ r) + self.g.value(x)

    def gradient(self, x):
        return (x - self.z) + self.g.gradient(x)

    def prox(self, x, tau):
        return scaled_shifted_prox(self.z, self.g, x, tau)
