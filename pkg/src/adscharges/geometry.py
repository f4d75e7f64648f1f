r"""Exact background geometry of hyperbolic space in the polar chart.

The model is (H^n, b) with b = dr^2 + sinh^2(r) g_{S^{n-1}}, realised in
coordinates (r, theta_1, ..., theta_{n-2}, phi).  Points embed into the
upper unit hyperboloid of Minkowski R^{n,1},

    y(p) = (cosh r, sinh r * omega(angles)),

with the hyperspherical convention

    omega_1 = cos(theta_1),
    omega_i = sin(theta_1)...sin(theta_{i-1}) cos(theta_i),
    omega_n = sin(theta_1)...sin(theta_{n-1}),

where theta_{n-1} is the azimuth phi.  The first spatial axis is the polar
axis, so for n = 3 the embedding maps onto the Hermitian-matrix picture of
the spin module with the diagonal direction along theta = 0.

Everything in this module is closed form; finite differences appear only in
the test suite as oracles.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ChartPoint",
    "CoordinateSingularityError",
    "FrameData",
    "MassFunction",
    "SoN1Generator",
    "chart_to_hermitian",
    "embed",
    "embed_jacobian",
    "frame_at",
    "killing_field",
    "mass_function_eval",
    "minkowski_eta",
    "random_chart_point",
]

GUARD_BAND = 1e-8


class CoordinateSingularityError(ValueError):
    """Raised when a point sits inside the polar-chart guard band."""


class InvalidGeneratorError(ValueError):
    """Raised when a matrix fails the so(n,1) antisymmetry invariant."""


def minkowski_eta(n):
    """Minkowski form diag(-1, 1, ..., 1) on R^{n,1}."""
    eta = np.eye(n + 1)
    eta[0, 0] = -1.0
    return eta


@dataclass(frozen=True)
class ChartPoint:
    """A point of H^n in the polar chart.

    ``angles`` holds the n-2 polar angles followed by the azimuth.  The
    guard band keeps evaluations away from the coordinate singularities at
    r = 0 and theta_j in {0, pi}.
    """

    r: float
    angles: tuple
    n: int = 3

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("dimension must be >= 3")
        if len(self.angles) != self.n - 1:
            raise ValueError(
                f"expected {self.n - 1} angular coordinates, got {len(self.angles)}"
            )
        if not np.isfinite(self.r) or self.r <= 0:
            raise ValueError("radial coordinate must be positive and finite")
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))

    @property
    def coords(self):
        """Chart coordinates as a flat array (r, theta..., phi)."""
        return np.array((self.r,) + self.angles)

    def check_guard_band(self, guard=GUARD_BAND):
        if self.r < guard:
            raise CoordinateSingularityError(f"r = {self.r} inside guard band")
        for j, a in enumerate(self.angles[:-1]):
            if min(a, np.pi - a) < guard:
                raise CoordinateSingularityError(
                    f"polar angle {j} = {a} inside guard band"
                )


def random_chart_point(rng, n=3, r_range=(0.5, 6.0)):
    """Uniform-in-coordinates random point, clear of the guard bands."""
    r = rng.uniform(*r_range)
    polars = rng.uniform(0.05, np.pi - 0.05, size=n - 2)
    phi = rng.uniform(0.0, 2.0 * np.pi)
    return ChartPoint(r, tuple(polars) + (phi,), n=n)


# -- hyperboloid embedding ---------------------------------------------------

def _omega(angles, n):
    """Unit vector omega in R^n with value, gradient and Hessian in angles.

    Returns (omega, domega, ddomega) of shapes (n,), (n-1, n), (n-1, n-1, n).
    Each component is a product of sines and cosines of single angles, so
    the derivatives follow from the product rule on the factor list.
    """
    m = n - 1
    omega = np.zeros(n)
    domega = np.zeros((m, n))
    ddomega = np.zeros((m, m, n))
    for i in range(n):
        # factors of omega_{i+1}: sin(a_0..a_{i-1}) then cos(a_i) unless last
        funcs = [(j, np.sin, np.cos, lambda a, j=j: -np.sin(a)) for j in range(min(i, m))]
        if i < m:
            funcs.append((i, np.cos, lambda a: -np.sin(a), lambda a: -np.cos(a)))
        vals = [f(angles[j]) for j, f, _, _ in funcs]
        prod = float(np.prod(vals)) if vals else 1.0
        omega[i] = prod
        for a_idx in range(len(funcs)):
            j, f, fp, fpp = funcs[a_idx]
            rest = prod / vals[a_idx] if vals[a_idx] != 0 else float(
                np.prod([v for t, v in enumerate(vals) if t != a_idx])
            )
            domega[j, i] = fp(angles[j]) * rest
            ddomega[j, j, i] = fpp(angles[j]) * rest
            for b_idx in range(a_idx + 1, len(funcs)):
                l, g, gp, _ = funcs[b_idx]
                rest2 = rest / vals[b_idx] if vals[b_idx] != 0 else float(
                    np.prod([v for t, v in enumerate(vals) if t not in (a_idx, b_idx)])
                )
                cross = fp(angles[j]) * gp(angles[l]) * rest2
                ddomega[j, l, i] = cross
                ddomega[l, j, i] = cross
    return omega, domega, ddomega


def embed(p: ChartPoint):
    """Hyperboloid embedding y(p) = (cosh r, sinh r * omega) in R^{n,1}."""
    omega, _, _ = _omega(p.angles, p.n)
    return np.concatenate(([np.cosh(p.r)], np.sinh(p.r) * omega))


def embed_jacobian(p: ChartPoint):
    """Partial derivatives of the embedding: array of shape (n, n+1).

    Row 0 differentiates in r, row 1+j in the j-th angle.
    """
    omega, domega, _ = _omega(p.angles, p.n)
    J = np.zeros((p.n, p.n + 1))
    J[0, 0] = np.sinh(p.r)
    J[0, 1:] = np.cosh(p.r) * omega
    J[1:, 1:] = np.sinh(p.r) * domega
    return J


# -- metric data -------------------------------------------------------------

def _metric_diag(p: ChartPoint):
    """Diagonal entries of b together with first and second partials.

    Entry 0 is b_rr = 1; entry a >= 1 is sinh^2(r) * prod_{j<a} sin^2(theta_j).
    Returns (diag, grad, hess) with shapes (n,), (n, n), (n, n, n); grad[i, m]
    is d(b_ii)/dx_m.
    """
    n = p.n
    diag = np.zeros(n)
    grad = np.zeros((n, n))
    hess = np.zeros((n, n, n))
    diag[0] = 1.0
    sh, ch = np.sinh(p.r), np.cosh(p.r)
    for a in range(1, n):
        # squared factors: sinh(r) and sin(theta_j) for j < a-1
        facs = [(0, sh, ch, sh)]
        for j in range(a - 1):
            s, c = np.sin(p.angles[j]), np.cos(p.angles[j])
            facs.append((1 + j, s, c, -s))
        val = float(np.prod([f[1] ** 2 for f in facs]))
        diag[a] = val
        for t, (m, f, fp, fpp) in enumerate(facs):
            grad[a, m] = val * 2.0 * fp / f
            hess[a, m, m] = val * 2.0 * (fp * fp + f * fpp) / (f * f)
            for t2 in range(t + 1, len(facs)):
                m2, g, gp, _ = facs[t2]
                cross = val * 4.0 * fp * gp / (f * g)
                hess[a, m, m2] = cross
                hess[a, m2, m] = cross
    return diag, grad, hess


def metric_second_derivatives(p: ChartPoint):
    """(b, db, ddb) as dense arrays; db[m, i, j] = d(b_ij)/dx_m."""
    n = p.n
    diag, grad, hess = _metric_diag(p)
    b = np.diag(diag)
    db = np.zeros((n, n, n))
    ddb = np.zeros((n, n, n, n))
    for i in range(n):
        db[:, i, i] = grad[i]
        ddb[:, :, i, i] = hess[i]
    return b, db, ddb


@dataclass(frozen=True)
class FrameData:
    """Chart components of b at a point, with the derived quantities the
    charge integrand consumes."""

    point: ChartPoint
    metric: np.ndarray
    inverse_metric: np.ndarray
    christoffels: np.ndarray  # christoffels[k, i, j] = Gamma^k_{ij}
    area_density: float


def christoffels_from_metric(g, dg):
    """Gamma^k_{ij} from metric components and partials dg[m, i, j]."""
    ginv = np.linalg.inv(g)
    # Gamma_{kij} = (dg[i, j, k] + dg[j, i, k] - dg[k, i, j]) / 2
    low = 0.5 * (
        np.einsum("ijk->kij", dg) + np.einsum("jik->kij", dg) - dg
    )
    return np.einsum("kl,lij->kij", ginv, low)


def frame_at(p: ChartPoint, guard=GUARD_BAND) -> FrameData:
    """Metric, inverse, Christoffel symbols and area density of b at p."""
    p.check_guard_band(guard)
    n = p.n
    diag, grad, _ = _metric_diag(p)
    b = np.diag(diag)
    binv = np.diag(1.0 / diag)
    dg = np.zeros((n, n, n))
    for i in range(n):
        dg[:, i, i] = grad[i]
    gamma = christoffels_from_metric(b, dg)
    # coordinate density: sinh^{n-1} r * prod sin^{n-1-j}(theta_j)
    dens = np.sinh(p.r) ** (n - 1)
    for j, a in enumerate(p.angles[:-1]):
        dens *= np.sin(a) ** (n - 2 - j)
    return FrameData(p, b, binv, gamma, float(dens))


# -- the mass functions x_k --------------------------------------------------

@dataclass(frozen=True)
class MassFunction:
    """Restriction x_k of the k-th Minkowski coordinate to the hyperboloid.

    These span the solution space of Hess f = f b.
    """

    k: int
    n: int = 3

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise ValueError(f"index {self.k} outside 0..{self.n}")


def mass_function_eval(k, p: ChartPoint):
    """Value, coordinate gradient and b-covariant Hessian of x_k at p.

    The Hessian satisfies Hess x_k = x_k * b identically; it is assembled
    from the closed-form second partials so that tests can compare against
    both the identity and finite differences.
    """
    if isinstance(k, MassFunction):
        k = k.k
    n = p.n
    if not 0 <= k <= n:
        raise ValueError(f"index {k} outside 0..{n}")
    sh, ch = np.sinh(p.r), np.cosh(p.r)
    if k == 0:
        value = ch
        grad = np.zeros(n)
        grad[0] = sh
        dd = np.zeros((n, n))
        dd[0, 0] = ch
    else:
        omega, domega, ddomega = _omega(p.angles, n)
        w, dw, ddw = omega[k - 1], domega[:, k - 1], ddomega[:, :, k - 1]
        value = sh * w
        grad = np.zeros(n)
        grad[0] = ch * w
        grad[1:] = sh * dw
        dd = np.zeros((n, n))
        dd[0, 0] = sh * w
        dd[0, 1:] = ch * dw
        dd[1:, 0] = ch * dw
        dd[1:, 1:] = sh * ddw
    frame = frame_at(p)
    hess = dd - np.einsum("kij,k->ij", frame.christoffels, grad)
    return value, grad, hess


# -- Killing fields ----------------------------------------------------------

@dataclass(frozen=True)
class SoN1Generator:
    """A generator of so(n,1): A^T eta + eta A = 0 with eta = diag(-1,1,..,1)."""

    matrix: np.ndarray
    n: int = 3
    tol: float = 1e-10

    def __post_init__(self):
        A = np.asarray(self.matrix, dtype=float)
        if A.shape != (self.n + 1, self.n + 1):
            raise InvalidGeneratorError(f"expected shape {(self.n + 1,) * 2}")
        eta = minkowski_eta(self.n)
        if np.max(np.abs(A.T @ eta + eta @ A)) > self.tol:
            raise InvalidGeneratorError("matrix is not eta-antisymmetric")
        object.__setattr__(self, "matrix", A)

    @staticmethod
    def boost(i, n=3):
        """Boost generator in the (y_0, y_i) plane, 1 <= i <= n."""
        A = np.zeros((n + 1, n + 1))
        A[0, i] = A[i, 0] = 1.0
        return SoN1Generator(A, n=n)

    @staticmethod
    def rotation(i, j, n=3):
        """Rotation generator in the (y_i, y_j) plane, 1 <= i < j <= n."""
        A = np.zeros((n + 1, n + 1))
        A[i, j] = -1.0
        A[j, i] = 1.0
        return SoN1Generator(A, n=n)

    @staticmethod
    def basis(n=3):
        """Boosts A_{01}..A_{0n} first, then rotations A_{ij}, i < j."""
        gens = [SoN1Generator.boost(i, n=n) for i in range(1, n + 1)]
        gens += [
            SoN1Generator.rotation(i, j, n=n)
            for i in range(1, n + 1)
            for j in range(i + 1, n + 1)
        ]
        return gens

    def commutator(self, other):
        A, B = self.matrix, other.matrix
        return SoN1Generator(A @ B - B @ A, n=self.n)


def killing_field(gen: SoN1Generator, p: ChartPoint):
    """Chart components and dual 1-form of the Killing field y -> A y.

    A y is automatically tangent to the hyperboloid; its chart components
    follow from v^i = b^{ij} eta(d_j y, A y).
    """
    if not isinstance(gen, SoN1Generator):
        gen = SoN1Generator(np.asarray(gen, dtype=float), n=p.n)
    if gen.n != p.n:
        raise InvalidGeneratorError("generator dimension does not match point")
    y = embed(p)
    J = embed_jacobian(p)
    eta = minkowski_eta(p.n)
    Ay = gen.matrix @ y
    dual = J @ (eta @ Ay)
    frame = frame_at(p)
    vector = frame.inverse_metric @ dual
    return vector, dual


def killing_dual_form(gen: SoN1Generator, p: ChartPoint):
    """Dual 1-form only; cheaper than killing_field (skips the frame)."""
    y = embed(p)
    J = embed_jacobian(p)
    eta = minkowski_eta(p.n)
    return J @ (eta @ (gen.matrix @ y))


# -- n = 3 Hermitian picture -------------------------------------------------

def chart_to_hermitian(p: ChartPoint):
    """The point as a positive-definite Hermitian matrix of determinant one.

    Composition of the hyperboloid embedding with the Minkowski-to-Hermitian
    isometry; n = 3 only.
    """
    if p.n != 3:
        raise ValueError("the Hermitian picture requires n = 3")
    from .spin import lambda_iso

    return lambda_iso(embed(p))
