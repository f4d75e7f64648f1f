r"""Asymptotic initial data (e, k): built-in families, constraints and DEC.

An initial data set is described relative to the hyperbolic background by
the perturbation e = g - b and the extrinsic curvature k, both given in
chart components.  Families either supply derivatives analytically or fall
back to finite differences (4th-order central for first derivatives,
2nd-order for second derivatives).

The constraint deficit is the difference of the constraints map between
(g, k) and the exact background (b, 0),

    scalar part: Scal^g + (tr_g k)^2 - |k|^2_g + n(n-1),
    vector part: 2 (delta_g k + d tr_g k),

computed with the operators of g throughout; the background only enters via
the constant n(n-1) = -Scal^b.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    ChartPoint,
    christoffels_from_metric,
    metric_second_derivatives,
    _omega,
)

__all__ = [
    "BoundaryData",
    "ConstraintDeficit",
    "DecayViolationError",
    "InitialData",
    "UnknownFamilyError",
    "boundary_k_vector",
    "builtin_family",
    "constraint_deficit",
    "dec_check",
    "integrability_probe",
    "load_grid_file",
    "save_grid_file",
    "validate_decay",
]

FD_STEP = 1e-4


class UnknownFamilyError(ValueError):
    pass


class DecayViolationError(ValueError):
    pass


# -- finite differences ------------------------------------------------------

def _fd_partials(fun, coords, h=FD_STEP):
    """4th-order central first partials of an array-valued function."""
    coords = np.asarray(coords, dtype=float)
    out = None
    for m in range(len(coords)):
        vals = []
        for step in (-2, -1, 1, 2):
            c = coords.copy()
            c[m] += step * h
            vals.append(np.asarray(fun(c), dtype=float))
        d = (vals[0] - 8.0 * vals[1] + 8.0 * vals[2] - vals[3]) / (12.0 * h)
        if out is None:
            out = np.zeros((len(coords),) + d.shape)
        out[m] = d
    return out

def _fd_second_partials(fun, coords, h=FD_STEP):
    """2nd-order central second partials (including cross terms)."""
    coords = np.asarray(coords, dtype=float)
    f0 = np.asarray(fun(coords), dtype=float)
    m = len(coords)
    out = np.zeros((m, m) + f0.shape)

    def at(*offsets):
        c = coords.copy()
        for idx, step in offsets:
            c[idx] += step * h
        return np.asarray(fun(c), dtype=float)

    for a in range(m):
        out[a, a] = (at((a, 1)) - 2.0 * f0 + at((a, -1))) / (h * h)
        for b in range(a + 1, m):
            cross = (
                at((a, 1), (b, 1))
                - at((a, 1), (b, -1))
                - at((a, -1), (b, 1))
                + at((a, -1), (b, -1))
            ) / (4.0 * h * h)
            out[a, b] = cross
            out[b, a] = cross
    return out


# -- data container ----------------------------------------------------------

@dataclass
class InitialData:
    """Perturbation/extrinsic-curvature provider with decay metadata.

    ``provider`` implements e(coords) and k(coords) returning symmetric
    n x n arrays from flat chart coordinates, and may implement de, dde and
    dk for analytic derivatives (leading axes are the differentiation
    indices).  ``derivative_mode`` is "analytic" or "fd".
    """

    provider: object
    tau: float
    n: int = 3
    derivative_mode: str = "analytic"
    fd_step: float = FD_STEP
    name: str = "custom"

    def __post_init__(self):
        if self.derivative_mode not in ("analytic", "fd"):
            raise ValueError("derivative_mode must be 'analytic' or 'fd'")
        if self.derivative_mode == "analytic":
            for attr in ("de", "dde", "dk"):
                if not hasattr(self.provider, attr):
                    raise ValueError(
                        f"analytic mode requires provider.{attr}"
                    )

    def e(self, p: ChartPoint):
        return np.asarray(self.provider.e(p.coords), dtype=float)

    def k(self, p: ChartPoint):
        return np.asarray(self.provider.k(p.coords), dtype=float)

    def de(self, p: ChartPoint):
        """First partials de[m, i, j] = d(e_ij)/dx_m."""
        if self.derivative_mode == "analytic":
            return np.asarray(self.provider.de(p.coords), dtype=float)
        return _fd_partials(self.provider.e, p.coords, self.fd_step)

    def dde(self, p: ChartPoint):
        """Second partials dde[m, l, i, j]."""
        if self.derivative_mode == "analytic":
            return np.asarray(self.provider.dde(p.coords), dtype=float)
        return _fd_second_partials(self.provider.e, p.coords, self.fd_step)

    def dk(self, p: ChartPoint):
        if self.derivative_mode == "analytic":
            return np.asarray(self.provider.dk(p.coords), dtype=float)
        return _fd_partials(self.provider.k, p.coords, self.fd_step)

    def with_mode(self, mode, fd_step=None):
        return InitialData(
            provider=self.provider,
            tau=self.tau,
            n=self.n,
            derivative_mode=mode,
            fd_step=fd_step or self.fd_step,
            name=self.name,
        )

    def metric(self, p: ChartPoint):
        """g = b + e at p (must be positive definite)."""
        b, _, _ = metric_second_derivatives(p)
        g = b + self.e(p)
        if np.linalg.eigvalsh(g)[0] <= 0:
            raise ValueError(f"g = b + e not positive definite at {p}")
        return g


# -- built-in families -------------------------------------------------------

class _ZeroProvider:
    def __init__(self, n):
        self.n = n

    def e(self, coords):
        return np.zeros((self.n, self.n))

    k = e

    def de(self, coords):
        return np.zeros((self.n, self.n, self.n))

    dk = de

    def dde(self, coords):
        return np.zeros((self.n, self.n, self.n, self.n))


class _SchwarzschildAdSProvider:
    """Time-symmetric slice of Schwarzschild-AdS re-expressed over b.

    With s = sinh r the slice metric is
    (1 + s^2 - 2m/s^{n-2})^{-1} ds^2 + s^2 dOmega^2, so the perturbation has
    a single component e_rr(r), given in closed form with its first two
    derivatives.
    """

    def __init__(self, mass, n):
        self.mass = mass
        self.n = n

    def _radial(self, r):
        """(e_rr, e_rr', e_rr'')."""
        m, n = self.mass, self.n
        sh, ch = np.sinh(r), np.cosh(r)
        u = 2.0 * m / sh ** (n - 2)
        up = -(n - 2) * u * ch / sh
        upp = (n - 2) * u * ((n - 1) * ch * ch / (sh * sh) - 1.0)
        D = ch * ch - u
        if D <= 0:
            raise ValueError(f"radius r = {r} is inside the horizon")
        Dp = 2.0 * sh * ch - up
        Dpp = 2.0 * (ch * ch + sh * sh) - upp
        e = u / D
        ep = (up * D - u * Dp) / D ** 2
        epp = (upp * D - u * Dpp) / D ** 2 - 2.0 * Dp * (up * D - u * Dp) / D ** 3
        return e, ep, epp

    def e(self, coords):
        out = np.zeros((self.n, self.n))
        out[0, 0] = self._radial(coords[0])[0]
        return out

    def k(self, coords):
        return np.zeros((self.n, self.n))

    def de(self, coords):
        out = np.zeros((self.n, self.n, self.n))
        out[0, 0, 0] = self._radial(coords[0])[1]
        return out

    def dde(self, coords):
        out = np.zeros((self.n, self.n, self.n, self.n))
        out[0, 0, 0, 0] = self._radial(coords[0])[2]
        return out

    def dk(self, coords):
        return np.zeros((self.n, self.n, self.n))


class _GaussianGaugeProvider:
    """Pure-gauge perturbation e = L_X b for a radial bump field (n = 3).

    X = amplitude * exp(-tau r) * G(angles) d/dr with the angular bump
    G = exp(kappa (nhat . omega - 1)).  The linearised constraint deficit of
    a Lie-derivative perturbation vanishes identically, so the deficit of
    this family is quadratic in the amplitude and decays like exp(-2 tau r).
    k = 0; derivatives are taken by finite differences.
    """

    def __init__(self, amplitude, tau, center, kappa=2.0):
        self.amplitude = amplitude
        self.tau = tau
        self.center = center  # (theta_c, phi_c)
        self.kappa = kappa
        tc, pc = center
        self.nhat = np.array(
            [np.cos(tc), np.sin(tc) * np.cos(pc), np.sin(tc) * np.sin(pc)]
        )

    def _bump(self, angles):
        omega, domega, _ = _omega(angles, 3)
        G = np.exp(self.kappa * (self.nhat @ omega - 1.0))
        dG = G * self.kappa * (domega @ self.nhat)
        return G, dG

    def e(self, coords):
        r, angles = coords[0], coords[1:]
        sh, ch = np.sinh(r), np.cosh(r)
        f = np.exp(-self.tau * r)
        fp = -self.tau * f
        G, dG = self._bump(angles)
        A = self.amplitude
        out = np.zeros((3, 3))
        out[0, 0] = 2.0 * A * fp * G
        out[0, 1] = out[1, 0] = A * f * dG[0]
        out[0, 2] = out[2, 0] = A * f * dG[1]
        out[1, 1] = 2.0 * sh * ch * A * f * G
        out[2, 2] = 2.0 * sh * ch * np.sin(angles[0]) ** 2 * A * f * G
        return out

    def k(self, coords):
        return np.zeros((3, 3))


_TRI_INDICES = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]


class _GridProvider:
    """Cubic interpolation of gridded (e, k) samples (n = 3)."""

    def __init__(self, r_values, theta_values, phi_values, e_samples, k_samples):
        from scipy.interpolate import RegularGridInterpolator

        pts = (np.asarray(r_values), np.asarray(theta_values), np.asarray(phi_values))
        method = "cubic" if all(len(ax) >= 4 for ax in pts) else "linear"
        self._e_interp = [
            RegularGridInterpolator(pts, e_samples[..., t], method=method)
            for t in range(6)
        ]
        self._k_interp = [
            RegularGridInterpolator(pts, k_samples[..., t], method=method)
            for t in range(6)
        ]

    @staticmethod
    def _unpack(vals):
        out = np.zeros((3, 3))
        for t, (i, j) in enumerate(_TRI_INDICES):
            out[i, j] = out[j, i] = vals[t]
        return out

    def e(self, coords):
        return self._unpack([f(coords)[0] for f in self._e_interp])

    def k(self, coords):
        return self._unpack([f(coords)[0] for f in self._k_interp])


def builtin_family(name, params=None, n=3):
    """Construct one of the named initial-data families."""
    params = dict(params or {})
    if name == "exact_hyperbolic":
        return InitialData(_ZeroProvider(n), tau=float("inf"), n=n, name=name)
    if name == "schwarzschild_ads":
        m = float(params.pop("m", params.pop("mass", 1.0)))
        if m < 0:
            raise ValueError("schwarzschild_ads requires m >= 0")
        if params:
            raise ValueError(f"unknown parameters {sorted(params)}")
        if m == 0.0:
            return InitialData(_ZeroProvider(n), tau=float(n), n=n, name=name)
        return InitialData(
            _SchwarzschildAdSProvider(m, n), tau=float(n), n=n, name=name
        )
    if name == "gaussian_perturbation":
        if n != 3:
            raise ValueError("gaussian_perturbation is implemented for n = 3")
        amplitude = float(params.pop("amplitude", 1e-3))
        tau = float(params.pop("tau", 2.0))
        center = params.pop("center", (np.pi / 2, 0.0))
        kappa = float(params.pop("kappa", 2.0))
        if params:
            raise ValueError(f"unknown parameters {sorted(params)}")
        if tau <= n / 2:
            raise DecayViolationError(
                f"declared tau = {tau} does not exceed n/2 = {n / 2}"
            )
        provider = _GaussianGaugeProvider(amplitude, tau, tuple(center), kappa)
        return InitialData(provider, tau=tau, n=n, derivative_mode="fd", name=name)
    if name == "grid":
        path = params.pop("path", None)
        if path is None:
            raise ValueError("grid family requires a 'path' parameter")
        if params:
            raise ValueError(f"unknown parameters {sorted(params)}")
        return load_grid_file(path)
    raise UnknownFamilyError(f"unknown family '{name}'")


# -- grid file format --------------------------------------------------------

def save_grid_file(path, tau, r_values, theta_values, phi_values, e_samples, k_samples):
    """Write gridded data as JSON.

    e_samples and k_samples have shape (nr, ntheta, nphi, 6) with the last
    axis holding the i <= j components in row-major order.
    """
    payload = {
        "n": 3,
        "tau": float(tau),
        "r_values": [float(v) for v in r_values],
        "theta_values": [float(v) for v in theta_values],
        "phi_values": [float(v) for v in phi_values],
        "e": np.asarray(e_samples, dtype=np.float64).tolist(),
        "k": np.asarray(k_samples, dtype=np.float64).tolist(),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)


def load_grid_file(path):
    with open(path) as fh:
        payload = json.load(fh)
    if payload["n"] != 3:
        raise ValueError("grid files are supported for n = 3 only")
    e = np.asarray(payload["e"], dtype=np.float64)
    k = np.asarray(payload["k"], dtype=np.float64)
    provider = _GridProvider(
        payload["r_values"], payload["theta_values"], payload["phi_values"], e, k
    )
    return InitialData(
        provider, tau=float(payload["tau"]), n=3, derivative_mode="fd", name="grid"
    )


# -- constraints -------------------------------------------------------------

@dataclass(frozen=True)
class ConstraintDeficit:
    """Phi(g, k) - Phi(b, 0) at a point."""

    scalar_part: float
    vector_part: np.ndarray
    point: ChartPoint


def scalar_curvature(g, dg, ddg):
    """Scal of a metric from components and first/second partials."""
    ginv = np.linalg.inv(g)
    low = 0.5 * (np.einsum("ijk->kij", dg) + np.einsum("jik->kij", dg) - dg)
    gamma = np.einsum("kl,lij->kij", ginv, low)
    # d(ginv)[m] = -ginv dg[m] ginv
    dginv = -np.einsum("ka,mab,bl->mkl", ginv, dg, ginv)
    dlow = 0.5 * (
        np.einsum("mijk->mkij", ddg) + np.einsum("mjik->mkij", ddg) - ddg
    )
    dgamma = np.einsum("mkl,lij->mkij", dginv, low) + np.einsum(
        "kl,mlij->mkij", ginv, dlow
    )
    ricci = np.einsum("kkij->ij", dgamma) - np.einsum("ikkj->ij", dgamma)
    ricci += np.einsum("kkl,lij->ij", gamma, gamma) - np.einsum(
        "kil,lkj->ij", gamma, gamma
    )
    return float(np.einsum("ij,ij", ginv, ricci)), gamma, ginv


def constraint_deficit(data: InitialData, p: ChartPoint) -> ConstraintDeficit:
    """Deficit of the constraints map relative to the background."""
    n = data.n
    b, db, ddb = metric_second_derivatives(p)
    g = b + data.e(p)
    dg = db + data.de(p)
    ddg = ddb + data.dde(p)
    scal, gamma, ginv = scalar_curvature(g, dg, ddg)
    k = data.k(p)
    dk = data.dk(p)
    trk = float(np.einsum("ij,ij", ginv, k))
    ksq = float(np.einsum("ia,jb,ij,ab", ginv, ginv, k, k))
    scalar = scal + trk * trk - ksq + n * (n - 1)
    # covariant derivative of k in the g-connection
    covdk = (
        dk
        - np.einsum("lmi,lj->mij", gamma, k)
        - np.einsum("lmj,il->mij", gamma, k)
    )
    div_k = np.einsum("mi,mij->j", ginv, covdk)
    dginv = -np.einsum("ka,mab,bl->mkl", ginv, dg, ginv)
    dtrk = np.einsum("mij,ij->m", dginv, k) + np.einsum("ij,mij->m", ginv, dk)
    vector = 2.0 * (-div_k + dtrk)
    return ConstraintDeficit(scalar, vector, p)


def dec_check(deficit: ConstraintDeficit, g, tol=1e-9):
    """Dominant-energy verdict for a constraint deficit.

    The deficit is causal and positively oriented iff the scalar part
    dominates the g-length of the vector part.  Returns 'satisfied',
    'marginal' (within tol of equality) or 'violated'; a vanishing deficit
    is the null case and counts as satisfied.
    """
    ginv = np.linalg.inv(np.asarray(g, dtype=float))
    vnorm = float(np.sqrt(deficit.vector_part @ ginv @ deficit.vector_part))
    s = deficit.scalar_part
    if abs(s) <= tol and vnorm <= tol:
        return "satisfied"
    if s >= vnorm + tol:
        return "satisfied"
    if s >= vnorm - tol:
        return "marginal"
    return "violated"


# -- boundary vector ---------------------------------------------------------

@dataclass(frozen=True)
class BoundaryData:
    """Boundary quantities along an inner boundary: tr k-breve and k(nu)."""

    tr_breve_k: float
    k_nu: np.ndarray
    n: int = 3


def boundary_k_vector(bd: BoundaryData, g, tol=1e-12):
    """Causality vector (-tr k-breve + (n-1)) e0 + k(nu) and its verdict."""
    time = -bd.tr_breve_k + (bd.n - 1)
    k_nu = np.asarray(bd.k_nu, dtype=float)
    ginv = np.linalg.inv(np.asarray(g, dtype=float))
    space_norm = float(np.sqrt(k_nu @ ginv @ k_nu))
    verdict = "satisfied" if time >= space_norm - tol else "violated"
    return (time, k_nu), verdict


# -- decay and integrability diagnostics -------------------------------------

def _tensor_bnorm(binv, T):
    """Frame norm of a tensor with all-lower chart indices."""
    T = np.asarray(T)
    idx = T.ndim
    letters = "abcdefgh"[:idx]
    pairs = "".join(letters)
    raised = T.copy()
    for ax in range(idx):
        raised = np.tensordot(binv, raised, axes=(1, ax))
        raised = np.moveaxis(raised, 0, ax)
    return float(np.sqrt(abs(np.einsum(f"{pairs},{pairs}", raised, T))))


def _sphere_samples(r, n, count, rng):
    pts = []
    for _ in range(count):
        polars = rng.uniform(0.2, np.pi - 0.2, size=n - 2)
        phi = rng.uniform(0.0, 2.0 * np.pi)
        pts.append(ChartPoint(r, tuple(polars) + (phi,), n=n))
    return pts


def validate_decay(data: InitialData, radii=None, samples=8, seed=7):
    """Sampled decay check of |e|, |de|, |dde|, |k|, |dk| against exp(-tau r).

    Returns a report dict with the fitted decay rate of the dominant field
    norm and an acceptance flag: tau must exceed n/2 and the fitted rate
    must match the declared tau within 10% (identically-zero data passes
    trivially).
    """
    n = data.n
    radii = np.asarray(radii if radii is not None else np.linspace(3.0, 7.0, 9))
    rng = np.random.default_rng(seed)
    sup = []
    for r in radii:
        worst = 0.0
        for p in _sphere_samples(r, n, samples, rng):
            binv = np.linalg.inv(metric_second_derivatives(p)[0])
            vals = [
                _tensor_bnorm(binv, data.e(p)),
                _tensor_bnorm(binv, data.de(p)),
                _tensor_bnorm(binv, data.dde(p)),
                _tensor_bnorm(binv, data.k(p)),
                _tensor_bnorm(binv, data.dk(p)),
            ]
            worst = max(worst, max(vals))
        sup.append(worst)
    sup = np.asarray(sup)
    if np.max(sup) == 0.0:
        return {"radii": radii, "sup": sup, "rate": -np.inf, "accepted": True}
    mask = sup > 0
    slope, _ = np.polyfit(radii[mask], np.log(sup[mask]), 1)
    rate = -slope
    accepted = data.tau > n / 2 and abs(rate - data.tau) <= 0.1 * data.tau
    return {"radii": radii, "sup": sup, "rate": rate, "accepted": accepted}


def integrability_probe(
    data: InitialData, radii, couple=None, samples=12, seed=11, deficit_tol=1e-12
):
    """Probe of the convenient integrability condition.

    Reports, per radius, the sphere max of |deficit| e^r sinh^{n-1} r (or of
    the couple pairing when a (f, alpha) couple is supplied) and a fitted
    exponential rate; non-integrability is flagged when the fitted rate is
    >= 0.  Deficit magnitudes below deficit_tol are treated as zero so the
    exponential weight does not amplify curvature-assembly roundoff.
    """
    radii = np.asarray(radii, dtype=float)
    if np.any(np.diff(radii) <= 0):
        raise ValueError("radii must be strictly increasing")
    n = data.n
    rng = np.random.default_rng(seed)
    probes = []
    for r in radii:
        worst = 0.0
        for p in _sphere_samples(r, n, samples, rng):
            d = constraint_deficit(data, p)
            g = data.metric(p)
            ginv = np.linalg.inv(g)
            if couple is None:
                mag = np.sqrt(
                    d.scalar_part ** 2 + d.vector_part @ ginv @ d.vector_part
                )
            else:
                f, _, alpha = couple.at_point(p)
                mag = abs(f * d.scalar_part + alpha @ ginv @ d.vector_part)
            if mag < deficit_tol:
                mag = 0.0
            worst = max(worst, float(mag) * np.exp(r) * np.sinh(r) ** (n - 1))
        probes.append(worst)
    probes = np.asarray(probes)
    if np.max(probes) == 0.0:
        return {"radii": radii, "probes": probes, "rate": -np.inf, "integrable": True}
    slope, _ = np.polyfit(radii, np.log(np.maximum(probes, 1e-300)), 1)
    return {
        "radii": radii,
        "probes": probes,
        "rate": float(slope),
        "integrable": bool(slope < 0),
    }
