r"""Global charges H(f, alpha) over geodesic spheres, with radius limits.

The integrand, with all raising/lowering and covariant derivatives taken in
the background b and contracted against the outward unit radial direction,
is

    H_j = f (e^i_{j;i} - e^i_{i;j}) - f^{;i} e_{ij} + (e^i_i) f_{;j}
          - 2 alpha^i k_{ij} + 2 (k^i_i) alpha_j,

integrated over the coordinate sphere of radius r with the b-measure
sinh^{n-1} r times the round sphere measure; the charge is the limit of
these sphere integrals.  Couples (f, alpha) are mass-function combinations,
Killing 1-forms, or imaginary-Killing-spinor fields (n = 3).

The n = 3 energy-momentum is repackaged as a Hermitian matrix
M = Lambda(mass charges) and a trace-free complex matrix Xi recovered from
the angular charges through the real pairing ell(xi) = Re tr(xi* Xi), where
ell(xi) is the charge of the Killing form generated by the so(3,1) image of
xi.  The Hermitian form Q = 2 [[adj(M), Xi], [Xi*, M]] then satisfies
Q(x, x) = H(V_x, alpha_x) for every spinor parameter x = w (+) u.
"""

from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    ChartPoint,
    SoN1Generator,
    embed,
    embed_jacobian,
    frame_at,
    minkowski_eta,
)
from .quadrature import SphereQuadrature, _pairwise_sum
from .spin import (
    SpinorData,
    adjugate,
    alpha_pairing_matrix,
    lambda_iso,
    mu_lie_algebra,
    sl2_basis,
)

__all__ = [
    "ChargeConvergenceError",
    "EnergyMomentum",
    "KillingCouple",
    "MassCouple",
    "SpinorCouple",
    "charge_integrand",
    "charge_limit",
    "charge_limits",
    "charge_on_sphere",
    "charges_on_sphere",
    "energy_momentum",
    "q_assemble_from_charges",
    "q_from_components",
    "xi_from_angular_functional",
]

DEFAULT_SCHEDULE = (4.0, 5.0, 6.0, 7.0, 8.0)
DEFAULT_TOL = 1e-6


class ChargeConvergenceError(RuntimeError):
    """A charge limit failed to converge on the given schedule."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class _NodeContext:
    """Shared per-node geometry for evaluating many couples at one point."""

    def __init__(self, p: ChartPoint):
        self.p = p
        self.y = embed(p)
        self.jac = embed_jacobian(p)  # jac[j] = d_j y
        self.eta = minkowski_eta(p.n)
        self._herm = None

    @property
    def hermitian(self):
        """(W, adj W, [Lambda(d_j y)], [adj Lambda(d_j y)]) — n = 3 only."""
        if self._herm is None:
            W = lambda_iso(self.y)
            Wj = [lambda_iso(row) for row in self.jac]
            self._herm = (W, adjugate(W), Wj, [adjugate(X) for X in Wj])
        return self._herm


class ChargeCouple:
    """A lapse-rotation couple (f, alpha) paired with the charge integrand.

    Subclasses implement evaluate(ctx) -> (f value, coordinate gradient of
    f, covector alpha) at the context point.
    """

    def evaluate(self, ctx: _NodeContext):
        raise NotImplementedError

    def at_point(self, p: ChartPoint):
        return self.evaluate(_NodeContext(p))


@dataclass(frozen=True)
class MassCouple(ChargeCouple):
    """(f, 0) with f a linear combination of the mass functions x_k."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "coeffs", np.asarray(self.coeffs, dtype=float).reshape(-1)
        )

    @classmethod
    def single(cls, k, n=3):
        c = np.zeros(n + 1)
        c[k] = 1.0
        return cls(c)

    def evaluate(self, ctx):
        n = ctx.p.n
        f = float(self.coeffs @ ctx.y)
        df = ctx.jac @ self.coeffs
        return f, df, np.zeros(n)


@dataclass(frozen=True)
class KillingCouple(ChargeCouple):
    """(0, alpha) with alpha the dual 1-form of a Killing generator."""

    generator: SoN1Generator

    def evaluate(self, ctx):
        n = ctx.p.n
        alpha = ctx.jac @ (ctx.eta @ (self.generator.matrix @ ctx.y))
        return 0.0, np.zeros(n), alpha


class SpinorCouple(ChargeCouple):
    """(V_d, alpha_d) for a spinor parameter d = w (+) u (n = 3).

    V_d(p) = 2 (w* adj(W) w + u* W u) at W = Lambda(y(p)); its gradient uses
    the linearity of Lambda.  alpha_d is exactly the Killing dual form of
    the so(3,1) generator mu_*(4 tf(w u*)), which the charge evaluation uses
    directly (the identity with the Clifford-composition definition is a
    tested property of the spin module).
    """

    def __init__(self, d: SpinorData):
        self.d = d
        xi_eff = 4.0 * alpha_pairing_matrix(d).conj().T  # = 4 tf(w u*)
        self.generator = SoN1Generator(mu_lie_algebra(xi_eff), n=3)

    def _pair(self, W, adjW):
        val = 2.0 * (
            np.vdot(self.d.w, adjW @ self.d.w) + np.vdot(self.d.u, W @ self.d.u)
        )
        return float(val.real)

    def evaluate(self, ctx):
        W, adjW, Wj, adjWj = ctx.hermitian
        f = self._pair(W, adjW)
        df = np.array([self._pair(Wj[j], adjWj[j]) for j in range(3)])
        alpha = ctx.jac @ (ctx.eta @ (self.generator.matrix @ ctx.y))
        return f, df, alpha


def _integrand_values(data, couples, p: ChartPoint):
    """Charge integrand of each couple at p, including the radial density."""
    n = data.n
    frame = frame_at(p)
    binv = frame.inverse_metric
    gamma = frame.christoffels
    e = data.e(p)
    de = data.de(p)
    k = data.k(p)
    cov = (
        de
        - np.einsum("lmi,lj->mij", gamma, e)
        - np.einsum("lmj,il->mij", gamma, e)
    )
    div = np.einsum("mi,mij->j", binv, cov)
    dtr = np.einsum("mi,jmi->j", binv, cov)
    tre = float(np.einsum("ij,ij", binv, e))
    trk = float(np.einsum("ij,ij", binv, k))
    er, kr = e[:, 0], k[:, 0]
    dens = np.sinh(p.r) ** (n - 1)
    ctx = _NodeContext(p)
    out = np.empty(len(couples))
    for idx, c in enumerate(couples):
        f, df, alpha = c.evaluate(ctx)
        val = (
            f * (div[0] - dtr[0])
            - (binv @ df) @ er
            + tre * df[0]
            - 2.0 * (binv @ alpha) @ kr
            + 2.0 * trk * alpha[0]
        )
        out[idx] = val * dens
    return out


def charge_integrand(data, couple: ChargeCouple, p: ChartPoint):
    """Integrand density (per unit round-sphere measure) at one point."""
    return float(_integrand_values(data, [couple], p)[0])


def charges_on_sphere(data, couples, r, quad: SphereQuadrature = None):
    """Quadrature of the integrand over the radius-r sphere, per couple."""
    if quad is None:
        quad = SphereQuadrature.build(n=data.n)
    node_vals = np.empty((len(quad.weights), len(couples)))
    for a, angles in enumerate(quad.nodes):
        p = ChartPoint(r, tuple(angles), n=data.n)
        node_vals[a] = _integrand_values(data, couples, p)
    return _pairwise_sum(quad.weights[:, None] * node_vals)


def charge_on_sphere(data, couple: ChargeCouple, r, quad: SphereQuadrature = None):
    return float(charges_on_sphere(data, [couple], r, quad)[0])


def _extrapolate(values, tol):
    """Richardson step on an exp(-c r) error model from the last differences.

    Returns (estimate, diagnostics).  Convergence requires the last two
    successive differences below tol; growing differences are reported as
    non-convergence.
    """
    values = np.asarray(values, dtype=float)
    diffs = np.diff(values)
    est = values[-1]
    if len(diffs) >= 2 and abs(diffs[-2]) > 0:
        q = diffs[-1] / diffs[-2]
        if 0 < abs(q) < 1:
            est = values[-1] + diffs[-1] * q / (1.0 - q)
    converged = bool(abs(diffs[-1]) < tol and abs(diffs[-2]) < tol)
    reason = None
    if not converged:
        if abs(diffs[-1]) >= abs(diffs[-2]):
            reason = "differences not decreasing"
        else:
            reason = "differences above tolerance"
    diag = {
        "values": values,
        "diffs": diffs,
        "converged": converged,
        "estimate": float(est),
        "reason": reason,
    }
    return float(est), diag


def charge_limits(data, couples, schedule=DEFAULT_SCHEDULE, tol=DEFAULT_TOL,
                  quad: SphereQuadrature = None):
    """Extrapolated charges of several couples sharing sphere evaluations."""
    schedule = [float(r) for r in schedule]
    if len(schedule) < 3 or np.any(np.diff(schedule) <= 0):
        raise ValueError("schedule must be strictly increasing, length >= 3")
    table = np.stack(
        [charges_on_sphere(data, couples, r, quad) for r in schedule]
    )
    out_vals = np.empty(len(couples))
    out_diag = []
    for i in range(len(couples)):
        est, diag = _extrapolate(table[:, i], tol)
        diag["schedule"] = schedule
        out_vals[i] = est
        out_diag.append(diag)
    return out_vals, out_diag


def charge_limit(data, couple: ChargeCouple, schedule=DEFAULT_SCHEDULE,
                 tol=DEFAULT_TOL, quad: SphereQuadrature = None):
    vals, diags = charge_limits(data, [couple], schedule, tol, quad)
    return float(vals[0]), diags[0]


def _require_convergence(diags, what):
    bad = [i for i, d in enumerate(diags) if not d["converged"]]
    if bad:
        raise ChargeConvergenceError(
            f"{what}: couples {bad} did not converge "
            f"({[diags[i]['reason'] for i in bad]})",
            diagnostics=[diags[i] for i in bad],
        )


@dataclass
class EnergyMomentum:
    """Charges against the mass functions and the Killing generator basis."""

    mass_vector: np.ndarray
    angular: np.ndarray
    n: int = 3
    diagnostics: list = field(default_factory=list)
    M: np.ndarray = None
    Xi: np.ndarray = None

    def __post_init__(self):
        if self.n == 3 and self.M is None:
            self.M = lambda_iso(self.mass_vector)

    @property
    def N(self):
        """Hermitian part of Xi."""
        return 0.5 * (self.Xi + self.Xi.conj().T)

    @property
    def R(self):
        """Anti-Hermitian part of Xi over i (Xi = N + iR, R Hermitian)."""
        return -0.5j * (self.Xi - self.Xi.conj().T)


def _generator_basis_matrix(n=3):
    """Flattened so(n,1) basis, for expanding arbitrary generators."""
    basis = SoN1Generator.basis(n)
    return basis, np.stack([g.matrix.ravel() for g in basis], axis=1)


def xi_from_angular_functional(ell):
    """Trace-free Xi with ell(xi) = Re tr(xi* Xi) for all xi in sl(2, C).

    ``ell`` is a real-linear functional given on the six basis elements
    sigma_j, i sigma_j in that order.  The components over the Pauli basis
    are z_j = (ell(sigma_j) + i ell(i sigma_j)) / 2.
    """
    sig = sl2_basis()[:3]
    z = [(ell[j] + 1j * ell[j + 3]) / 2.0 for j in range(3)]
    return sum(z[j] * sig[j] for j in range(3))


def energy_momentum(data, schedule=DEFAULT_SCHEDULE, tol=DEFAULT_TOL,
                    quad: SphereQuadrature = None) -> EnergyMomentum:
    """Mass and angular charges; for n = 3 also the (M, Xi) encoding."""
    n = data.n
    basis, basis_flat = _generator_basis_matrix(n)
    couples = [MassCouple.single(k, n) for k in range(n + 1)]
    couples += [KillingCouple(g) for g in basis]
    vals, diags = charge_limits(data, couples, schedule, tol, quad)
    _require_convergence(diags, "energy_momentum")
    mass_vector = vals[: n + 1]
    angular = vals[n + 1 :]
    em = EnergyMomentum(mass_vector, angular, n=n, diagnostics=diags)
    if n == 3:
        # expand mu_*(xi_b) over the generator basis, then pair
        ell = []
        for xi in sl2_basis():
            coeff, *_ = np.linalg.lstsq(
                basis_flat, mu_lie_algebra(xi).ravel(), rcond=None
            )
            ell.append(float(coeff @ angular))
        em.Xi = xi_from_angular_functional(ell)
    return em


def q_from_components(M, Xi, herm_tol=1e-10):
    """Q = 2 [[adj(M), Xi], [Xi*, M]]; Hermitian by construction."""
    M = np.asarray(M, dtype=complex)
    Xi = np.asarray(Xi, dtype=complex)
    if np.max(np.abs(M - M.conj().T)) > herm_tol * max(1.0, np.max(np.abs(M))):
        raise ValueError("M must be Hermitian")
    if abs(np.trace(Xi)) > herm_tol * max(1.0, np.max(np.abs(Xi))):
        raise ValueError("Xi must be trace free")
    Q = np.zeros((4, 4), dtype=complex)
    Q[:2, :2] = adjugate(M)
    Q[:2, 2:] = Xi
    Q[2:, :2] = Xi.conj().T
    Q[2:, 2:] = M
    return 2.0 * Q


_C4_BASIS = [SpinorData(w, u) for w, u in [
    ((1, 0), (0, 0)), ((0, 1), (0, 0)), ((0, 0), (1, 0)), ((0, 0), (0, 1)),
]]


def _combine(x: SpinorData, y: SpinorData, c):
    return SpinorData(x.w + c * y.w, x.u + c * y.u)


def q_assemble_from_charges(data, schedule=DEFAULT_SCHEDULE, tol=DEFAULT_TOL,
                            quad: SphereQuadrature = None,
                            herm_tol=1e-8):
    """Q by Hermitian polarization of q(x) = H(V_x, alpha_x) (n = 3).

    Sixteen charge limits: the four basis values q(e_i) plus q(e_i + e_j)
    and q(e_i + i e_j) for i < j; then
    Re Q_ij = (q(x + y) - q(x) - q(y)) / 2 and
    Im Q_ij = -(q(x + i y) - q(x) - q(y)) / 2 (Q antilinear in the first
    slot), with a final Hermitian symmetrization.
    """
    if data.n != 3:
        raise ValueError("Q assembly requires n = 3")
    combos = [(i, i, 1.0) for i in range(4)]
    pairs = [(i, j) for i in range(4) for j in range(i + 1, 4)]
    combos += [(i, j, 1.0) for i, j in pairs]
    combos += [(i, j, 1.0j) for i, j in pairs]
    couples = []
    for i, j, c in combos:
        d = _C4_BASIS[i] if i == j else _combine(_C4_BASIS[i], _C4_BASIS[j], c)
        couples.append(SpinorCouple(d))
    vals, diags = charge_limits(data, couples, schedule, tol, quad)
    _require_convergence(diags, "q_assemble_from_charges")
    Q = np.zeros((4, 4), dtype=complex)
    for idx in range(4):
        Q[idx, idx] = vals[idx]
    for t, (i, j) in enumerate(pairs):
        s = vals[4 + t]
        m = vals[10 + t]
        re = 0.5 * (s - Q[i, i].real - Q[j, j].real)
        im = -0.5 * (m - Q[i, i].real - Q[j, j].real)
        Q[i, j] = re + 1j * im
        Q[j, i] = re - 1j * im
    herm_res = np.max(np.abs(Q - Q.conj().T))
    if herm_res > herm_tol * max(1.0, np.max(np.abs(Q))):
        raise RuntimeError(f"Hermiticity residual {herm_res} above tolerance")
    Q = 0.5 * (Q + Q.conj().T)
    return Q, diags
