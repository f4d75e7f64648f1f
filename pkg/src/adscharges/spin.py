r"""Spin algebra of Minkowski R^{3,1} and the imaginary-Killing-spinor fields.

The Hermitian-matrix model identifies (R^4, q) with 2x2 Hermitian matrices
carrying the quadratic form -det,

    lambda_iso(y) = [[y0 + y1, y2 + i y3], [y2 - i y3, y0 - y1]],

so the unit hyperboloid becomes the positive-definite determinant-one sheet.
SL(2,C) double-covers the restricted Lorentz group through X -> g X g*, and
the Clifford embedding acts on C^4 = C^2 (+) C^2 in 2x2 blocks.

A spinor parameter w (+) u in C^2 (+) C^2 generates a field on hyperbolic
space whose squared-norm function V and 1-form alpha are the couple the
charge functional is evaluated on.  V is a causal element of the mass
function space, and alpha pairs with trace-free matrices through
4 Re tr(xi . u w*).
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SpinorData",
    "adjugate",
    "alpha_field",
    "alpha_pairing_matrix",
    "clifford_theta",
    "hermitian_sqrt",
    "iks_eval",
    "k_map",
    "lambda_inv",
    "lambda_iso",
    "mu_cover",
    "mu_lie_algebra",
    "pauli_basis",
    "sl2_basis",
    "v_field",
]

HERM_TOL = 1e-12

SIGMA1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def pauli_basis():
    return [SIGMA1.copy(), SIGMA2.copy(), SIGMA3.copy()]


def sl2_basis():
    """Real basis of sl(2,C): the trace-free Hermitian triple and i times it."""
    return [SIGMA1, SIGMA2, SIGMA3, 1j * SIGMA1, 1j * SIGMA2, 1j * SIGMA3]


def _check_hermitian(A, tol=HERM_TOL):
    A = np.asarray(A, dtype=complex)
    if A.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    if np.max(np.abs(A - A.conj().T)) > tol * max(1.0, np.max(np.abs(A))):
        raise ValueError("matrix is not Hermitian")
    return A


def _check_sl2(g, tol=HERM_TOL):
    g = np.asarray(g, dtype=complex)
    if g.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    if abs(np.linalg.det(g) - 1.0) > 1e3 * tol:
        raise ValueError("matrix is not unimodular")
    return g


def lambda_iso(y):
    """Minkowski vector -> Hermitian matrix; -det equals the Minkowski norm."""
    y = np.asarray(y, dtype=float)
    if y.shape != (4,):
        raise ValueError("expected a 4-vector")
    y0, y1, y2, y3 = y
    return np.array(
        [[y0 + y1, y2 + 1j * y3], [y2 - 1j * y3, y0 - y1]], dtype=complex
    )


def lambda_inv(A):
    """Hermitian matrix -> Minkowski vector (inverse of lambda_iso)."""
    A = _check_hermitian(A)
    y0 = 0.5 * (A[0, 0] + A[1, 1]).real
    y1 = 0.5 * (A[0, 0] - A[1, 1]).real
    y2 = A[0, 1].real
    y3 = A[0, 1].imag
    return np.array([y0, y1, y2, y3])


def adjugate(A):
    """Transposed comatrix of a 2x2 matrix: A @ adjugate(A) = det(A) I."""
    A = np.asarray(A, dtype=complex)
    return np.array([[A[1, 1], -A[0, 1]], [-A[1, 0], A[0, 0]]], dtype=complex)


def clifford_theta(X):
    """Clifford embedding of a Hermitian matrix into M_4(C).

    Block form [[0, 2X], [2 adj(X), 0]]; squares to 4 det(X) times the
    identity.
    """
    X = _check_hermitian(X)
    out = np.zeros((4, 4), dtype=complex)
    out[:2, 2:] = 2.0 * X
    out[2:, :2] = 2.0 * adjugate(X)
    return out


def mu_cover(g):
    """Image of an SL(2,C) element in the restricted Lorentz group SO0(3,1)."""
    g = _check_sl2(g)
    L = np.zeros((4, 4))
    for k in range(4):
        e = np.zeros(4)
        e[k] = 1.0
        L[:, k] = lambda_inv(g @ lambda_iso(e) @ g.conj().T)
    return L


def mu_lie_algebra(xi):
    """Derivative of mu_cover at the identity: so(3,1) matrix of xi in sl(2,C).

    Sends xi to the linear map y -> lambda_inv(xi L(y) + L(y) xi*).
    """
    xi = np.asarray(xi, dtype=complex)
    A = np.zeros((4, 4))
    for k in range(4):
        e = np.zeros(4)
        e[k] = 1.0
        Le = lambda_iso(e)
        A[:, k] = lambda_inv(xi @ Le + Le @ xi.conj().T)
    return A


def hermitian_sqrt(W):
    """Principal square root of a positive-definite Hermitian matrix."""
    W = _check_hermitian(W)
    vals, vecs = np.linalg.eigh(W)
    if vals[0] <= 0:
        raise ValueError("matrix is not positive definite")
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


@dataclass(frozen=True)
class SpinorData:
    """Spinor parameter w (+) u in C^2 (+) C^2."""

    w: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w", np.asarray(self.w, dtype=complex).reshape(2))
        object.__setattr__(self, "u", np.asarray(self.u, dtype=complex).reshape(2))

    @property
    def cap_u(self):
        """U = (u_1, -conj(w_2))."""
        return np.array([self.u[0], -np.conj(self.w[1])])

    @property
    def cap_v(self):
        """V = (u_2, conj(w_1))."""
        return np.array([self.u[1], np.conj(self.w[0])])

    @property
    def chi(self):
        """chi = conj(u_1) w_1 + conj(u_2) w_2."""
        return np.vdot(self.u, self.w)

    def transformed(self, e):
        """The SL(2,C) action: w -> e w, u -> (e*)^{-1} u."""
        e = _check_sl2(e)
        einvstar = np.linalg.inv(e.conj().T)
        return SpinorData(e @ self.w, einvstar @ self.u)


def iks_eval(d: SpinorData, g):
    """Fiber value in C^4 of the imaginary Killing spinor of d at frame g.

    The two basis families contribute (g^{-1} w, -i g^{-1} w) and
    (g* u, i g* u) in the C^2 (+) C^2 splitting.
    """
    g = _check_sl2(g)
    a = np.linalg.solve(g, d.w)
    b = g.conj().T @ d.u
    return np.concatenate([a + b, -1j * a + 1j * b])


def v_field(d: SpinorData, W):
    """V at the hyperboloid point W: 2 (w* adj(W) w + u* W u).  Real."""
    W = _check_hermitian(W)
    val = 2.0 * (np.vdot(d.w, adjugate(W) @ d.w) + np.vdot(d.u, W @ d.u))
    return float(val.real)


def alpha_field(d: SpinorData, g_section, zeta):
    """The 1-form of d evaluated on the tangent with frame components zeta.

    ``g_section`` is any SL(2,C) frame over the point W = g g*; the value is
    independent of the SU(2) right factor.  ``zeta`` is the trace-free
    Hermitian frame representative of the tangent vector; the matching
    tangent of the determinant-one sheet at W is mu(g) zeta = g zeta g*.

    Computed through the Clifford composition <X . e0 . sigma, sigma> with
    frame representatives zeta/2 and 1/2 for the tangent and the normal; at
    the identity frame this collapses to 4 Re(w* zeta u).
    """
    g = _check_sl2(g_section)
    zeta = _check_hermitian(zeta)
    if abs(np.trace(zeta)) > 1e-10 * max(1.0, np.max(np.abs(zeta))):
        raise ValueError("tangent representative must be trace free")
    sigma = iks_eval(d, g)
    acted = clifford_theta(0.5 * zeta) @ (clifford_theta(0.5 * np.eye(2)) @ sigma)
    val = np.vdot(sigma, acted)
    return float(val.real)


def alpha_pairing_matrix(d: SpinorData):
    """Trace-free part of u w*; alpha_d(xi) = 4 Re tr(xi @ this) on sl(2,C)."""
    A = np.outer(d.u, np.conj(d.w))
    return A - 0.5 * np.trace(A) * np.eye(2)


def k_map(d: SpinorData):
    """Mass-function coefficients of V_d and the angular pairing matrix.

    Returns (coeffs, A) with V_d = sum_k coeffs[k] x_k on the hyperboloid
    and alpha_d(xi) = 4 Re tr(xi A) for trace-free xi.  The coefficients are
    read off the quadratic form directly,

        V_d(lambda_iso(x)) = 2 w* adj(lambda_iso(x)) w + 2 u* lambda_iso(x) u,

    which is twice the (U, V) combination; the doubled normalisation is the
    one consistent with v_field and with the Hermitian-form assembly.
    """
    U, V = d.cap_u, d.cap_v
    nu, nv = float(np.vdot(U, U).real), float(np.vdot(V, V).real)
    uv = np.vdot(U, V)
    coeffs = 2.0 * np.array([nu + nv, nu - nv, 2.0 * uv.real, -2.0 * uv.imag])
    return coeffs, alpha_pairing_matrix(d)
