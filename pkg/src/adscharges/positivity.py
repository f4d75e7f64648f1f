r"""Positivity layer: minors, eigenvalue oracle, orbit normal form.

The SL(2,C) action on an energy-momentum pair is M -> e M e*,
Xi -> (e*)^{-1} Xi e*, which turns Q = 2 [[adj M, Xi], [Xi*, M]] into the
congruence S* Q S with S = diag(e^{-1}, e*); positive semidefiniteness is
therefore an orbit invariant.  For timelike future-directed M the orbit has
a representative (m0 I, n1 sigma3 + i(r1 sigma3 + r2 sigma1)) with
m0, n1, r2 >= 0, and non-negativity of Q reduces to

    m0 >= sqrt((|n1| + |r2|)^2 + r1^2).
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .charges import EnergyMomentum, q_from_components
from .spin import SIGMA1, SIGMA3, hermitian_sqrt, lambda_inv, lambda_iso

__all__ = [
    "NormalForm",
    "NotTimelikeError",
    "component_inequalities",
    "group_action",
    "minors_check",
    "normalize",
    "psd_oracle",
    "reduced_inequality",
]

EPS = 1e-9


class NotTimelikeError(ValueError):
    """The mass part is not timelike future-directed."""


def group_action(e, em: EnergyMomentum) -> EnergyMomentum:
    """Dual SL(2,C) action on the energy-momentum pair."""
    e = np.asarray(e, dtype=complex)
    if abs(np.linalg.det(e) - 1.0) > 1e-10:
        raise ValueError("transformation must have unit determinant")
    M = e @ em.M @ e.conj().T
    einvstar = np.linalg.inv(e.conj().T)
    Xi = einvstar @ em.Xi @ e.conj().T
    out = EnergyMomentum(
        mass_vector=lambda_inv(M), angular=_angular_from_xi(Xi), n=3, M=M
    )
    out.Xi = Xi
    return out


def _angular_from_xi(Xi):
    """Generator-basis charges consistent with ell(xi) = Re tr(xi* Xi)."""
    from .charges import _generator_basis_matrix
    from .spin import mu_lie_algebra, sl2_basis

    _, basis_flat = _generator_basis_matrix(3)
    C = np.stack(
        [
            np.linalg.lstsq(basis_flat, mu_lie_algebra(xi).ravel(), rcond=None)[0]
            for xi in sl2_basis()
        ]
    )
    ell = np.array(
        [float(np.trace(xi.conj().T @ Xi).real) for xi in sl2_basis()]
    )
    return np.linalg.solve(C, ell)


@dataclass(frozen=True)
class NormalForm:
    """Orbit representative (m0, n1, r1, r2) and the transform reaching it."""

    m0: float
    n1: float
    r1: float
    r2: float
    transform: np.ndarray

    @property
    def M(self):
        return self.m0 * np.eye(2, dtype=complex)

    @property
    def Xi(self):
        return self.n1 * SIGMA3 + 1j * (self.r1 * SIGMA3 + self.r2 * SIGMA1)

    def q(self):
        return q_from_components(self.M, self.Xi)


def normalize(em: EnergyMomentum, tol=1e-12) -> NormalForm:
    """Three-stage orbit reduction of a timelike energy-momentum.

    Stage 1 maps M to m0 I by the Hermitian element sqrt(m0) M^{-1/2};
    stage 2 diagonalizes the Hermitian part of Xi inside SU(2) with the
    non-negative eigenvalue first; stage 3 rotates the off-diagonal entry
    of the anti-Hermitian part onto the non-negative reals by a diagonal
    phase.  Raises NotTimelikeError when det M <= 0 or tr M <= 0.
    """
    M = np.asarray(em.M, dtype=complex)
    detM = float(np.linalg.det(M).real)
    trM = float(np.trace(M).real)
    if detM <= tol or trM <= 0:
        raise NotTimelikeError(
            f"mass part not timelike future-directed: det = {detM}, tr = {trM}"
        )
    m0 = np.sqrt(detM)
    e1 = np.sqrt(m0) * np.linalg.inv(hermitian_sqrt(M))
    xi1 = np.linalg.inv(e1.conj().T) @ em.Xi @ e1.conj().T

    N = 0.5 * (xi1 + xi1.conj().T)
    scale = max(1.0, float(np.max(np.abs(xi1))))
    if np.max(np.abs(N)) <= tol * scale:
        e2 = np.eye(2, dtype=complex)
    else:
        vals, vecs = np.linalg.eigh(N)
        # descending order puts the non-negative eigenvalue first
        vecs = vecs[:, ::-1]
        vecs[:, 0] = vecs[:, 0] / np.linalg.det(vecs)  # unit determinant
        e2 = vecs.conj().T
    xi2 = e2 @ xi1 @ e2.conj().T

    R = -0.5j * (xi2 - xi2.conj().T)
    rho = complex(R[0, 1])
    theta = -0.5 * np.angle(rho) if abs(rho) > 0 else 0.0
    e3 = np.diag([np.exp(1j * theta), np.exp(-1j * theta)])
    xi3 = e3 @ xi2 @ e3.conj().T

    n1 = float(0.5 * (xi3 + xi3.conj().T)[0, 0].real)
    R3 = -0.5j * (xi3 - xi3.conj().T)
    r1 = float(R3[0, 0].real)
    r2 = float(R3[0, 1].real)
    transform = e3 @ e2 @ e1
    return NormalForm(m0=float(m0), n1=n1, r1=r1, r2=r2, transform=transform)


def psd_oracle(Q, eps=EPS):
    """Eigenvalue-based verdict: 'psd' or 'not psd' at the scaled band."""
    Q = np.asarray(Q, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(Q, 2)))
    return "psd" if np.linalg.eigvalsh(Q)[0] >= -eps * scale else "not psd"


def _principal_minors(Q):
    out = {}
    for order in range(1, 5):
        for rows in combinations(range(4), order):
            sub = Q[np.ix_(rows, rows)]
            out[rows] = float(np.linalg.det(sub).real)
    return out


def component_inequalities(m0, m, n, r):
    """The explicit component form of the minor inequalities (n = 3).

    Components refer to M = lambda_iso(m0, m), Xi = N + iR with
    N = lambda_iso(0, n), R = lambda_iso(0, r).  Returns the nine displayed
    quantities (two linear, four quadratic, two cubic, one quartic), each of
    which must be non-negative.  One source display of the cubics has an
    unbalanced parenthesis; they are transcribed with the natural completion
    and cross-checked against the direct order-3 minors.
    """
    m, n, r = (np.asarray(v, dtype=float) for v in (m, n, r))
    m1, m2, m3 = m
    n1, n2, n3 = n
    r1, r2, r3 = r
    msq, nsq, rsq = m @ m, n @ n, r @ r
    lin = [m0 + m1, m0 - m1]
    quad = [
        m0 ** 2 - msq,
        (m0 + m1) ** 2 - (n2 + r3) ** 2 - (r2 - n3) ** 2,
        (m0 - m1) ** 2 - (n2 - r3) ** 2 - (r2 + n3) ** 2,
        m0 ** 2 - m1 ** 2 - n1 ** 2 - r1 ** 2,
    ]
    cubic = [
        (m0 + m1) * (m0 ** 2 - (msq + n1 ** 2 + r1 ** 2))
        - (m0 - m1) * ((n2 + r3) ** 2 + (n3 - r2) ** 2)
        - 2.0
        * (
            (n2 + r3) * (m2 * n1 + m3 * r1)
            + (-n3 + r2) * (m2 * r1 - m3 * n1)
        ),
        (m0 - m1) * (m0 ** 2 - (msq + n1 ** 2 + r1 ** 2))
        - (m0 + m1) * ((n2 - r3) ** 2 + (n3 + r2) ** 2)
        + 2.0
        * (
            (n2 - r3) * (m2 * n1 - m3 * r1)
            + (n3 + r2) * (m2 * r1 + m3 * n1)
        ),
    ]
    quartic = [
        (m0 ** 2 - (msq + nsq + rsq)) ** 2
        - 4.0 * (msq * nsq + msq * rsq + nsq * rsq)
        + 4.0 * ((m @ n) ** 2 + (m @ r) ** 2 + (n @ r) ** 2)
        + 8.0 * m0 * float(np.linalg.det(np.stack([m, n, r])))
    ]
    return {"linear": lin, "quadratic": quad, "cubic": cubic, "quartic": quartic}


def minors_check(Q, eps=EPS, components=None):
    """All fifteen principal minors of Q with a non-negativity verdict.

    The band is eps scaled by ||Q||^order per minor order.  When the
    component tuple (m0, m, n, r) is supplied, the explicit inequality list
    is also evaluated and reported (cross-check only; the minors decide).
    """
    Q = np.asarray(Q, dtype=complex)
    minors = _principal_minors(Q)
    scale = max(1.0, float(np.max(np.abs(Q))))
    ok = all(
        val >= -eps * scale ** len(rows) for rows, val in minors.items()
    )
    result = {
        "verdict": "non-negative" if ok else "negative",
        "minors": minors,
    }
    if components is not None:
        result["component_inequalities"] = component_inequalities(*components)
    return result


def reduced_inequality(nf: NormalForm, eps=EPS):
    """(lhs, rhs, verdict) for m0 >= sqrt((|n1| + |r2|)^2 + r1^2)."""
    lhs = nf.m0
    rhs = float(np.sqrt((abs(nf.n1) + abs(nf.r2)) ** 2 + nf.r1 ** 2))
    band = eps * max(1.0, lhs, rhs)
    if abs(lhs - rhs) <= band:
        verdict = "marginal"
    elif lhs >= rhs:
        verdict = "holds"
    else:
        verdict = "fails"
    return lhs, rhs, verdict
