import numpy as np
import pytest

from adscharges.charges import EnergyMomentum, q_from_components
from adscharges.positivity import (
    NormalForm,
    NotTimelikeError,
    _angular_from_xi,
    component_inequalities,
    group_action,
    minors_check,
    normalize,
    psd_oracle,
    reduced_inequality,
)
from adscharges.spin import lambda_inv, lambda_iso, sl2_basis


def em_of(M, Xi):
    em = EnergyMomentum(
        mass_vector=lambda_inv(np.asarray(M, dtype=complex)),
        angular=_angular_from_xi(np.asarray(Xi, dtype=complex)),
        n=3,
        M=np.asarray(M, dtype=complex),
    )
    em.Xi = np.asarray(Xi, dtype=complex)
    return em


def random_mass_xi(rng, timelike=True):
    """Random Hermitian M (timelike: positive definite) and trace-free Xi."""
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    M = a @ a.conj().T
    if timelike:
        M += 0.2 * np.eye(2)
    z = rng.normal(size=3) + 1j * rng.normal(size=3)
    Xi = sum(z[j] * sl2_basis()[j] for j in range(3))
    return M, Xi


def test_normalize_identity():
    nf = normalize(em_of(np.eye(2), np.zeros((2, 2))))
    assert abs(nf.m0 - 1.0) < 1e-14
    assert abs(nf.n1) < 1e-14 and abs(nf.r1) < 1e-14 and abs(nf.r2) < 1e-14
    assert np.max(np.abs(nf.M - np.eye(2))) < 1e-14
    assert np.max(np.abs(nf.Xi)) < 1e-14


def test_normalize_diagonal_mass():
    """M = diag(2, 1/2): det = 1 so m0 = 1; the transform is M^(-1/2) up to
    SU(2) x phase and takes M to the identity."""
    M = np.diag([2.0, 0.5])
    nf = normalize(em_of(M, np.zeros((2, 2))))
    assert abs(nf.m0 - 1.0) < 1e-14
    assert np.max(np.abs(nf.M - np.eye(2))) < 1e-14
    e = nf.transform
    assert np.max(np.abs(e @ M @ e.conj().T - np.eye(2))) < 1e-13


def test_normal_form_structure():
    rng = np.random.default_rng(0)
    for _ in range(50):
        M, Xi = random_mass_xi(rng)
        nf = normalize(em_of(M, Xi))
        assert nf.m0 > 0
        # normal-form components reproduce the transformed (M, Xi)
        e = nf.transform
        Mt = e @ M @ e.conj().T
        Xit = np.linalg.inv(e.conj().T) @ Xi @ e.conj().T
        assert np.max(np.abs(Mt - nf.M)) < 1e-9 * max(1.0, nf.m0)
        assert np.max(np.abs(Xit - nf.Xi)) < 1e-9 * max(1.0, np.max(np.abs(nf.Xi)))


def test_orbit_invariants():
    """m0, n1, |r1| and r2 are invariant under the group action."""
    rng = np.random.default_rng(1)
    for _ in range(30):
        M, Xi = random_mass_xi(rng)
        nf = normalize(em_of(M, Xi))
        g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        g /= np.sqrt(np.linalg.det(g).astype(complex))
        em2 = group_action(g, em_of(M, Xi))
        nf2 = normalize(em2)
        scale = max(1.0, nf.m0)
        assert abs(nf.m0 - nf2.m0) < 1e-8 * scale
        assert abs(nf.n1 - nf2.n1) < 1e-7 * scale
        assert abs(abs(nf.r1) - abs(nf2.r1)) < 1e-7 * scale
        assert abs(nf.r2 - nf2.r2) < 1e-7 * scale


def test_group_action_congruence():
    """Q transforms by congruence S = diag(e^-1, e*) under the action."""
    rng = np.random.default_rng(2)
    for _ in range(30):
        M, Xi = random_mass_xi(rng)
        Q = q_from_components(M, Xi)
        e = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        e /= np.sqrt(np.linalg.det(e).astype(complex))
        em2 = group_action(e, em_of(M, Xi))
        Q2 = q_from_components(em2.M, em2.Xi)
        S = np.zeros((4, 4), dtype=complex)
        S[:2, :2] = np.linalg.inv(e)
        S[2:, 2:] = e.conj().T
        assert np.max(np.abs(Q2 - S.conj().T @ Q @ S)) < 1e-9 * np.max(np.abs(Q))


def test_not_timelike_rejected():
    zero = np.zeros((2, 2))
    with pytest.raises(NotTimelikeError):
        normalize(em_of(np.diag([1.0, 0.0]), zero))
    with pytest.raises(NotTimelikeError):
        normalize(em_of(-np.eye(2), zero))
    with pytest.raises(NotTimelikeError):
        # null vector: det M = 0
        normalize(em_of(lambda_iso([1.0, 1.0, 0.0, 0.0]), zero))


def test_minors_identity_example():
    Q = 2.0 * np.eye(4)
    rep = minors_check(Q)
    assert rep["verdict"] == "non-negative"
    by_order = {}
    for subset, val in rep["minors"].items():
        by_order.setdefault(len(subset), set()).add(round(val, 12))
    assert by_order[1] == {2.0}
    assert by_order[2] == {4.0}
    assert by_order[3] == {8.0}
    assert by_order[4] == {16.0}
    assert len(rep["minors"]) == 15


def test_minors_negative_example():
    Q = np.diag([1.0, 1.0, 1.0, -0.5])
    assert minors_check(Q)["verdict"] == "negative"


def test_component_inequalities_match_minors():
    """The nine closed-form expressions in (m0, m, n, r) equal principal
    minors of Q divided by 2^order, exactly (with multiplicity)."""
    rng = np.random.default_rng(3)
    mapping = {
        ("linear", 0): [(1,), (2,)],
        ("linear", 1): [(0,), (3,)],
        ("quadratic", 0): [(0, 1), (2, 3)],
        ("quadratic", 1): [(1, 2)],
        ("quadratic", 2): [(0, 3)],
        ("quadratic", 3): [(0, 2), (1, 3)],
        ("cubic", 0): [(0, 1, 2), (1, 2, 3)],
        ("cubic", 1): [(0, 1, 3), (0, 2, 3)],
        ("quartic", 0): [(0, 1, 2, 3)],
    }
    for _ in range(40):
        m0 = rng.uniform(0.5, 3.0)
        m = rng.normal(size=3)
        n = rng.normal(size=3)
        r = rng.normal(size=3)
        M = lambda_iso(np.concatenate([[m0], m]))
        N = lambda_iso(np.concatenate([[0.0], n]))
        R = lambda_iso(np.concatenate([[0.0], r]))
        Q = q_from_components(M, N + 1j * R)
        comp = component_inequalities(m0, m, n, r)
        minors = minors_check(Q)["minors"]
        for (group, idx), subsets in mapping.items():
            for s in subsets:
                ref = minors[s] / 2.0 ** len(s)
                assert abs(comp[group][idx] - ref) < 1e-10 * max(1.0, abs(ref))


def test_minors_check_reports_components():
    rep = minors_check(
        2.0 * np.eye(4), components=(1.0, [0, 0, 0], [0, 0, 0], [0, 0, 0])
    )
    ci = rep["component_inequalities"]
    assert ci["linear"] == [1.0, 1.0]
    assert ci["quartic"] == [1.0]


def test_psd_oracle():
    assert psd_oracle(2 * np.eye(4)) == "psd"
    assert psd_oracle(np.diag([1.0, 1.0, 1.0, -1e-3])) == "not psd"
    # boundary case within tolerance counts as psd
    assert psd_oracle(np.diag([1.0, 1.0, 1.0, 0.0])) == "psd"


def test_reduced_examples():
    # (m0, n1, r1, r2) = (1, 1, 0, 0): equality case, Q singular PSD
    nf = NormalForm(1.0, 1.0, 0.0, 0.0, np.eye(2, dtype=complex))
    lhs, rhs, verdict = reduced_inequality(nf)
    assert abs(lhs - rhs) < 1e-12
    assert verdict == "marginal"
    assert psd_oracle(nf.q()) == "psd"
    assert abs(np.linalg.eigvalsh(nf.q())[0]) < 1e-12

    # (1, 1, 0.1, 0): fails, Q has a negative eigenvalue
    nf = NormalForm(1.0, 1.0, 0.1, 0.0, np.eye(2, dtype=complex))
    assert reduced_inequality(nf)[2] == "fails"
    assert np.linalg.eigvalsh(nf.q())[0] < -1e-6

    # comfortably inside: holds, Q positive definite
    nf = NormalForm(2.0, 0.3, 0.2, 0.1, np.eye(2, dtype=complex))
    assert reduced_inequality(nf)[2] == "holds"
    assert np.linalg.eigvalsh(nf.q())[0] > 1e-6


def test_reduced_agrees_with_psd_oracle():
    rng = np.random.default_rng(4)
    for _ in range(300):
        M, Xi = random_mass_xi(rng)
        nf = normalize(em_of(M, Xi))
        Q = q_from_components(M, Xi)
        verdict = reduced_inequality(nf)[2]
        if verdict == "marginal":
            continue
        assert (verdict == "holds") == (psd_oracle(Q) == "psd")


def test_minors_agree_with_psd_oracle():
    rng = np.random.default_rng(5)
    for _ in range(300):
        M, Xi = random_mass_xi(rng)
        Q = q_from_components(M, Xi)
        rep = minors_check(Q)
        scale = np.max(np.abs(Q))
        boundary = any(
            abs(v) <= 1e-9 * scale ** len(s) for s, v in rep["minors"].items()
        )
        if boundary:
            continue
        assert (rep["verdict"] == "non-negative") == (psd_oracle(Q) == "psd")
