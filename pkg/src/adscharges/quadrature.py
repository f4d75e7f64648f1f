"""Quadrature on round spheres S^{n-1} in hyperspherical coordinates.

Nodes are angle tuples (theta_1, ..., theta_{n-2}, phi); weights include the
round unit-sphere density prod_j sin^{n-1-j}(theta_j), so that
sum_a w_a f(angles_a) approximates the integral of f over S^{n-1} with the
unit round measure.  Gauss-Legendre is used in each polar angle (for n = 3
this is equivalent to Gauss-Legendre in cos(theta)) and a uniform trapezoid
rule in the periodic azimuth, which is spectrally accurate there.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["SphereQuadrature", "sphere_area"]


def sphere_area(n):
    """Area of the unit round sphere S^{n-1}."""
    from math import gamma, pi

    return 2.0 * pi ** (n / 2.0) / gamma(n / 2.0)


@dataclass(frozen=True)
class SphereQuadrature:
    """Product quadrature rule on S^{n-1}.

    nodes: array of shape (count, n-1) of angle tuples; weights: positive
    array of shape (count,) absorbing the round-measure density.
    """

    n: int
    nodes: np.ndarray
    weights: np.ndarray

    @classmethod
    def build(cls, n=3, n_theta=24, n_phi=48):
        if n < 2:
            raise ValueError("need n >= 2")
        if n_theta < 2 or n_phi < 4:
            raise ValueError("quadrature orders too small")
        # polar angles: Gauss-Legendre on [0, pi], weight sin^{n-1-j}(theta)
        polar_nodes, polar_weights = [], []
        for j in range(1, n - 1):
            x, w = np.polynomial.legendre.leggauss(n_theta)
            theta = 0.5 * np.pi * (x + 1.0)
            wt = 0.5 * np.pi * w * np.sin(theta) ** (n - 1 - j)
            polar_nodes.append(theta)
            polar_weights.append(wt)
        phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
        wphi = np.full(n_phi, 2.0 * np.pi / n_phi)

        grids = np.meshgrid(*polar_nodes, phi, indexing="ij")
        wgrids = np.meshgrid(*polar_weights, wphi, indexing="ij")
        nodes = np.stack([g.ravel() for g in grids], axis=-1)
        weights = np.prod(np.stack([g.ravel() for g in wgrids]), axis=0)
        return cls(n=n, nodes=nodes, weights=weights)

    def integrate(self, values):
        """Weighted sum with fixed pairwise order for reproducibility."""
        terms = self.weights * np.asarray(values, dtype=np.complex128)
        if np.isrealobj(values):
            terms = terms.real
        return _pairwise_sum(terms)


def _pairwise_sum(terms):
    """Deterministic pairwise summation (order independent of BLAS/threads)."""
    arr = np.asarray(terms)
    while arr.shape[0] > 1:
        if arr.shape[0] % 2:
            arr = np.concatenate([arr, np.zeros((1,) + arr.shape[1:], arr.dtype)])
        arr = arr[0::2] + arr[1::2]
    return arr[0] if arr.shape[0] else arr.dtype.type(0)
