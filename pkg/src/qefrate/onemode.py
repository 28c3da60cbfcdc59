"""Closed forms for single-mode oscillators with the weight equal to the
energy matrix.

For one position-momentum pair the commutation matrix is BJ2/2 and every
coupling matrix M satisfies M' J M = mu * BJ2 for a scalar mu, assumed
positive.  With nu the square root of det R, the drift is similar to a
rotation-damping block,

    A = R^{-1/2} (nu BJ2 - mu I) sqrt(R),   eigenvalues -mu +/- i nu,

and, when the cost weight equals R, the rational continuation of the
commutator spectrum collapses to two scalar functions:

    Mho(s) = a(s) I + b(s) BJ2,
    [a, b] = mu nu / (((s+mu)^2 + nu^2)((mu-s)^2 + nu^2)) * [2 nu s,
                                                             mu^2+nu^2-s^2],

with poles at mu +/- i nu and -mu +/- i nu.  Trigonometric functions of
theta*Mho then reduce to scalar sin/cos/sinh/cosh combinations.  These
closed forms provide an independent oracle for the generic spectral
pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._funcs import sqrtm_spd
from .errors import DimensionError, ParameterError, SingularityError, StructureError
from .model import BJ2, OqhoParams, StateSpace, realize

__all__ = ["OneModeParams", "extract_mu", "onemode_drift", "ab_functions",
           "onemode_trig", "poles", "residue_at", "to_state_space"]


@dataclass(frozen=True)
class OneModeParams:
    """Single-mode parameters: coupling scalar, frequency, energy, coupling."""

    mu: float
    nu: float
    r: np.ndarray
    m_mat: np.ndarray

    @classmethod
    def from_matrices(cls, r: np.ndarray, m_mat: np.ndarray) -> "OneModeParams":
        r = np.asarray(r, dtype=float)
        m_mat = np.asarray(m_mat, dtype=float)
        if r.shape != (2, 2):
            raise DimensionError("energy matrix must be 2x2")
        if np.any(np.linalg.eigvalsh(0.5 * (r + r.T)) <= 0):
            raise ParameterError("energy matrix must be positive definite")
        from .model import build_j_matrix
        j = build_j_matrix(m_mat.shape[0])
        mu = extract_mu(m_mat, j)
        nu = float(np.sqrt(np.linalg.det(r)))
        return cls(mu=mu, nu=nu, r=r, m_mat=m_mat)


def extract_mu(m_mat: np.ndarray, j: np.ndarray) -> float:
    """Coupling scalar mu from M' J M = mu * BJ2.

    Any 2-column coupling produces a multiple of BJ2 here; deviations
    beyond tolerance indicate a malformed input, and nonpositive mu is
    outside the assumed regime.
    """
    m_mat = np.asarray(m_mat, dtype=float)
    if m_mat.ndim != 2 or m_mat.shape[1] != 2:
        raise DimensionError("coupling matrix must have exactly 2 columns")
    mjm = m_mat.T @ j @ m_mat
    mu = float(mjm[0, 1])
    scale = max(abs(mu), 1.0)
    if np.linalg.norm(mjm - mu * BJ2) > 1e-12 * scale:
        raise StructureError("M' J M is not a multiple of the 2x2 "
                             "antisymmetric generator")
    if mu <= 0:
        raise ParameterError(f"coupling scalar must be positive, got {mu:g}")
    return mu


def onemode_drift(r: np.ndarray, mu: float) -> np.ndarray:
    """Drift matrix R^{-1/2} (nu BJ2 - mu I) sqrt(R), eigenvalues -mu +/- i nu."""
    r = np.asarray(r, dtype=float)
    root = sqrtm_spd(r)
    nu = float(np.sqrt(np.linalg.det(r)))
    return np.linalg.solve(root, (nu * BJ2 - mu * np.eye(2)) @ root)


def poles(mu: float, nu: float) -> np.ndarray:
    """The four poles of the rational spectral functions."""
    return np.array([mu + 1j * nu, mu - 1j * nu, -mu + 1j * nu, -mu - 1j * nu])


def ab_functions(mu: float, nu: float, s: complex):
    """Scalar coefficients (a, b) of Mho(s) = a I + b BJ2."""
    s = complex(s)
    if np.min(np.abs(poles(mu, nu) - s)) < 1e-10:
        raise SingularityError(f"evaluation point {s} is at a pole")
    denom = ((s + mu) ** 2 + nu ** 2) * ((mu - s) ** 2 + nu ** 2)
    factor = mu * nu / denom
    return factor * 2.0 * nu * s, factor * (mu ** 2 + nu ** 2 - s * s)


def onemode_trig(mu: float, nu: float, s: complex, theta: float):
    """cos(theta Mho) and sin(theta Mho) from the scalar closed forms.

    Uses cos(z BJ2) = cosh(z) I and sin(z BJ2) = sinh(z) BJ2 together with
    the angle-sum identities on the commuting split a I + b BJ2.
    """
    a, b = ab_functions(mu, nu, s)
    eye = np.eye(2, dtype=complex)
    ca, sa = np.cos(theta * a), np.sin(theta * a)
    cb, sb = np.cosh(theta * b), np.sinh(theta * b)
    cos_m = ca * cb * eye - sa * sb * BJ2.astype(complex)
    sin_m = sa * cb * eye + ca * sb * BJ2.astype(complex)
    return cos_m, sin_m


def residue_at(mu: float, nu: float, pole: complex, radius: float = 1e-3,
               nodes: int = 64) -> np.ndarray:
    """Residue of Mho at a pole by trapezoid quadrature on a small circle.

    The trapezoid rule is spectrally accurate on the circle; the returned
    2x2 matrix is singular at each of the four poles.
    """
    angles = 2.0 * np.pi * np.arange(nodes) / nodes
    points = pole + radius * np.exp(1j * angles)
    acc = np.zeros((2, 2), dtype=complex)
    for z in points:
        a, b = ab_functions(mu, nu, z)
        mho = a * np.eye(2) + b * BJ2
        acc += mho * (z - pole)
    return acc / nodes


def to_state_space(params: OneModeParams) -> StateSpace:
    """Realize the single-mode model with weight equal to the energy matrix."""
    return realize(OqhoParams(theta_ccr=0.5 * BJ2, energy=params.r,
                              coupling=params.m_mat, weight=params.r))
