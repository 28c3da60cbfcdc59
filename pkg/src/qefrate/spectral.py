"""Transfer function, spectral densities and their matrix trigonometry.

For a validated model the transfer function is F(v) = S (vI - A)^{-1} B.
On the imaginary axis it generates the two spectral functions

    Phi(lambda) = F(i lambda) F(i lambda)*          (Hermitian, PSD),
    Psi(lambda) = F(i lambda) J F(i lambda)*        (skew-Hermitian),

whose sum Phi + i Psi is the spectral density of the weighted system
process.  Trigonometric functions of theta*Psi are always evaluated
through the Hermitian matrix H = i Psi, on which they become hyperbolic
functions with real spectra:

    cos(theta Psi)  = cosh(theta H),
    sinc(theta Psi) = sinhc(theta H),
    tanc(theta Psi) = tanhc(theta H).

This keeps every eigensolve on the Hermitian path and makes the outputs
Hermitian by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._funcs import apply_herm, hermitize, sinhc, skew_hermitize, tanhc
from .errors import SingularityError
from .model import StateSpace
from .quadrature import QuadratureConfig

__all__ = [
    "SpectralSample", "SpectralGrid", "TrigBundle",
    "transfer", "spectral_sample", "sample_grid", "trig_bundle",
    "feasibility_margin",
]


@dataclass(frozen=True)
class SpectralSample:
    """Spectral data at a single frequency."""

    lam: float
    f_val: np.ndarray        # transfer function F(i lam), n x m
    phi: np.ndarray          # Hermitian PSD
    psi: np.ndarray          # skew-Hermitian
    h: np.ndarray            # i * psi, Hermitian


@dataclass(frozen=True)
class SpectralGrid:
    """Stacked spectral samples over a frequency mesh.

    ``phi``, ``psi`` and ``h`` have shape (n_freq, n, n).  ``tail_coeff``
    is Tr(Pi B B'), the coefficient of the 1/lambda^2 high-frequency
    asymptote shared by the log-det and trace integrands.
    """

    lambdas: np.ndarray
    f_val: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    h: np.ndarray
    tail_coeff: float

    def sample(self, k: int) -> SpectralSample:
        return SpectralSample(lam=float(self.lambdas[k]), f_val=self.f_val[k],
                              phi=self.phi[k], psi=self.psi[k], h=self.h[k])


@dataclass(frozen=True)
class TrigBundle:
    """cos, sinc and tanc of theta*Psi at one frequency."""

    cos_tp: np.ndarray
    sinc_tp: np.ndarray
    tanc_tp: np.ndarray
    theta: float


def transfer(ss: StateSpace, v: complex) -> np.ndarray:
    """Evaluate F(v) = S (vI - A)^{-1} B by a dense linear solve.

    Raises SingularityError when v is within 1e-12 (relative) of an
    eigenvalue of the drift; this cannot happen on the imaginary axis
    because the drift is Hurwitz.
    """
    eig = np.linalg.eigvals(ss.a)
    if np.min(np.abs(eig - v)) < 1e-12 * (1.0 + abs(v)):
        raise SingularityError(f"evaluation point {v} is an eigenvalue of the drift")
    n = ss.n
    return ss.s_half @ np.linalg.solve(v * np.eye(n) - ss.a, ss.b)


def spectral_sample(ss: StateSpace, lam: float) -> SpectralSample:
    """Spectral pair at one frequency, explicitly (skew-)Hermitized.

    Negative frequencies are produced by conjugating the positive-frequency
    sample (one code path, mirrored), so the reality symmetries
    Phi(-lam) = conj(Phi(lam)) and Psi(-lam) = conj(Psi(lam)) hold exactly.
    """
    if lam < 0:
        base = spectral_sample(ss, -lam)
        return SpectralSample(lam=float(lam), f_val=np.conj(base.f_val),
                              phi=np.conj(base.phi), psi=np.conj(base.psi),
                              h=-np.conj(base.h))
    f = transfer(ss, 1j * lam)
    fh = f.conj().T
    phi = hermitize(f @ fh)
    psi = skew_hermitize(f @ ss.j @ fh)
    return SpectralSample(lam=float(lam), f_val=f, phi=phi, psi=psi,
                          h=hermitize(1j * psi))


def sample_grid(ss: StateSpace, lambdas: np.ndarray) -> SpectralGrid:
    """Vectorized spectral pair over a frequency mesh."""
    lambdas = np.asarray(lambdas, dtype=float)
    n = ss.n
    eye = np.eye(n)
    resolvent_rhs = np.broadcast_to(ss.b, (len(lambdas), n, ss.m))
    f = ss.s_half @ np.linalg.solve(
        1j * lambdas[:, None, None] * eye - ss.a, resolvent_rhs)
    fh = np.conj(np.swapaxes(f, 1, 2))
    phi = hermitize(f @ fh)
    psi = skew_hermitize(f @ ss.j @ fh)
    return SpectralGrid(lambdas=lambdas, f_val=f, phi=phi, psi=psi,
                        h=hermitize(1j * psi),
                        tail_coeff=ss.lqg_weight_trace())


def trig_bundle(sample: SpectralSample, theta: float) -> TrigBundle:
    """Matrix trig functions of theta*Psi via the Hermitian eigenpath."""
    w, v = np.linalg.eigh(sample.h)
    x = theta * w
    return TrigBundle(
        cos_tp=apply_herm(np.cosh(x), v),
        sinc_tp=apply_herm(np.asarray(sinhc(x)), v),
        tanc_tp=apply_herm(np.asarray(tanhc(x)), v),
        theta=float(theta),
    )


def _margin_per_freq(phi: np.ndarray, h: np.ndarray, theta: float) -> np.ndarray:
    """theta * lam_max(sqrt(tanhc) Phi sqrt(tanhc)) for stacked samples."""
    w, v = np.linalg.eigh(h)
    root = np.sqrt(np.asarray(tanhc(theta * w)))
    sym = apply_herm(root, v)
    inner = hermitize(sym @ phi @ sym)
    return theta * np.linalg.eigvalsh(inner)[..., -1]


def feasibility_margin(ss: StateSpace, theta: float,
                       grid: QuadratureConfig) -> float:
    """Certified bound for the spectral feasibility condition.

    Returns the supremum over the mesh of

        theta * lam_max( sqrt(tanc(theta Psi)) Phi sqrt(tanc(theta Psi)) ),

    combined with the strictly-proper tail bound
    theta * (||S|| ||B|| / (cutoff - ||A||))^2 that dominates every
    frequency beyond the cutoff.  A value below 1 certifies feasibility of
    ``theta``; the caller interprets values >= 1 as infeasible.
    """
    if theta == 0.0:
        return 0.0
    sg = sample_grid(ss, grid.lambdas())
    grid_sup = float(np.max(_margin_per_freq(sg.phi, sg.h, theta)))
    a_norm = np.linalg.norm(ss.a, 2)
    tail = np.inf
    if grid.cutoff > a_norm:
        gain = np.linalg.norm(ss.s_half, 2) * np.linalg.norm(ss.b, 2)
        tail = theta * (gain / (grid.cutoff - a_norm)) ** 2
    return max(grid_sup, float(tail))
