"""Exact Gaussian steady state of the linearized model.

Quadrature ordering is (x_a, p_a, x_b, p_b) with x = (a + a^dag)/sqrt(2),
p = (a - a^dag)/(i sqrt(2)); vacuum variance is 1/2.  The covariance matrix
obeys dV/dt = A V + V A^T + D with the drift A assembled from the effective
Hamiltonian and the diffusion D from the bath correlators.  The steady state
solves the continuous Lyapunov equation A V + V A^T + D = 0, done here by a
direct 16x16 vectorized linear solve; stability is decided by Routh-Hurwitz
on the quartic characteristic polynomial, with no general eigensolver on the
main path.  A fixed-step fourth-order integrator of the covariance flow is
provided as an in-module cross-check route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    EffectiveParams,
    InfeasibleError,
    NumericalError,
    SqueezedBathParams,
    ValidationError,
)

__all__ = [
    "SYMPLECTIC_FORM",
    "CovarianceState",
    "StabilityVerdict",
    "drift_matrix",
    "diffusion_matrix",
    "characteristic_coefficients",
    "is_stable",
    "lyapunov_steady",
    "evolve_covariance",
    "exact_phonon",
    "physicality_defect",
]

# symplectic form for ordering (x_a, p_a, x_b, p_b)
SYMPLECTIC_FORM = np.array([
    [0.0, 1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0, 0.0],
])

_PHYSICALITY_FLOOR = -1e-9
_LYAPUNOV_RESIDUAL_RTOL = 1e-10


@dataclass(frozen=True)
class StabilityVerdict:
    """Routh-Hurwitz verdict plus its margin (minimum Hurwitz determinant)."""

    stable: bool
    margin: float


@dataclass(frozen=True)
class CovarianceState:
    """Steady covariance matrix together with the generators that produced it."""

    v: np.ndarray
    drift: np.ndarray
    diffusion: np.ndarray


def drift_matrix(eff: EffectiveParams) -> np.ndarray:
    """Drift matrix A of the quadrature flow for the effective model.

    Rows follow (x_a, p_a, x_b, p_b):

        [ -kappa/2 + 2 xi_i,   delta - 2 xi_r,      0,        0     ]
        [ -(delta + 2 xi_r),  -kappa/2 - 2 xi_i,  -2 g_lin,   0     ]
        [        0,                  0,          -gamma_b/2, omega_b]
        [    -2 g_lin,               0,           -omega_b, -gamma_b/2]
    """
    xr, xi_im = eff.xi.real, eff.xi.imag
    g2 = 2.0 * eff.g_lin
    return np.array([
        [-eff.kappa / 2 + 2 * xi_im, eff.delta - 2 * xr, 0.0, 0.0],
        [-(eff.delta + 2 * xr), -eff.kappa / 2 - 2 * xi_im, -g2, 0.0],
        [0.0, 0.0, -eff.gamma_b / 2, eff.omega_b],
        [-g2, 0.0, -eff.omega_b, -eff.gamma_b / 2],
    ])


def diffusion_matrix(eff: EffectiveParams,
                     bath: SqueezedBathParams | None = None,
                     cavity_occupation: float = 0.0) -> np.ndarray:
    """Diffusion matrix D for a squeezed (bath given) or thermal cavity input.

    The cavity block is

        kappa * [[1/2 + N_s + Re M_s,   Im M_s        ],
                 [Im M_s,               1/2 + N_s - Re M_s]]

    and the mechanical block gamma_b (n_th + 1/2) I.  In thermal mode the
    substitution N_s -> cavity_occupation, M_s -> 0 applies.
    """
    if bath is not None:
        n_s, m_s = bath.n_s, bath.m_s
    else:
        if cavity_occupation < 0:
            raise ValidationError("cavity_occupation must be >= 0")
        n_s, m_s = cavity_occupation, 0.0 + 0.0j
    m_s = complex(m_s)
    d = np.zeros((4, 4))
    d[0, 0] = eff.kappa * (0.5 + n_s + m_s.real)
    d[1, 1] = eff.kappa * (0.5 + n_s - m_s.real)
    d[0, 1] = d[1, 0] = eff.kappa * m_s.imag
    d[2, 2] = d[3, 3] = eff.gamma_b * (eff.n_th + 0.5)
    return d


def characteristic_coefficients(a: np.ndarray) -> np.ndarray:
    """Monic characteristic polynomial coefficients of a 4x4 matrix.

    Faddeev-LeVerrier recursion: exact in the matrix entries, no
    eigendecomposition.  Returns [1, c1, c2, c3, c4] with
    det(lambda I - A) = lambda^4 + c1 lambda^3 + ... + c4.
    """
    a = np.asarray(a, dtype=float)
    if a.shape != (4, 4):
        raise ValidationError("characteristic_coefficients expects a 4x4 matrix")
    n = 4
    coeffs = np.empty(n + 1)
    coeffs[0] = 1.0
    m = np.zeros_like(a)
    ident = np.eye(n)
    for k in range(1, n + 1):
        m = a @ m + coeffs[k - 1] * ident
        coeffs[k] = -np.trace(a @ m) / k
    return coeffs


def is_stable(drift: np.ndarray) -> StabilityVerdict:
    """Routh-Hurwitz stability of the drift matrix.

    For lambda^4 + a1 lambda^3 + a2 lambda^2 + a3 lambda + a4 the Hurwitz
    determinants are

        h1 = a1
        h2 = a1 a2 - a3
        h3 = a3 h2 - a1^2 a4
        h4 = a4 h3

    and all eigenvalues lie strictly in the left half-plane iff all four are
    positive.  The margin is min(h1, h2, h3, h4).
    """
    _, a1, a2, a3, a4 = characteristic_coefficients(drift)
    h1 = a1
    h2 = a1 * a2 - a3
    h3 = a3 * h2 - a1 * a1 * a4
    h4 = a4 * h3
    margin = min(h1, h2, h3, h4)
    return StabilityVerdict(stable=bool(margin > 0), margin=float(margin))


def lyapunov_steady(drift: np.ndarray, diffusion: np.ndarray) -> CovarianceState:
    """Steady covariance from A V + V A^T + D = 0 by a direct 16x16 solve.

    Requires a stable drift (checked with is_stable).  The result is
    symmetrized and its residual verified to 1e-10 relative to |D|; a
    violation raises NumericalError with the achieved residual.
    """
    drift = np.asarray(drift, dtype=float)
    diffusion = np.asarray(diffusion, dtype=float)
    verdict = is_stable(drift)
    if not verdict.stable:
        raise InfeasibleError(
            f"drift matrix is unstable (Hurwitz margin {verdict.margin:.3g}); "
            "no steady covariance exists")
    ident = np.eye(4)
    lhs = np.kron(ident, drift) + np.kron(drift, ident)
    v = np.linalg.solve(lhs, -diffusion.reshape(16)).reshape(4, 4)
    v = (v + v.T) / 2
    scale = np.linalg.norm(diffusion)
    residual = np.linalg.norm(drift @ v + v @ drift.T + diffusion)
    if residual > _LYAPUNOV_RESIDUAL_RTOL * max(scale, 1e-300):
        raise NumericalError(
            f"Lyapunov residual {residual:.3g} exceeds tolerance "
            f"{_LYAPUNOV_RESIDUAL_RTOL:g} * {scale:.3g}")
    return CovarianceState(v=v, drift=drift, diffusion=diffusion)


def evolve_covariance(drift: np.ndarray, diffusion: np.ndarray,
                      v0: np.ndarray, t_final: float, steps: int) -> np.ndarray:
    """Integrate dV/dt = A V + V A^T + D with fixed-step classical RK4.

    Cross-check route for lyapunov_steady; deliberately independent of the
    linear-solve path.
    """
    if steps < 1:
        raise ValidationError("steps must be >= 1")
    if t_final <= 0:
        raise ValidationError("t_final must be > 0")
    a = np.asarray(drift, dtype=float)
    d = np.asarray(diffusion, dtype=float)
    v = np.asarray(v0, dtype=float).copy()
    h = t_final / steps

    def rhs(m):
        return a @ m + m @ a.T + d

    for _ in range(steps):
        k1 = rhs(v)
        k2 = rhs(v + 0.5 * h * k1)
        k3 = rhs(v + 0.5 * h * k2)
        k4 = rhs(v + h * k3)
        v = v + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return v


def exact_phonon(state: CovarianceState | np.ndarray) -> float:
    """Mechanical occupation from the covariance: (V_33 + V_44 - 1) / 2.

    Values below -1e-9 indicate an unphysical covariance and raise
    ValidationError; tiny negative round-off is clipped to 0.
    """
    v = state.v if isinstance(state, CovarianceState) else np.asarray(state)
    n_b = (v[2, 2] + v[3, 3] - 1.0) / 2.0
    if n_b < _PHYSICALITY_FLOOR:
        raise ValidationError(
            f"covariance gives negative phonon number {n_b:.3g}")
    return float(max(n_b, 0.0))


def physicality_defect(v: np.ndarray) -> float:
    """Minimum eigenvalue of V + i Omega / 2 (>= -1e-9 for a physical state).

    Diagnostic only; uses a Hermitian eigensolver, which is acceptable off
    the main solver path.
    """
    h = np.asarray(v, dtype=float) + 0.5j * SYMPLECTIC_FORM
    return float(np.linalg.eigvalsh(h).min())
