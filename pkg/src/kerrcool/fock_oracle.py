"""Truncated Fock-space master equation as an independent oracle.

Builds the dense Liouvillian of the effective linearized model on a product
Fock basis (cavity x mechanics, column-stacked vectorization) and solves for
the steady density matrix by replacing one row of the generator with the
trace constraint.  The squeezed cavity input enters through the standard
broadband-squeezed-reservoir dissipator

    kappa (N_s + 1) D[a] + kappa N_s D[a^dag]
    - kappa M_s (a^dag . a^dag - {a^dag a^dag, .}/2)
    - kappa M_s* (a . a - {a a, .}/2)

with N_s = sinh^2 r_s and M_s = e^{-2i phi_s} sinh r_s cosh r_s, which for a
quadratic Hamiltonian reproduces the Gaussian covariance flow exactly; the
mechanical bath is the usual thermal pair gamma_b (n_th + 1) D[b] +
gamma_b n_th D[b^dag].  Everything here is dense linear algebra on purpose:
the truncation guard keeps the product dimension at or below 64, where a
direct solve is fast and has no iterative-convergence failure modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    EffectiveParams,
    NumericalError,
    SqueezedBathParams,
    ValidationError,
)

__all__ = [
    "TruncationSpec",
    "destroy",
    "hamiltonian",
    "liouvillian",
    "steady_density",
    "mode_occupations",
    "quadrature_covariance",
    "tail_populations",
]

_MAX_PRODUCT_DIM = 64
_STEADY_RTOL = 1e-9
_POSITIVITY_FLOOR = -1e-9


@dataclass(frozen=True)
class TruncationSpec:
    """Fock-space truncation: dims >= 2 each, product dimension <= 64."""

    dim_cavity: int
    dim_mech: int

    def __post_init__(self):
        if self.dim_cavity < 2 or self.dim_mech < 2:
            raise ValidationError("truncation dims must be >= 2")
        if self.dim_cavity * self.dim_mech > _MAX_PRODUCT_DIM:
            raise ValidationError(
                f"product dimension {self.dim_cavity * self.dim_mech} exceeds "
                f"{_MAX_PRODUCT_DIM}")

    @property
    def dim(self) -> int:
        return self.dim_cavity * self.dim_mech


def destroy(dim: int) -> np.ndarray:
    """Annihilation operator on a dim-dimensional Fock space."""
    return np.diag(np.sqrt(np.arange(1, dim)), 1).astype(complex)


def _mode_operators(trunc: TruncationSpec) -> tuple[np.ndarray, np.ndarray]:
    a = np.kron(destroy(trunc.dim_cavity), np.eye(trunc.dim_mech))
    b = np.kron(np.eye(trunc.dim_cavity), destroy(trunc.dim_mech))
    return a, b


def hamiltonian(eff: EffectiveParams, trunc: TruncationSpec) -> np.ndarray:
    """H = delta a^dag a + omega_b b^dag b + g (a + a^dag)(b + b^dag)
    + xi a^dag a^dag + xi* a a on the truncated product space."""
    a, b = _mode_operators(trunc)
    ad, bd = a.conj().T, b.conj().T
    h = (eff.delta * ad @ a + eff.omega_b * bd @ b
         + eff.g_lin * (a + ad) @ (b + bd)
         + eff.xi * ad @ ad + np.conj(eff.xi) * a @ a)
    return h


def _dissipator(c: np.ndarray) -> np.ndarray:
    # vec(X rho Y) = (Y^T kron X) vec(rho), column stacking
    cd = c.conj().T
    cdc = cd @ c
    ident = np.eye(c.shape[0])
    return (np.kron(c.conj(), c)
            - 0.5 * np.kron(ident, cdc)
            - 0.5 * np.kron(cdc.T, ident))


def _pair_term(c: np.ndarray) -> np.ndarray:
    # c rho c - (c^2 rho + rho c^2)/2, the anomalous squeezed-bath piece
    c2 = c @ c
    ident = np.eye(c.shape[0])
    return (np.kron(c.T, c)
            - 0.5 * np.kron(ident, c2)
            - 0.5 * np.kron(c2.T, ident))


def liouvillian(eff: EffectiveParams, trunc: TruncationSpec,
                bath: SqueezedBathParams | None = None,
                cavity_occupation: float = 0.0) -> np.ndarray:
    """Dense generator L with d vec(rho)/dt = L vec(rho)."""
    if bath is not None:
        n_s, m_s = bath.n_s, complex(bath.m_s)
    else:
        if cavity_occupation < 0:
            raise ValidationError("cavity_occupation must be >= 0")
        n_s, m_s = cavity_occupation, 0.0 + 0.0j
    a, b = _mode_operators(trunc)
    ad, bd = a.conj().T, b.conj().T
    h = hamiltonian(eff, trunc)
    ident = np.eye(trunc.dim)
    lind = -1j * (np.kron(ident, h) - np.kron(h.T, ident))
    lind += eff.kappa * (n_s + 1.0) * _dissipator(a)
    if n_s:
        lind += eff.kappa * n_s * _dissipator(ad)
    if m_s != 0:
        lind -= eff.kappa * m_s * _pair_term(ad)
        lind -= eff.kappa * np.conj(m_s) * _pair_term(a)
    lind += eff.gamma_b * (eff.n_th + 1.0) * _dissipator(b)
    if eff.n_th:
        lind += eff.gamma_b * eff.n_th * _dissipator(bd)
    return lind


def steady_density(lind: np.ndarray) -> np.ndarray:
    """Steady rho of the generator via trace-row replacement.

    Checks the null-space residual (1e-9 relative to the generator norm),
    Hermitizes, and verifies positivity down to -1e-9; violations raise
    NumericalError.
    """
    dim2 = lind.shape[0]
    dim = int(round(math.sqrt(dim2)))
    if dim * dim != dim2:
        raise ValidationError("liouvillian is not square over a product space")
    sys = lind.copy()
    trace_row = np.zeros(dim2, dtype=complex)
    trace_row[np.arange(dim) * dim + np.arange(dim)] = 1.0
    sys[0, :] = trace_row
    rhs = np.zeros(dim2, dtype=complex)
    rhs[0] = 1.0
    try:
        vec = np.linalg.solve(sys, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"steady-state solve failed: {exc}") from exc
    scale = np.linalg.norm(lind, ord=np.inf) * np.linalg.norm(vec)
    residual = np.linalg.norm(lind @ vec)
    if residual > _STEADY_RTOL * max(scale, 1e-300):
        raise NumericalError(
            f"steady-state residual {residual:.3g} exceeds "
            f"{_STEADY_RTOL:g} * {scale:.3g}")
    rho = vec.reshape(dim, dim, order="F")
    rho = (rho + rho.conj().T) / 2
    eigs = np.linalg.eigvalsh(rho)
    if eigs.min() < _POSITIVITY_FLOOR:
        raise NumericalError(
            f"steady density has negative eigenvalue {eigs.min():.3g}")
    return rho


def _expect(op: np.ndarray, rho: np.ndarray) -> complex:
    return complex(np.trace(op @ rho))


def mode_occupations(rho: np.ndarray,
                     trunc: TruncationSpec) -> tuple[float, float]:
    """(cavity, mechanical) occupations of a density matrix."""
    a, b = _mode_operators(trunc)
    n_a = _expect(a.conj().T @ a, rho).real
    n_b = _expect(b.conj().T @ b, rho).real
    return float(n_a), float(n_b)


def quadrature_covariance(rho: np.ndarray, trunc: TruncationSpec) -> np.ndarray:
    """Symmetrized 4x4 covariance of (x_a, p_a, x_b, p_b) from rho.

    First moments are subtracted, so the result compares directly with the
    Gaussian layer's Lyapunov solution.
    """
    a, b = _mode_operators(trunc)
    quads = [
        (a + a.conj().T) / math.sqrt(2),
        (a - a.conj().T) / (1j * math.sqrt(2)),
        (b + b.conj().T) / math.sqrt(2),
        (b - b.conj().T) / (1j * math.sqrt(2)),
    ]
    means = [_expect(q, rho).real for q in quads]
    v = np.empty((4, 4))
    for i in range(4):
        for j in range(i, 4):
            sym = 0.5 * _expect(quads[i] @ quads[j] + quads[j] @ quads[i], rho).real
            v[i, j] = v[j, i] = sym - means[i] * means[j]
    return v


def tail_populations(rho: np.ndarray,
                     trunc: TruncationSpec) -> tuple[float, float]:
    """Population of the highest cavity and mechanical Fock levels.

    Both should stay below ~1e-6 for a trustworthy truncation.
    """
    pops = np.real(np.diag(rho)).reshape(trunc.dim_cavity, trunc.dim_mech)
    return float(pops[-1, :].sum()), float(pops[:, -1].sum())
