"""Weak-coupling force spectra, cooling rates, and phonon-number limits.

The mechanical mode samples the cavity noise spectrum V(omega) at +/-omega_b:
the cooling rate is gamma_minus = V(omega_b), the heating rate is
gamma_plus = V(-omega_b), and the net optical damping is their difference.
All spectra here are normalized so that the plain sideband case reads

    V_SB(omega) = g_lin^2 kappa |chi(omega)|^2,

with the cavity susceptibility chi(omega) = 1 / (kappa/2 - i (omega - delta)).
The two-photon term (coefficient xi) and a squeezed input bath (r_s, phi_s)
dress this spectrum multiplicatively; each dressing factor reduces to 1 when
its knob is switched off, so the four schemes form an exact reduction lattice
SB <- KS, SB <- SS, KS/SS <- HS.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    CoolingReport,
    EffectiveParams,
    NumericalError,
    SqueezedBathParams,
    classify,
)

__all__ = [
    "SpectrumPoint",
    "susceptibility",
    "v_sb",
    "v_ks",
    "a0_ratio",
    "a_xi_ratio",
    "v_hs",
    "spectrum",
    "rates",
]

# below this the two-photon denominator counts as a parametric divergence
_DIVERGENCE_FLOOR = 1e-14


@dataclass(frozen=True)
class SpectrumPoint:
    """One sampled point of a force spectrum (omega angular, value >= 0)."""

    omega: float
    value: float


def susceptibility(omega, eff: EffectiveParams):
    """Cavity susceptibility chi(omega) = 1 / (kappa/2 - i (omega - delta)).

    Accepts a scalar or ndarray omega; broadcasts accordingly.
    """
    return 1.0 / (eff.kappa / 2 - 1j * (np.asarray(omega) - eff.delta))


def v_sb(omega, eff: EffectiveParams):
    """Sideband-cooling spectrum g_lin^2 kappa |chi(omega)|^2."""
    chi = susceptibility(omega, eff)
    return eff.g_lin**2 * eff.kappa * np.abs(chi) ** 2


def _two_photon_denominator(omega, eff: EffectiveParams):
    xi = eff.xi
    return 1.0 - 4.0 * abs(xi) ** 2 * susceptibility(omega, eff) * np.conj(
        susceptibility(-np.asarray(omega), eff))


def v_ks(omega, eff: EffectiveParams):
    """Spectrum with the intracavity two-photon term switched on.

    V_KS(omega) = V_SB(omega) |1 - 2i xi chi(-omega)|^2
                  / |1 - 4 |xi|^2 chi(omega) chi*(-omega)|^2

    Raises NumericalError if the denominator modulus falls below 1e-14
    (parametric divergence of the linearized response).
    """
    xi = eff.xi
    if xi == 0:
        return v_sb(omega, eff)
    den = _two_photon_denominator(omega, eff)
    if np.any(np.abs(den) < _DIVERGENCE_FLOOR):
        raise NumericalError(
            f"parametric divergence: |two-photon denominator| < {_DIVERGENCE_FLOOR:g}")
    num = np.abs(1.0 - 2j * xi * susceptibility(-np.asarray(omega), eff)) ** 2
    return v_sb(omega, eff) * num / np.abs(den) ** 2


def a0_ratio(omega, eff: EffectiveParams):
    """Sideband asymmetry ratio A_0(omega) = chi(-omega) / chi*(omega).

    |A_0(omega_b)| < 1 whenever the red sideband dominates; the reflection
    identity A_0(-omega) A_0*(omega) = 1 holds for every omega.
    """
    omega = np.asarray(omega)
    return susceptibility(-omega, eff) / np.conj(susceptibility(omega, eff))


def a_xi_ratio(omega, eff: EffectiveParams):
    """Generalized asymmetry ratio in the presence of the two-photon term.

    A_xi(omega) = A_0(omega) (1 + 2i xi* chi*(omega)) / (1 - 2i xi chi(-omega)).

    Shares the reflection identity A_xi(-omega) A_xi*(omega) = 1 and reduces
    to A_0 at xi = 0.  Raises NumericalError when the denominator vanishes.
    """
    omega = np.asarray(omega)
    xi = eff.xi
    if xi == 0:
        return a0_ratio(omega, eff)
    den = 1.0 - 2j * xi * susceptibility(-omega, eff)
    if np.any(np.abs(den) < _DIVERGENCE_FLOOR):
        raise NumericalError("A_xi undefined: |1 - 2i xi chi(-omega)| < 1e-14")
    num = 1.0 + 2j * np.conj(xi) * np.conj(susceptibility(omega, eff))
    return a0_ratio(omega, eff) * num / den


def v_hs(omega, eff: EffectiveParams, bath: SqueezedBathParams | None):
    """Spectrum with both the two-photon term and a squeezed input bath.

    V_HS(omega) = V_KS(omega) |cosh r_s + A_xi(omega) e^{-2i phi_s} sinh r_s|^2.

    Evaluated through the algebraically identical expansion

        V_KS(omega) cosh^2 r_s + V_KS(-omega) sinh^2 r_s
        + 2 sinh r_s cosh r_s Re[e^{-2i phi_s} W(omega)],

    W(omega) = A_xi(omega) V_KS(omega)
             = g^2 kappa chi(omega) chi(-omega) (1 + 2i xi* chi*(omega))
               (1 - 2i xi chi(-omega))* / |1 - 4|xi|^2 chi chi*|^2,

    which uses |A_xi(omega)|^2 V_KS(omega) = V_KS(-omega) and stays finite at
    the heating null, where A_xi itself has a pole at the mirror frequency.
    bath = None or r_s = 0 reduces exactly to v_ks; additionally xi = 0
    reduces to the squeezed-bath-only spectrum over v_sb.
    """
    base = v_ks(omega, eff)
    if bath is None or bath.r_s == 0:
        return base
    omega = np.asarray(omega)
    xi = eff.xi
    chi_p = susceptibility(omega, eff)
    chi_m = susceptibility(-omega, eff)
    cross = eff.g_lin**2 * eff.kappa * chi_p * chi_m \
        * (1.0 + 2j * np.conj(xi) * np.conj(chi_p)) \
        * np.conj(1.0 - 2j * xi * chi_m)
    if xi != 0:
        cross = cross / np.abs(_two_photon_denominator(omega, eff)) ** 2
    mirror = v_ks(-omega, eff)
    ch, sh = math.cosh(bath.r_s), math.sinh(bath.r_s)
    out = (base * ch**2 + mirror * sh**2
           + 2.0 * sh * ch * np.real(np.exp(-2j * bath.phi_s) * cross))
    return np.maximum(out, 0.0)


def spectrum(omegas, eff: EffectiveParams,
             bath: SqueezedBathParams | None = None) -> list[SpectrumPoint]:
    """Sample v_hs on a frequency grid, returning SpectrumPoint rows."""
    values = np.atleast_1d(v_hs(np.asarray(omegas, dtype=float), eff, bath))
    return [SpectrumPoint(float(w), float(v))
            for w, v in zip(np.atleast_1d(omegas), values)]


def rates(eff: EffectiveParams,
          bath: SqueezedBathParams | None = None) -> CoolingReport:
    """Cooling budget at the mechanical sidebands.

    Evaluates gamma_minus = V(omega_b), gamma_plus = V(-omega_b) for the
    scheme selected by (xi, r_s), then

        n_c = n_th gamma_b / net_rate      (thermal-limited)
        n_q = gamma_plus / net_rate        (quantum-limited)
        n_b = n_c + n_q                    (additive form)
        n_b_full = (gamma_b n_th + gamma_plus) / (gamma_b + net_rate)

    With net_rate <= 0 the additive fields are NaN and cooling is False;
    n_b_full additionally requires gamma_b + net_rate > 0.
    """
    gamma_minus = float(v_hs(eff.omega_b, eff, bath))
    gamma_plus = float(v_hs(-eff.omega_b, eff, bath))
    net = gamma_minus - gamma_plus
    cooling = net > 0
    if cooling:
        n_c = eff.n_th * eff.gamma_b / net
        n_q = gamma_plus / net
        n_b = n_c + n_q
    else:
        n_c = n_q = n_b = math.nan
    if eff.gamma_b + net > 0:
        n_b_full = (eff.gamma_b * eff.n_th + gamma_plus) / (eff.gamma_b + net)
    else:
        n_b_full = math.nan
    return CoolingReport(
        gamma_minus=gamma_minus,
        gamma_plus=gamma_plus,
        net_rate=net,
        n_c=n_c,
        n_q=n_q,
        n_b=n_b,
        n_b_full=n_b_full,
        cooling=cooling,
        scheme=classify(eff.xi, bath.r_s if bath is not None else 0.0),
    )
