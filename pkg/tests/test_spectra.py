"""Spectrum identities, closed-form checks, and the scheme-reduction lattice.

Expected numbers are either evaluated from independent closed forms inside
the test or frozen from a direct evaluation of the defining expressions.
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from kerrcool.model import EffectiveParams, NumericalError, Scheme, SqueezedBathParams
from kerrcool.optimum import xi_ks
from kerrcool.spectra import (
    a0_ratio,
    a_xi_ratio,
    rates,
    spectrum,
    susceptibility,
    v_hs,
    v_ks,
    v_sb,
)


def eff_at(kappa_over_4wb, *, xi=0j, g_lin=1.0, gamma_b=1e-5, n_th=0.0,
           omega_b=1.0):
    kappa = 4.0 * kappa_over_4wb * omega_b
    delta = math.sqrt(kappa**2 / 4 + omega_b**2)  # optimal detuning
    return EffectiveParams(delta=delta, kappa=kappa, g_lin=g_lin, xi=xi,
                           omega_b=omega_b, gamma_b=gamma_b, n_th=n_th)


def random_eff(rng, *, with_xi=True):
    omega_b = 1.0
    kappa = float(rng.uniform(0.2, 40.0))
    delta = float(rng.uniform(-2.0, 2.0) + math.sqrt(kappa**2 / 4 + 1.0))
    if with_xi:
        # keep |xi| inside the parametric stability disk
        rho = 0.5 * math.sqrt(delta**2 + kappa**2 / 4)
        xi = rho * float(rng.uniform(0.0, 0.9)) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    else:
        xi = 0j
    return EffectiveParams(delta=delta, kappa=kappa, g_lin=1.0, xi=complex(xi),
                           omega_b=omega_b, gamma_b=1e-4, n_th=0.0)


def test_susceptibility_closed_form():
    eff = eff_at(1.0)
    w = 0.37
    expected = 1.0 / (eff.kappa / 2 - 1j * (w - eff.delta))
    assert complex(susceptibility(w, eff)) == pytest.approx(expected, rel=1e-15)


def test_v_sb_peaks_at_the_detuning():
    eff = eff_at(1.0)
    # |chi| is maximal at omega = delta, value 2/kappa
    assert float(v_sb(eff.delta, eff)) == pytest.approx(
        eff.g_lin**2 * eff.kappa * (2 / eff.kappa) ** 2, rel=1e-14)


@pytest.mark.parametrize("k4", [0.1, 1.0, 10.0, 100.0])
def test_ks_null_at_the_closed_form_coefficient(k4):
    eff = eff_at(k4)
    eff = replace(eff, xi=xi_ks(eff))
    ratio = float(v_ks(-1.0, eff)) / float(v_ks(1.0, eff))
    assert ratio < 1e-12


@pytest.mark.parametrize("k4,expected", [
    # (delta + omega_b) / (2 omega_b) at the optimal detuning, evaluated
    # independently from the closed form below
    (0.1, 1.0099019513592786),
    (1.0, 1.618033988749895),
    (10.0, 10.512492197250394),
    (100.0, 100.5012499921876),
])
def test_ks_rate_equals_sb_cooling_rate(k4, expected):
    eff = eff_at(k4)
    eff_ks = replace(eff, xi=xi_ks(eff))
    rep_ks = rates(eff_ks)
    rep_sb = rates(eff)
    assert rep_ks.net_rate == pytest.approx(rep_sb.gamma_minus, rel=1e-12)
    enhancement = rep_ks.net_rate / rep_sb.net_rate
    assert enhancement == pytest.approx(expected, rel=1e-12)
    closed = (eff.delta + eff.omega_b) / (2 * eff.omega_b)
    assert enhancement == pytest.approx(closed, rel=1e-12)


def test_reflection_identities_hold_pointwise():
    rng = np.random.default_rng(11)
    for _ in range(50):
        eff = random_eff(rng)
        w = float(rng.uniform(-5, 5))
        a0 = complex(a0_ratio(w, eff)) * np.conj(complex(a0_ratio(-w, eff)))
        assert a0 == pytest.approx(1.0, rel=1e-12)
        try:
            ax = complex(a_xi_ratio(w, eff)) * np.conj(complex(a_xi_ratio(-w, eff)))
        except NumericalError:
            continue
        assert ax == pytest.approx(1.0, rel=1e-10)


def test_mirror_identity_ties_both_sidebands():
    # |A_xi(w)|^2 V_KS(w) = V_KS(-w)
    rng = np.random.default_rng(12)
    for _ in range(50):
        eff = random_eff(rng)
        w = float(rng.uniform(-5, 5))
        try:
            lhs = abs(complex(a_xi_ratio(w, eff))) ** 2 * float(v_ks(w, eff))
        except NumericalError:
            continue
        assert lhs == pytest.approx(float(v_ks(-w, eff)), rel=1e-10)


def test_reduction_lattice_pointwise():
    rng = np.random.default_rng(13)
    omegas = rng.uniform(-8, 8, size=1000)
    eff = random_eff(rng)
    eff0 = replace(eff, xi=0j)
    bath = SqueezedBathParams(r_s=0.8, phi_s=1.1)
    vacuum = SqueezedBathParams(r_s=0.0, phi_s=0.0)
    v_full = np.asarray(v_hs(omegas, eff, bath))
    np.testing.assert_allclose(np.asarray(v_hs(omegas, eff, vacuum)),
                               np.asarray(v_ks(omegas, eff)), rtol=1e-13)
    np.testing.assert_allclose(np.asarray(v_hs(omegas, eff, None)),
                               np.asarray(v_ks(omegas, eff)), rtol=1e-13)
    np.testing.assert_allclose(np.asarray(v_ks(omegas, eff0)),
                               np.asarray(v_sb(omegas, eff0)), rtol=1e-13)
    # xi = 0 with a bath reduces to the squeezed-bath dressing of v_sb
    direct_ss = np.asarray(v_sb(omegas, eff0)) * np.abs(
        math.cosh(bath.r_s)
        + np.asarray(a0_ratio(omegas, eff0)) * np.exp(-2j * bath.phi_s)
        * math.sinh(bath.r_s)) ** 2
    np.testing.assert_allclose(np.asarray(v_hs(omegas, eff0, bath)),
                               direct_ss, rtol=1e-12)
    assert np.all(v_full >= 0)


def test_v_hs_matches_the_product_form_away_from_the_pole():
    rng = np.random.default_rng(14)
    worst = 0.0
    for _ in range(200):
        eff = random_eff(rng)
        bath = SqueezedBathParams(r_s=float(rng.uniform(0, 1.5)),
                                  phi_s=float(rng.uniform(0, 2 * np.pi)))
        w = float(rng.uniform(-5, 5))
        try:
            product = float(v_ks(w, eff)) * abs(
                math.cosh(bath.r_s)
                + complex(a_xi_ratio(w, eff)) * np.exp(-2j * bath.phi_s)
                * math.sinh(bath.r_s)) ** 2
        except NumericalError:
            continue
        value = float(v_hs(w, eff, bath))
        scale = max(product, 1e-300)
        worst = max(worst, abs(value - product) / scale)
    assert worst < 1e-9


def test_v_hs_is_finite_where_the_ratio_form_diverges():
    # at xi = xi_ks the asymmetry ratio has a pole at -omega_b, but the
    # spectrum itself stays finite there
    eff = eff_at(10.0)
    eff = replace(eff, xi=xi_ks(eff))
    with pytest.raises(NumericalError):
        a_xi_ratio(-1.0, eff)
    bath = SqueezedBathParams(r_s=0.4, phi_s=0.3)
    value = float(v_hs(-1.0, eff, bath))
    assert math.isfinite(value) and value >= 0


def test_rates_reports_consistent_occupations():
    eff = eff_at(10.0, n_th=50.0, gamma_b=1e-5)
    rep = rates(eff)
    assert rep.scheme is Scheme.SB
    assert rep.cooling
    assert rep.n_b == pytest.approx(rep.n_c + rep.n_q, rel=1e-12)
    full = (eff.gamma_b * eff.n_th + rep.gamma_plus) / (eff.gamma_b + rep.net_rate)
    assert rep.n_b_full == pytest.approx(full, rel=1e-12)


def test_rates_flags_net_heating_with_nan():
    # blue detuning pumps the mechanical mode
    eff = EffectiveParams(delta=-math.sqrt(401.0), kappa=40.0, g_lin=1.0,
                          xi=0j, omega_b=1.0, gamma_b=1e-5, n_th=0.0)
    rep = rates(eff)
    assert not rep.cooling
    assert math.isnan(rep.n_b)


def test_spectrum_grid_wraps_v_hs():
    eff = eff_at(1.0)
    pts = spectrum([-1.0, 0.0, 1.0], eff)
    assert [p.omega for p in pts] == [-1.0, 0.0, 1.0]
    assert pts[2].value == pytest.approx(float(v_sb(1.0, eff)), rel=1e-14)


def test_parametric_divergence_raises():
    eff = eff_at(1.0)
    # |xi| exactly on the two-photon resonance circle at omega = 0 makes the
    # denominator vanish there
    chi0 = complex(susceptibility(0.0, eff))
    bad = replace(eff, xi=complex(1.0 / (2 * abs(chi0)), 0.0))
    with pytest.raises(NumericalError, match="divergence"):
        v_ks(0.0, bad)
