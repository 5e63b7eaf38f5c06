"""Mean-field steady states against independent small-system oracles.

Each oracle is rebuilt here from scratch: the Kerr cubic for g_0 = 0, the
optomechanical cubic for J = 0, and a plain linear solve for K = 0.  None of
them share code with the solver under test.
"""

import cmath
import math

import numpy as np
import pytest

from kerrcool.model import (
    FullSystemParams,
    InfeasibleError,
    NumericalError,
)
from kerrcool.steady import SteadyState, eliminate, residual_norm, solve_steady

# three positive magnon-occupation branches; verified bistable by the cubic
# discriminant below
BISTABLE = dict(delta_a=0.5, kappa_a=1.0, omega_b=1.0, gamma_b=0.01, g_0=0.0,
                delta_m=3.0, kappa_m=0.3, kerr=0.05, j_coupling=0.8,
                epsilon_d=5.0, n_th=0.0)

MONOSTABLE = dict(delta_a=0.0, kappa_a=1.0, omega_b=1.0, gamma_b=0.01,
                  g_0=0.0, delta_m=4.0, kappa_m=0.2, kerr=0.05,
                  j_coupling=1.0, epsilon_d=4.0, n_th=0.0)

TRISTABLE_OPTO = dict(delta_a=1.0, kappa_a=2.0, omega_b=1.0, gamma_b=0.01,
                      g_0=0.003, delta_m=5.0, kappa_m=2.0, kerr=0.4,
                      j_coupling=1.0, epsilon_d=8.0, n_th=0.0)


def kerr_cubic_roots(p: FullSystemParams) -> list[float]:
    """Magnon occupations for g_0 = 0 by eliminating the cavity exactly."""
    assert p.g_0 == 0
    d = 1j * p.delta_a + p.kappa_a / 2
    sigma = p.j_coupling**2 / d
    drive = -1j * p.j_coupling * p.epsilon_d / d
    a_im = p.delta_m + sigma.imag
    a_re = p.kappa_m / 2 + sigma.real
    coeffs = [p.kerr**2, -2 * p.kerr * a_im, a_im**2 + a_re**2,
              -abs(drive) ** 2]
    out = []
    for r in np.roots(coeffs):
        if abs(r.imag) < 1e-9 * max(1.0, abs(r.real)) and r.real > -1e-12:
            out.append(float(r.real))
    return sorted(out)


def opto_cubic_roots(p: FullSystemParams) -> list[float]:
    """Cavity occupations for J = 0 with the static mechanical shift."""
    assert p.j_coupling == 0
    c = 2 * p.g_0**2 * p.omega_b / (p.omega_b**2 + p.gamma_b**2 / 4)
    coeffs = [c**2, -2 * c * p.delta_a, p.delta_a**2 + p.kappa_a**2 / 4,
              -p.epsilon_d**2]
    out = []
    for r in np.roots(coeffs):
        if abs(r.imag) < 1e-9 * max(1.0, abs(r.real)) and r.real > -1e-12:
            out.append(float(r.real))
    return sorted(out)


def test_bistable_kerr_matches_the_cubic_oracle():
    p = FullSystemParams(**BISTABLE)
    oracle = kerr_cubic_roots(p)
    assert len(oracle) == 3
    sols = solve_steady(p)
    assert len(sols) == 3
    got = [abs(s.m_s) ** 2 for s in sols]
    for g, o in zip(got, oracle):
        assert g == pytest.approx(o, rel=1e-10)
    for s in sols:
        assert s.residual < 1e-12


def test_monostable_kerr_matches_the_cubic_oracle():
    p = FullSystemParams(**MONOSTABLE)
    oracle = kerr_cubic_roots(p)
    assert len(oracle) == 1
    sols = solve_steady(p)
    assert len(sols) == 1
    assert abs(sols[0].m_s) ** 2 == pytest.approx(oracle[0], rel=1e-10)


def test_optomechanical_cubic_with_no_magnon():
    p = FullSystemParams(delta_a=-1.0, kappa_a=0.4, omega_b=1.0, gamma_b=0.01,
                         g_0=0.3, delta_m=1.0, kappa_m=1.0, kerr=0.0,
                         j_coupling=0.0, epsilon_d=0.5, n_th=0.0)
    oracle = opto_cubic_roots(p)
    sols = solve_steady(p)
    assert len(sols) == len(oracle)
    for s, o in zip(sorted(sols, key=lambda s: abs(s.a_s) ** 2), oracle):
        assert abs(s.a_s) ** 2 == pytest.approx(o, rel=1e-10)
    # magnon decouples entirely
    assert all(abs(s.m_s) < 1e-12 for s in sols)


def test_undriven_system_sits_at_the_origin():
    p = FullSystemParams(**{**BISTABLE, "epsilon_d": 0.0})
    sols = solve_steady(p)
    assert len(sols) == 1
    s = sols[0]
    assert s.a_s == 0 and s.m_s == 0 and s.b_s == 0
    assert s.residual == 0.0


def test_kerr_free_limit_agrees_with_the_linear_solve():
    p = FullSystemParams(delta_a=0.3, kappa_a=1.0, omega_b=1.0, gamma_b=0.02,
                         g_0=0.0, delta_m=2.0, kappa_m=0.5, kerr=0.0,
                         j_coupling=0.7, epsilon_d=2.0, n_th=0.0)
    # 2x2 complex linear system in (a, m)
    da = 1j * p.delta_a + p.kappa_a / 2
    dm = 1j * p.delta_m + p.kappa_m / 2
    mat = np.array([[da, 1j * p.j_coupling], [1j * p.j_coupling, dm]])
    a_lin, m_lin = np.linalg.solve(mat, [-1j * p.epsilon_d, 0.0])
    sols = solve_steady(p)
    assert len(sols) == 1
    assert sols[0].a_s == pytest.approx(a_lin, rel=1e-10)
    assert sols[0].m_s == pytest.approx(m_lin, rel=1e-10)


def test_residuals_pass_their_own_gate_on_random_draws():
    rng = np.random.default_rng(41)
    for _ in range(15):
        p = FullSystemParams(
            delta_a=float(rng.uniform(-2, 2)),
            kappa_a=float(rng.uniform(0.3, 3)),
            omega_b=1.0,
            gamma_b=float(rng.uniform(0.005, 0.1)),
            g_0=float(rng.uniform(0, 0.05)),
            delta_m=float(rng.uniform(-4, 4)),
            kappa_m=float(rng.uniform(0.2, 2)),
            kerr=float(rng.uniform(0, 0.3)),
            j_coupling=float(rng.uniform(0, 1.5)),
            epsilon_d=float(rng.uniform(0, 6)),
            n_th=0.0)
        for s in solve_steady(p):
            assert s.residual < 1e-12
            assert residual_norm(p, s.a_s, s.m_s, s.b_s) < 1e-12 * max(
                p.epsilon_d, 1.0)


def test_roots_are_sorted_by_magnon_occupation():
    sols = solve_steady(FullSystemParams(**BISTABLE))
    occ = [abs(s.m_s) ** 2 for s in sols]
    assert occ == sorted(occ)


def test_eliminate_bookkeeping_identities():
    p = FullSystemParams(**TRISTABLE_OPTO)
    sols = solve_steady(p)
    assert len(sols) == 3
    amap, eff = eliminate(p, sols[0])
    s = sols[0]
    # shifted detunings and the pair coefficient, straight from definitions
    assert amap.delta_a == pytest.approx(p.delta_a + 2 * p.g_0 * s.b_s.real,
                                         rel=1e-12)
    assert amap.delta_m == pytest.approx(
        p.delta_m - 2 * p.kerr * abs(s.m_s) ** 2, rel=1e-12)
    assert amap.k_m == pytest.approx(p.kerr * s.m_s**2, rel=1e-12)
    denom = amap.delta_m**2 + p.kappa_m**2 / 4 - abs(amap.k_m) ** 2
    assert amap.eta == pytest.approx(p.j_coupling**2 / denom, rel=1e-12)
    assert eff.kappa == pytest.approx(p.kappa_a + amap.eta * p.kappa_m,
                                      rel=1e-12)
    assert eff.delta == pytest.approx(amap.delta_a - amap.eta * amap.delta_m,
                                      rel=1e-12)
    assert eff.g_lin == pytest.approx(p.g_0 * abs(s.a_s), rel=1e-12)
    # the frame rotation keeps |xi| and applies exp(-2i arg a_s)
    expected_xi = -amap.eta * amap.k_m / 2 * cmath.exp(
        -2j * cmath.phase(s.a_s))
    assert eff.xi == pytest.approx(expected_xi, rel=1e-12)


def test_eliminate_rejects_a_resonant_magnon():
    p = FullSystemParams(delta_a=0.0, kappa_a=1.0, omega_b=1.0, gamma_b=0.01,
                         g_0=0.0, delta_m=2.0, kappa_m=0.2, kerr=1.0,
                         j_coupling=0.5, epsilon_d=1.0, n_th=0.0)
    # fabricated root whose pair coefficient overwhelms the shifted detuning:
    # delta_m - 2 K |m|^2 = 0 while |K_m| = 1
    fake = SteadyState(a_s=1.0 + 0j, m_s=1.0 + 0j, b_s=0j, residual=0.0)
    with pytest.raises(InfeasibleError, match="elimination invalid"):
        eliminate(p, fake)


def test_eliminate_with_no_exchange_coupling():
    p = FullSystemParams(delta_a=-1.0, kappa_a=0.4, omega_b=1.0,
                         gamma_b=0.01, g_0=0.3, delta_m=1.0, kappa_m=1.0,
                         kerr=0.0, j_coupling=0.0, epsilon_d=0.5, n_th=0.0)
    sols = solve_steady(p)
    amap, eff = eliminate(p, sols[0])
    assert amap.eta == 0.0
    assert eff.kappa == p.kappa_a
    assert eff.xi == 0j
