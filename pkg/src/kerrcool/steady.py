"""Mean-field steady states of the full three-mode model and the adiabatic
elimination of the magnon mode.

The classical fixed points solve

    0 = -(i delta_a' + kappa_a/2) a - i J m - i epsilon_d
    0 = -(i (delta_m - K |m|^2) + kappa_m/2) m - i J a
    0 = -(i omega_b + gamma_b/2) b - i g_0 |a|^2

with delta_a' = delta_a + g_0 (b + b*).  Eliminating a and b reduces the
system to a single real polynomial in n_m = |m|^2 (degree <= 9; a cubic when
g_0 = 0, recovering Kerr bistability).  The solver enumerates candidates from
that polynomial, augments them with a damped fixed-point iteration on the
occupation pair (16 logarithmically spaced seeds, damping 0.5) so no route
depends on a single heuristic, polishes every candidate with a damped Newton
iteration on the six real unknowns, and deduplicates.  Each returned root
carries its verified residual norm.

Adiabatic elimination of the magnon then yields the effective linearized
cavity parameters: with Delta_m = delta_m - 2 K n_m, K_m = K m^2 and
eta = J^2 / (Delta_m^2 + kappa_m^2/4 - |K_m|^2),

    delta  = Delta_a - eta Delta_m,   kappa = kappa_a + eta kappa_m,
    xi     = -eta K_m / 2,            g_lin = g_0 a.

The cavity frame is rotated so g_lin = g_0 |a| is real and nonnegative; the
same rotation multiplies xi by exp(-2i arg a).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial import polynomial as npoly

from .model import (
    EffectiveParams,
    FullSystemParams,
    InfeasibleError,
    NumericalError,
    ValidationError,
)

__all__ = [
    "SteadyState",
    "AdiabaticMap",
    "solve_steady",
    "eliminate",
    "residual_norm",
]

_FP_SEEDS = 16
_FP_DAMPING = 0.5
_FP_BUDGET = 10_000
_NEWTON_MAX_ITER = 60
_RESIDUAL_RTOL = 1e-12


@dataclass(frozen=True)
class SteadyState:
    """One mean-field fixed point (a_s, m_s, b_s) with its residual norm."""

    a_s: complex
    m_s: complex
    b_s: complex
    residual: float


@dataclass(frozen=True)
class AdiabaticMap:
    """Quantities entering the magnon elimination at a given fixed point.

    delta_a and delta_m are the mechanically and Kerr shifted detunings,
    k_m = K m_s^2 the two-magnon coefficient (unrotated frame), and eta the
    hybridization weight J^2 / (delta_m^2 + kappa_m^2/4 - |k_m|^2); eta = 0
    iff J = 0 (decoupled magnon).
    """

    delta_a: float
    delta_m: float
    k_m: complex
    eta: float


def residual_norm(params: FullSystemParams, a: complex, m: complex,
                  b: complex) -> float:
    """Euclidean norm of the three mean-field equations at (a, m, b)."""
    return float(np.linalg.norm(_residual(params, np.array([a, m, b]))))


def _residual(p: FullSystemParams, amb: np.ndarray) -> np.ndarray:
    a, m, b = amb
    delta_a_eff = p.delta_a + p.g_0 * 2.0 * b.real
    f1 = -(1j * delta_a_eff + p.kappa_a / 2) * a - 1j * p.j_coupling * m \
        - 1j * p.epsilon_d
    f2 = -(1j * (p.delta_m - p.kerr * abs(m) ** 2) + p.kappa_m / 2) * m \
        - 1j * p.j_coupling * a
    f3 = -(1j * p.omega_b + p.gamma_b / 2) * b - 1j * p.g_0 * abs(a) ** 2
    return np.array([f1, f2, f3])


def _rescaled(p: FullSystemParams) -> tuple[FullSystemParams, float]:
    # time rescale keeps the polynomial and Newton steps well conditioned
    s = max(p.kappa_a, p.kappa_m, p.omega_b, abs(p.delta_a), abs(p.delta_m),
            p.j_coupling, p.g_0, abs(p.epsilon_d), 1.0)
    scaled = replace(
        p, delta_a=p.delta_a / s, kappa_a=p.kappa_a / s, omega_b=p.omega_b / s,
        gamma_b=p.gamma_b / s, g_0=p.g_0 / s, delta_m=p.delta_m / s,
        kappa_m=p.kappa_m / s, kerr=p.kerr / s, j_coupling=p.j_coupling / s,
        epsilon_d=p.epsilon_d / s)
    return scaled, s


def _radiation_pressure_coeff(p: FullSystemParams) -> float:
    # delta_a' = delta_a - c n_a through the static mechanical displacement
    return 2.0 * p.g_0**2 * p.omega_b / (p.omega_b**2 + p.gamma_b**2 / 4)


def _kerr_free_scale(p: FullSystemParams) -> tuple[float, float]:
    """Occupations (n_a, n_m) of the K = 0, g_0 = 0 linear system."""
    mat = np.array([
        [1j * p.delta_a + p.kappa_a / 2, 1j * p.j_coupling],
        [1j * p.j_coupling, 1j * p.delta_m + p.kappa_m / 2],
    ])
    rhs = np.array([-1j * p.epsilon_d, 0.0])
    try:
        a0, m0 = np.linalg.solve(mat, rhs)
    except np.linalg.LinAlgError:
        n_a = (2.0 * p.epsilon_d / p.kappa_a) ** 2
        return n_a, 4.0 * p.j_coupling**2 * n_a / p.kappa_m**2
    return abs(a0) ** 2, abs(m0) ** 2


def _amplitudes_from_nm(p: FullSystemParams, n_m: float, c: float):
    """Rebuild (a, m, b) from a magnon occupation candidate (J > 0)."""
    dtm = p.delta_m - p.kerr * n_m
    q = 1j * dtm + p.kappa_m / 2
    n_a = n_m * (dtm * dtm + p.kappa_m**2 / 4) / p.j_coupling**2
    delta_a_eff = p.delta_a - c * n_a
    denom = 1j * delta_a_eff + p.kappa_a / 2 + p.j_coupling**2 / q
    a = -1j * p.epsilon_d / denom
    m = -1j * p.j_coupling * a / q
    b = -1j * p.g_0 * abs(a) ** 2 / (1j * p.omega_b + p.gamma_b / 2)
    return np.array([a, m, b])


def _amplitudes_from_na(p: FullSystemParams, n_a: float, c: float):
    """Rebuild (a, 0, b) when the magnon is decoupled (J = 0)."""
    delta_a_eff = p.delta_a - c * n_a
    a = -1j * p.epsilon_d / (1j * delta_a_eff + p.kappa_a / 2)
    b = -1j * p.g_0 * abs(a) ** 2 / (1j * p.omega_b + p.gamma_b / 2)
    return np.array([a, 0.0 + 0.0j, b])


def _occupation_polynomial(p: FullSystemParams, n_ref: float) -> np.ndarray:
    """Coefficients (lowest first) of the polynomial in nu = n_m / n_ref.

    Built by eliminating a and b:  n_m |(i delta_a' + kappa_a/2) q + J^2|^2
    = J^2 epsilon_d^2 with q = i (delta_m - K n_m) + kappa_m/2 and the
    radiation-pressure shift delta_a' = delta_a - c n_a(n_m).  Degree 9 in
    general, 3 when g_0 = 0.
    """
    c = _radiation_pressure_coeff(p)
    j2 = p.j_coupling**2
    dtm = np.array([p.delta_m, -p.kerr * n_ref])          # delta_m - K n_m
    big_p = npoly.polyadd(npoly.polymul(dtm, dtm),
                          [p.kappa_m**2 / 4])             # |q|^2
    n_a = npoly.polymul([0.0, n_ref / j2], big_p)
    delta_eff = npoly.polysub([p.delta_a], c * n_a)
    t1 = npoly.polysub([p.kappa_a * p.kappa_m / 4 + j2],
                       npoly.polymul(delta_eff, dtm))
    t2 = npoly.polyadd(p.kappa_m / 2 * delta_eff, p.kappa_a / 2 * dtm)
    lhs = npoly.polymul([0.0, n_ref],
                        npoly.polyadd(npoly.polymul(t1, t1),
                                      npoly.polymul(t2, t2)))
    return npoly.polysub(lhs, [j2 * p.epsilon_d**2])


def _cavity_polynomial(p: FullSystemParams, n_ref: float) -> np.ndarray:
    """J = 0 variant: polynomial in nu = n_a / n_ref (optomechanical cubic)."""
    c = _radiation_pressure_coeff(p)
    delta_eff = np.array([p.delta_a, -c * n_ref])
    mod2 = npoly.polyadd(npoly.polymul(delta_eff, delta_eff),
                         [p.kappa_a**2 / 4])
    return npoly.polysub(npoly.polymul([0.0, n_ref], mod2), [p.epsilon_d**2])


def _real_nonnegative_roots(coeffs: np.ndarray) -> list[float]:
    coeffs = np.asarray(coeffs, dtype=float)
    mask = np.abs(coeffs) > 0
    if not mask.any():
        return []
    top = int(np.nonzero(mask)[0].max())
    coeffs = coeffs[:top + 1]
    if top == 0:
        return []
    coeffs = coeffs / np.abs(coeffs).max()
    roots = np.roots(coeffs[::-1])
    out = []
    for r in roots:
        if abs(r.imag) <= 1e-8 * max(1.0, abs(r.real)) and r.real > -1e-12:
            out.append(max(float(r.real), 0.0))
    return out


def _newton(p: FullSystemParams, start: np.ndarray, tol: float):
    """Damped Newton on the six real unknowns; returns (amb, resnorm) or None."""
    x = np.concatenate([start.real, start.imag]).astype(float)

    def unpack(v):
        return v[:3] + 1j * v[3:]

    def fvec(v):
        f = _residual(p, unpack(v))
        return np.concatenate([f.real, f.imag])

    f = fvec(x)
    fn = np.linalg.norm(f)
    for _ in range(_NEWTON_MAX_ITER):
        if fn < tol:
            break
        jac = np.empty((6, 6))
        for k in range(6):
            h = 1e-7 * (1.0 + abs(x[k]))
            xp = x.copy()
            xp[k] += h
            jac[:, k] = (fvec(xp) - f) / h
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        for _ in range(25):
            xn = x + lam * step
            f_new = fvec(xn)
            fn_new = np.linalg.norm(f_new)
            if fn_new < fn:
                x, f, fn = xn, f_new, fn_new
                break
            lam /= 2
        else:
            break
    if fn < tol:
        return unpack(x), float(fn)
    return None


def _fixed_point_candidates(p: FullSystemParams, c: float,
                            occ_scale: float) -> list[np.ndarray]:
    """Damped fixed-point iteration on the driving occupation.

    The iterated scalar is n_m when the magnon is coupled, n_a otherwise;
    seeds are 16 logarithmically spaced multiples of occ_scale.
    """
    magnon = p.j_coupling > 0

    def step(occ: float) -> tuple[np.ndarray, float]:
        state = (_amplitudes_from_nm(p, occ, c) if magnon
                 else _amplitudes_from_na(p, occ, c))
        return state, abs(state[1 if magnon else 0]) ** 2

    out = []
    for occ in np.logspace(-8, 1, _FP_SEEDS) * max(occ_scale, 1e-30):
        state = None
        for _ in range(_FP_BUDGET):
            state, target = step(occ)
            nxt = (1 - _FP_DAMPING) * occ + _FP_DAMPING * target
            if abs(nxt - occ) <= 1e-13 * (1.0 + abs(occ)):
                break
            occ = nxt
        if state is not None and np.all(np.isfinite(
                np.concatenate([state.real, state.imag]))):
            out.append(state)
    return out


def solve_steady(params: FullSystemParams) -> list[SteadyState]:
    """All mean-field fixed points, sorted by |m_s|^2 ascending.

    Residual tolerance is 1e-12 relative to epsilon_d (absolute for an
    undriven system).  Raises NumericalError, reporting the best achieved
    residual, if no candidate can be polished below tolerance.
    """
    sp, s = _rescaled(params)
    tol = _RESIDUAL_RTOL * (sp.epsilon_d if sp.epsilon_d > 0 else 1.0)

    if sp.epsilon_d == 0:
        zero = np.zeros(3, dtype=complex)
        res = float(np.linalg.norm(_residual(params, zero)))
        return [SteadyState(0j, 0j, 0j, res)]

    c = _radiation_pressure_coeff(sp)
    n_a0, n_m0 = _kerr_free_scale(sp)

    candidates: list[np.ndarray] = []
    if sp.j_coupling > 0:
        n_ref = max(n_m0, 1e-30)
        for nu in _real_nonnegative_roots(_occupation_polynomial(sp, n_ref)):
            candidates.append(_amplitudes_from_nm(sp, nu * n_ref, c))
    else:
        n_ref = max(n_a0, 1e-30)
        for nu in _real_nonnegative_roots(_cavity_polynomial(sp, n_ref)):
            candidates.append(_amplitudes_from_na(sp, nu * n_ref, c))
    candidates.extend(_fixed_point_candidates(
        sp, c, n_m0 if sp.j_coupling > 0 else n_a0))

    best_fail = math.inf
    polished: list[np.ndarray] = []
    for cand in candidates:
        got = _newton(sp, cand, tol)
        if got is None:
            best_fail = min(best_fail,
                            float(np.linalg.norm(_residual(sp, cand))))
            continue
        amb, _ = got
        scale = 1.0 + np.abs(amb).max()
        if not any(np.abs(amb - q).max() <= 1e-8 * scale for q in polished):
            polished.append(amb)
    if not polished:
        raise NumericalError(
            f"steady-state solver did not converge; best residual {best_fail:.3g} "
            f"(tolerance {tol:.3g})")

    polished.sort(key=lambda q: abs(q[1]) ** 2)
    return [
        SteadyState(complex(a), complex(m), complex(b),
                    residual_norm(params, a, m, b))
        for a, m, b in polished
    ]


def eliminate(params: FullSystemParams,
              root: SteadyState) -> tuple[AdiabaticMap, EffectiveParams]:
    """Adiabatic elimination of the magnon at one fixed point.

    Returns the elimination bookkeeping and the effective linearized
    parameters.  The cavity frame is rotated so the linearized coupling is
    real and nonnegative, which multiplies the two-photon coefficient by
    exp(-2i arg a_s).  Raises InfeasibleError when the elimination
    denominator delta_m_shifted^2 + kappa_m^2/4 - |K_m|^2 is not positive.
    """
    a_s, m_s, b_s = root.a_s, root.m_s, root.b_s
    delta_a = params.delta_a + params.g_0 * 2.0 * b_s.real
    delta_m = params.delta_m - 2.0 * params.kerr * abs(m_s) ** 2
    k_m = params.kerr * m_s * m_s
    if params.j_coupling == 0:
        eta = 0.0
    else:
        denom = delta_m**2 + params.kappa_m**2 / 4 - abs(k_m) ** 2
        if denom <= 0:
            raise InfeasibleError(
                "adiabatic elimination invalid at this root: "
                f"delta_m^2 + kappa_m^2/4 - |K_m|^2 = {denom:.6g} <= 0")
        eta = params.j_coupling**2 / denom
    theta = math.atan2(a_s.imag, a_s.real) if a_s != 0 else 0.0
    xi = -eta * k_m * np.exp(-2j * theta) / 2.0
    amap = AdiabaticMap(delta_a=float(delta_a), delta_m=float(delta_m),
                        k_m=complex(k_m), eta=float(eta))
    eff = EffectiveParams(
        delta=float(delta_a - eta * delta_m),
        kappa=float(params.kappa_a + eta * params.kappa_m),
        g_lin=float(params.g_0 * abs(a_s)),
        xi=complex(xi),
        omega_b=params.omega_b,
        gamma_b=params.gamma_b,
        n_th=params.n_th,
    )
    return amap, eff
