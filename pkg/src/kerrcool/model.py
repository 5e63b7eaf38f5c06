"""Domain types, unit conventions, validation, and the cooling-scheme taxonomy.

Every frequency, detuning, and decay rate in this package is angular (rad/s).
The command line layer converts divided-by-2pi (Hz) inputs on ingestion, so
the numerics never see mixed conventions.  Normalized studies simply pass
omega_b = 1 and quote every other rate in units of omega_b; nothing downstream
distinguishes the two cases.

Quadratures follow x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)), so a
vacuum quadrature variance is 1/2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

from scipy.constants import hbar

__all__ = [
    "ValidationError",
    "InfeasibleError",
    "NumericalError",
    "Scheme",
    "classify",
    "FullSystemParams",
    "EffectiveParams",
    "SqueezedBathParams",
    "CoolingReport",
    "validate",
    "n_th_from_temperature",
]

_ZPF_RTOL = 1e-9  # x_zpf consistency check, relative


class ValidationError(ValueError):
    """A parameter set violates one of its declared invariants."""


class InfeasibleError(RuntimeError):
    """The requested operating point cannot be realized.

    Raised for an infeasible squeezing condition, an invalid adiabatic
    elimination, or an unstable drift where a steady state is required.
    """


class NumericalError(RuntimeError):
    """A numerical routine failed to reach its accuracy target."""


class Scheme(str, Enum):
    """Cooling scheme taxonomy.

    SB: plain sideband cooling (no two-photon term, vacuum bath).
    KS: Kerr-induced two-photon (squeezing-like) term, vacuum bath.
    SS: no two-photon term, squeezed-vacuum bath.
    HS: both the two-photon term and the squeezed bath.
    """

    SB = "SB"
    KS = "KS"
    SS = "SS"
    HS = "HS"


def classify(xi: complex, r_s: float) -> Scheme:
    """Map (two-photon coefficient, bath squeezing amplitude) to a scheme.

    The classification is exact: any nonzero xi counts as Kerr-type and any
    nonzero r_s counts as a squeezed bath.
    """
    has_xi = xi != 0
    has_sq = r_s != 0
    if has_xi and has_sq:
        return Scheme.HS
    if has_xi:
        return Scheme.KS
    if has_sq:
        return Scheme.SS
    return Scheme.SB


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValidationError(message)


def _finite(x) -> bool:
    if isinstance(x, complex):
        return math.isfinite(x.real) and math.isfinite(x.imag)
    return math.isfinite(x)


@dataclass(frozen=True)
class FullSystemParams:
    """Parameters of the full three-mode model before linearization.

    The cavity mode a (drive detuning delta_a, decay kappa_a) couples to the
    mechanical mode b (frequency omega_b, damping gamma_b) by radiation
    pressure with single-photon strength g_0, and to the magnon mode m
    (detuning delta_m, decay kappa_m, self-Kerr K) with exchange strength J.
    epsilon_d is the coherent drive amplitude, taken real and nonnegative by
    phase convention.  n_th is the mechanical thermal occupation of the bath.

    x_zpf and m_eff are optional metadata (SI units).  When both are given
    they must satisfy x_zpf = sqrt(hbar / (2 m_eff omega_b)); neither enters
    any dynamical formula here.
    """

    delta_a: float
    kappa_a: float
    omega_b: float
    gamma_b: float
    g_0: float
    delta_m: float
    kappa_m: float
    kerr: float
    j_coupling: float
    epsilon_d: float
    n_th: float
    x_zpf: float | None = None
    m_eff: float | None = None

    def __post_init__(self):
        validate(self)


@dataclass(frozen=True)
class EffectiveParams:
    """Parameters of the effective linearized cavity-mechanics model.

    delta and kappa are the magnon-shifted cavity detuning and linewidth,
    g_lin is the linearized optomechanical coupling (real, >= 0 by the phase
    convention fixed in the elimination step), and xi is the complex
    coefficient of the two-photon term xi* a^2 + xi a^dag^2.
    """

    delta: float
    kappa: float
    g_lin: float
    xi: complex
    omega_b: float
    gamma_b: float
    n_th: float

    def __post_init__(self):
        object.__setattr__(self, "xi", complex(self.xi))
        validate(self)


@dataclass(frozen=True)
class SqueezedBathParams:
    """Squeezed-vacuum bath seen by the cavity.

    r_s >= 0 is the squeezing amplitude and phi_s the squeezing phase,
    normalized into [0, 2pi) on construction.  The correlators n_s and m_s
    are derived on access and therefore can never be stored inconsistently:

        n_s = sinh^2 r_s
        m_s = exp(-2i phi_s) sinh r_s cosh r_s

    so |m_s|^2 = n_s (n_s + 1) holds identically.
    """

    r_s: float
    phi_s: float = 0.0

    def __post_init__(self):
        _require(_finite(self.r_s) and _finite(self.phi_s),
                 "r_s and phi_s must be finite")
        _require(self.r_s >= 0, "r_s must be >= 0")
        object.__setattr__(self, "phi_s", self.phi_s % (2 * math.pi))

    @property
    def n_s(self) -> float:
        return math.sinh(self.r_s) ** 2

    @property
    def m_s(self) -> complex:
        return cmath.exp(-2j * self.phi_s) * math.sinh(self.r_s) * math.cosh(self.r_s)


@dataclass(frozen=True)
class CoolingReport:
    """Weak-coupling cooling budget for one operating point.

    gamma_minus and gamma_plus are the cooling and heating rates, net_rate
    their difference.  n_c is the thermal-limited and n_q the quantum-limited
    contribution; n_b = n_c + n_q is the additive final occupation and
    n_b_full = (gamma_b n_th + gamma_plus) / (gamma_b + net_rate) the
    non-additive variant that stays finite as the net rate vanishes.  When
    there is no net cooling (net_rate <= 0) the additive fields are NaN and
    cooling is False.
    """

    gamma_minus: float
    gamma_plus: float
    net_rate: float
    n_c: float
    n_q: float
    n_b: float
    n_b_full: float
    cooling: bool
    scheme: Scheme

    def __post_init__(self):
        validate(self)


def validate(params):
    """Check every invariant of a parameter object, returning it unchanged.

    Raises ValidationError naming the first violated invariant and the
    offending field.  Dataclass constructors call this, so instances that
    exist have already passed; the function remains useful for values built
    by other means (e.g. replace()) and for the command line layer.
    """
    if isinstance(params, FullSystemParams):
        return _validate_full(params)
    if isinstance(params, EffectiveParams):
        return _validate_effective(params)
    if isinstance(params, SqueezedBathParams):
        _require(params.r_s >= 0, "r_s must be >= 0")
        return params
    if isinstance(params, CoolingReport):
        return _validate_report(params)
    raise TypeError(f"no validator for {type(params).__name__}")


def _validate_full(p: FullSystemParams) -> FullSystemParams:
    for name in ("delta_a", "kappa_a", "omega_b", "gamma_b", "g_0", "delta_m",
                 "kappa_m", "kerr", "j_coupling", "epsilon_d", "n_th"):
        _require(_finite(getattr(p, name)), f"{name} must be finite")
    _require(p.omega_b > 0, "omega_b must be > 0")
    _require(p.kappa_a > 0, "kappa_a must be > 0")
    _require(p.kappa_m > 0, "kappa_m must be > 0")
    _require(p.gamma_b > 0, "gamma_b must be > 0")
    _require(p.g_0 >= 0, "g_0 must be >= 0")
    _require(p.j_coupling >= 0, "j_coupling must be >= 0")
    _require(p.epsilon_d >= 0, "epsilon_d must be >= 0")
    _require(p.n_th >= 0, "n_th must be >= 0")
    if p.x_zpf is not None:
        _require(p.x_zpf > 0, "x_zpf must be > 0")
    if p.m_eff is not None:
        _require(p.m_eff > 0, "m_eff must be > 0")
    if p.x_zpf is not None and p.m_eff is not None:
        ref = math.sqrt(hbar / (2 * p.m_eff * p.omega_b))
        _require(abs(p.x_zpf - ref) <= _ZPF_RTOL * ref,
                 "x_zpf inconsistent with m_eff and omega_b")
    return p


def _validate_effective(p: EffectiveParams) -> EffectiveParams:
    for name in ("delta", "kappa", "g_lin", "omega_b", "gamma_b", "n_th"):
        _require(_finite(getattr(p, name)), f"{name} must be finite")
    _require(_finite(p.xi), "xi must be finite")
    _require(p.kappa > 0, "kappa must be > 0")
    _require(p.omega_b > 0, "omega_b must be > 0")
    _require(p.gamma_b > 0, "gamma_b must be > 0")
    _require(p.g_lin >= 0, "g_lin must be >= 0")
    _require(p.n_th >= 0, "n_th must be >= 0")
    return p


def _validate_report(r: CoolingReport) -> CoolingReport:
    _require(r.gamma_minus >= 0, "gamma_minus must be >= 0")
    _require(r.gamma_plus >= 0, "gamma_plus must be >= 0")
    if r.cooling:
        _require(r.net_rate > 0, "cooling report requires net_rate > 0")
        _require(math.isfinite(r.n_b) and abs(r.n_b - (r.n_c + r.n_q)) <= 1e-12 * max(1.0, abs(r.n_b)),
                 "n_b must equal n_c + n_q")
    return r


def n_th_from_temperature(temperature: float, omega_b: float) -> float:
    """Bose occupation of the mechanical bath at the given temperature (K).

    omega_b is angular (rad/s).  temperature = 0 returns 0.
    """
    if temperature < 0:
        raise ValidationError("temperature must be >= 0")
    if omega_b <= 0:
        raise ValidationError("omega_b must be > 0")
    if temperature == 0:
        return 0.0
    from scipy.constants import k as k_b
    x = hbar * omega_b / (k_b * temperature)
    return 1.0 / math.expm1(x)
