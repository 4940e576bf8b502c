"""Lambda-system photon-phonon cascade: cavity-enhanced effective rates,
regime validation, single-frequency scattering amplitudes, success-
probability curves, and finite-bandwidth wavepacket averaging.

All rates are angular frequencies in a common (arbitrary) unit; the
amplitudes depend only on rate ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad


class CascadeError(ValueError):
    pass


@dataclass(frozen=True)
class EmitterRates:
    """Raw emitter-cavity and loss rates.

    g12 couples the ground-state pair through the mechanical mode; g13 and
    g23 couple the two optical transitions to the optical mode. kappa_eo /
    kappa_em are the extrinsic (waveguide) cavity decay rates, kappa_io /
    kappa_im the intrinsic losses. gamma3 is excited-state loss to
    non-guided modes, gamma2 the loss of the phonon-emitting ground state.
    """

    g12: float
    g13: float
    g23: float
    kappa_eo: float
    kappa_em: float
    kappa_io: float = 0.0
    kappa_im: float = 0.0
    gamma3: float = 0.0
    gamma2: float = 0.0

    def __post_init__(self):
        for name in ("g12", "g13", "g23", "kappa_io", "kappa_im",
                     "gamma3", "gamma2"):
            if getattr(self, name) < 0.0:
                raise CascadeError(f"{name} must be non-negative")
        if self.kappa_eo <= 0.0 or self.kappa_em <= 0.0:
            raise CascadeError("extrinsic cavity rates must be positive")


@dataclass(frozen=True)
class EffectiveRates:
    """Bad-cavity effective decay rates and the derived figures of merit."""

    Gamma12: float
    Gamma13: float
    Gamma23: float
    beta_cav: float
    C_opt: float
    C_mech: float


def effective_rates(r: EmitterRates) -> EffectiveRates:
    """Adiabatically eliminated cavity: Gamma_ij = 2 g_ij^2 / kappa_e.

    beta_cav = (Gamma13 + Gamma23) / (Gamma13 + Gamma23 + gamma3);
    C_opt = 4 (g13^2 + g23^2) / (kappa_eo * gamma3) and
    C_mech = 2 g12^2 / (kappa_em * gamma2), infinite at zero loss.
    """
    gamma12 = 2.0 * r.g12**2 / r.kappa_em
    gamma13 = 2.0 * r.g13**2 / r.kappa_eo
    gamma23 = 2.0 * r.g23**2 / r.kappa_eo
    enhanced = gamma13 + gamma23
    if enhanced == 0.0:
        beta = 0.0
    elif r.gamma3 == 0.0:
        beta = 1.0
    else:
        beta = enhanced / (enhanced + r.gamma3)
    c_opt = (
        math.inf
        if r.gamma3 == 0.0
        else 4.0 * (r.g13**2 + r.g23**2) / (r.kappa_eo * r.gamma3)
    )
    c_mech = (
        math.inf
        if r.gamma2 == 0.0
        else 2.0 * r.g12**2 / (r.kappa_em * r.gamma2)
    )
    return EffectiveRates(
        Gamma12=gamma12,
        Gamma13=gamma13,
        Gamma23=gamma23,
        beta_cav=beta,
        C_opt=c_opt,
        C_mech=c_mech,
    )


@dataclass(frozen=True)
class RegimeCheck:
    name: str
    passed: bool
    margin: float  # achieved ratio divided by the threshold factor
    detail: str


@dataclass(frozen=True)
class RegimeReport:
    checks: tuple
    threshold: float

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "threshold_factor": self.threshold,
            "all_passed": self.all_passed,
            "checks": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "margin": c.margin,
                    "detail": c.detail,
                }
                for c in self.checks
            ],
        }


def _ratio(num: float, den: float) -> float:
    if den == 0.0:
        return math.inf
    return num / den


def validate_regime(r: EmitterRates, threshold: float = 10.0) -> RegimeReport:
    """Check the operating-regime inequalities with margins; never raises.

    Over-coupled cavities (kappa_e >> kappa_i), bad cavity (kappa_e >> g),
    and large cooperativity (C >> 1), each at the given ">>" factor.
    """
    er = effective_rates(r)
    entries = [
        ("overcoupled_optical", _ratio(r.kappa_eo, r.kappa_io),
         "kappa_eo / kappa_io"),
        ("overcoupled_mechanical", _ratio(r.kappa_em, r.kappa_im),
         "kappa_em / kappa_im"),
        ("bad_cavity_optical", _ratio(r.kappa_eo, max(r.g13, r.g23)),
         "kappa_eo / max(g13, g23)"),
        ("bad_cavity_mechanical", _ratio(r.kappa_em, r.g12),
         "kappa_em / g12"),
        ("cooperativity_optical", er.C_opt, "C_opt"),
        ("cooperativity_mechanical", er.C_mech, "C_mech"),
    ]
    checks = tuple(
        RegimeCheck(
            name=name,
            passed=bool(value >= threshold),
            margin=value / threshold if math.isfinite(value) else math.inf,
            detail=detail,
        )
        for name, value, detail in entries
    )
    return RegimeReport(checks=checks, threshold=threshold)


def _denominator(delta, er: EffectiveRates, gamma3: float):
    total = er.Gamma13 + er.Gamma23 + gamma3
    if total == 0.0 and np.any(np.asarray(delta) == 0.0):
        raise CascadeError("no emitter: zero linewidth at zero detuning")
    return delta + 0.5j * total


def t_elastic(delta, er: EffectiveRates, gamma3: float):
    """Elastic (trigger-transition) scattering amplitude.

    t = (Delta - i(Gamma13 - Gamma23 - gamma3)/2)
        / (Delta + i(Gamma13 + Gamma23 + gamma3)/2).
    Accepts scalar or array detuning.
    """
    delta = np.asarray(delta, dtype=float)
    num = delta - 0.5j * (er.Gamma13 - er.Gamma23 - gamma3)
    result = num / _denominator(delta, er, gamma3)
    return complex(result) if result.ndim == 0 else result


def t_raman(delta, er: EffectiveRates, gamma3: float):
    """Raman (cascade-initiating) amplitude.

    t = -i sqrt(Gamma13 Gamma23)
        / (Delta + i(Gamma13 + Gamma23 + gamma3)/2).
    """
    delta = np.asarray(delta, dtype=float)
    num = -1.0j * math.sqrt(er.Gamma13 * er.Gamma23)
    result = num / _denominator(delta, er, gamma3)
    return complex(result) if result.ndim == 0 else result


@dataclass(frozen=True)
class ScatteringResult:
    """Amplitudes and channel probabilities at one detuning."""

    delta: float
    t_elastic: complex
    t_raman: complex

    @property
    def p_success(self) -> float:
        return abs(self.t_raman) ** 2

    @property
    def p_elastic(self) -> float:
        return abs(self.t_elastic) ** 2

    @property
    def p_loss(self) -> float:
        return 1.0 - self.p_success - self.p_elastic


def scatter(delta: float, er: EffectiveRates, gamma3: float) -> ScatteringResult:
    return ScatteringResult(
        delta=delta,
        t_elastic=t_elastic(delta, er, gamma3),
        t_raman=t_raman(delta, er, gamma3),
    )


def success_curve(
    er: EffectiveRates,
    gamma3: float,
    delta_range: tuple[float, float],
    n_samples: int,
) -> np.ndarray:
    """Sampled (Delta, p_success, p_elastic, p_loss) table over the range."""
    if n_samples < 2:
        raise CascadeError("n_samples must be >= 2")
    deltas = np.linspace(delta_range[0], delta_range[1], n_samples)
    p_cas = np.abs(t_raman(deltas, er, gamma3)) ** 2
    p_el = np.abs(t_elastic(deltas, er, gamma3)) ** 2
    return np.column_stack([deltas, p_cas, p_el, 1.0 - p_cas - p_el])


@dataclass(frozen=True)
class SpectralDensity:
    """Normalized line shape of the incident photon (FWHM ``width``)."""

    shape: str
    center: float
    width: float

    def __post_init__(self):
        if self.shape not in ("lorentzian", "gaussian"):
            raise CascadeError(f"unknown spectral shape {self.shape!r}")
        if not self.width > 0.0:
            raise CascadeError("spectral width must be positive")

    def pdf(self, delta):
        x = np.asarray(delta, dtype=float) - self.center
        if self.shape == "lorentzian":
            half = 0.5 * self.width
            return half / (math.pi * (x * x + half * half))
        sigma = self.width / (2.0 * math.sqrt(2.0 * math.log(2.0)))
        return np.exp(-0.5 * (x / sigma) ** 2) / (sigma * math.sqrt(2.0 * math.pi))


def wavepacket_success(
    spec: SpectralDensity, er: EffectiveRates, gamma3: float
) -> float:
    """Bandwidth-averaged success probability.

    P = integral |t_raman(Delta)|^2 S(Delta) dDelta by adaptive quadrature
    (relative tolerance 1e-10, split at the emitter line and the packet
    center so both peaks are resolved).
    """
    linewidth = er.Gamma13 + er.Gamma23 + gamma3

    def integrand(delta):
        return abs(t_raman(delta, er, gamma3)) ** 2 * float(spec.pdf(delta))

    span = 50.0 * (linewidth + spec.width) + abs(spec.center)
    cuts = sorted({0.0, spec.center})
    points = [-span, *cuts, span]
    total = 0.0
    for lo, hi in zip(points[:-1], points[1:]):
        if hi <= lo:
            continue
        value, err = quad(integrand, lo, hi, epsabs=0.0, epsrel=1e-10, limit=400)
        total += value
    # Lorentzian tails beyond the finite window, bounded analytically.
    tail, _ = quad(lambda d: float(spec.pdf(d)), span, math.inf,
                   epsabs=1e-14, epsrel=1e-10)
    tail2, _ = quad(lambda d: float(spec.pdf(d)), -math.inf, -span,
                    epsabs=1e-14, epsrel=1e-10)
    peak_tail = abs(t_raman(span, er, gamma3)) ** 2
    total += peak_tail * (tail + tail2)
    return float(total)


def lorentzian_overlap_success(
    spec: SpectralDensity, er: EffectiveRates, gamma3: float
) -> float:
    """Closed form for a Lorentzian packet on the Lorentzian response.

    |t_raman|^2 = Gamma13*Gamma23 / (Delta^2 + a^2) with a = linewidth/2;
    its overlap with a Lorentzian of HWHM b centered at c is
    Gamma13*Gamma23*(a+b) / (a * (c^2 + (a+b)^2)).
    """
    if spec.shape != "lorentzian":
        raise CascadeError("closed form requires a lorentzian packet")
    a = 0.5 * (er.Gamma13 + er.Gamma23 + gamma3)
    b = 0.5 * spec.width
    c = spec.center
    return er.Gamma13 * er.Gamma23 * (a + b) / (a * (c * c + (a + b) ** 2))


def rates_for_beta(beta: float, gamma3: float = 1.0) -> tuple[EffectiveRates, float]:
    """Symmetric effective rates (Gamma13 = Gamma23) realizing a given
    cavity beta factor at the given loss rate; returns (rates, gamma3).

    With beta = 1 the loss must vanish, so gamma3 is returned as 0 and the
    enhanced rates default to 1.
    """
    if not 0.0 < beta <= 1.0:
        raise CascadeError("beta must be in (0, 1]")
    if beta == 1.0:
        gamma = 1.0
        return (
            EffectiveRates(
                Gamma12=0.0, Gamma13=0.5 * gamma, Gamma23=0.5 * gamma,
                beta_cav=1.0, C_opt=math.inf, C_mech=math.inf,
            ),
            0.0,
        )
    enhanced = beta * gamma3 / (1.0 - beta)
    return (
        EffectiveRates(
            Gamma12=0.0,
            Gamma13=0.5 * enhanced,
            Gamma23=0.5 * enhanced,
            beta_cav=beta,
            C_opt=math.nan,
            C_mech=math.nan,
        ),
        gamma3,
    )


def phonon_branch_efficiency(er: EffectiveRates) -> float:
    """C_mech / (1 + C_mech): model extrapolation for the phonon emission
    branch, not a quantity with a closed form in the cascade itself."""
    if math.isinf(er.C_mech):
        return 1.0
    return er.C_mech / (1.0 + er.C_mech)
