"""Protocol schedules, closed-form squeezing parameters and protocol runs.

The four protocols:

* ``qnd``  -- single Faraday pass plus polarimetry of the probe.
* ``dp``   -- double pass with the probe discarded afterwards.
* ``qe``   -- double pass with measurement-plus-feedback erasure.
* ``pm``   -- n quantum-eraser shear segments interleaved with rotations
  that phase-match the shear into a pure squeezing map.

Squeezing is quantified by the metrological parameter
zeta = N_A Var(J_min) / <J_x>^2 = (min variance / (1/2)) / contrast^2;
zeta < 1 certifies squeezing and dB = -10 log10(zeta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import _kernels
from .channels import (
    DecayRates,
    ImperfectionSettings,
    double_pass,
    eraser_step,
    faraday_pass,
    scattering_channel,
)
from .states import (
    GaussianState,
    UncertaintyViolation,
    attach_vacuum,
    homodyne_condition,
    min_variance,
    new_state,
    trace_out,
    _min_eig_2x2,
)

PROTOCOLS = ("qnd", "dp", "qe", "pm")
ROTATION_MODES = ("fixed_half_step", "optimized")

DEFAULT_SEGMENTS = 1024


def zeta_qnd(xi: float) -> float:
    """Conditional squeezing of a QND measurement: 1/(1 + xi)."""
    if xi < 0:
        raise ValueError("xi must be >= 0")
    return 1.0 / (1.0 + xi)


def zeta_dp(xi: float) -> float:
    """Optimal-quadrature squeezing after a double pass, probe discarded.

    Smaller eigenvalue of the atom covariance [[1+xi^2+2xi, xi], [xi, 1]]
    (coherent-state units), written in rationalized form; equals
    1 + (xi^2+2xi)(1/2 - sqrt(1/4 + (2+xi)^-2)) and tends to 2/xi.
    """
    if xi < 0:
        raise ValueError("xi must be >= 0")
    tr = 2.0 + xi * xi + 2.0 * xi
    det = 1.0 + 2.0 * xi
    return 2.0 * det / (tr + math.sqrt(tr * tr - 4.0 * det))


def zeta_qe(xi: float) -> float:
    """Squeezing of the pure shear left by an ideal quantum eraser.

    Smaller eigenvalue of [[1+xi^2, xi], [xi, 1]]; equals
    1 + xi^2 (1/2 - sqrt(1/4 + xi^-2)) and tends to 1/xi^2.
    """
    if xi < 0:
        raise ValueError("xi must be >= 0")
    tr = 2.0 + xi * xi
    return 2.0 / (tr + math.sqrt(tr * tr - 4.0))


def theta_min_qe(xi: float) -> float:
    """Angle of the squeezed quadrature of the pure shear: atan(2/xi)/2 + pi/2."""
    if xi <= 0:
        raise ValueError("xi must be > 0")
    return 0.5 * math.atan(2.0 / xi) + 0.5 * math.pi


def zeta_pm(xi: float) -> float:
    """Phase-matched exponential squeezing: exp(-xi)."""
    if xi < 0:
        raise ValueError("xi must be >= 0")
    return math.exp(-xi)


def squeezing_db(zeta: float) -> float:
    """Squeezing in dB, positive below projection noise: -10 log10(zeta)."""
    if zeta <= 0:
        raise ValueError(f"zeta must be > 0, got {zeta}")
    return -10.0 * math.log10(zeta)


@dataclass(frozen=True)
class ProtocolSchedule:
    """One fully specified protocol run.

    ``rates_per_segment`` are the decay exponents applied per segment (the
    total interaction budget divided by n); ``xi_total`` is likewise split
    as xi_total/n per segment.  ``rho`` and ``eta_total`` are carried for
    reporting and sweep bookkeeping; ``scattering`` records whether decay
    is included at all (sweeps rescale rates from eta only when it is).
    """

    kind: str
    xi_total: float
    n: int = 1
    rotation_mode: str = "optimized"
    imperfections: ImperfectionSettings = field(default_factory=ImperfectionSettings)
    rates_per_segment: DecayRates = field(default_factory=DecayRates)
    rho: float = 0.0
    eta_total: float = 0.0
    scattering: bool = True
    gain_mode: str = "conditioning"

    def __post_init__(self):
        if self.kind not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.kind!r}, expected one of {PROTOCOLS}")
        if self.xi_total < 0:
            raise ValueError("xi_total must be >= 0")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.kind != "pm" and self.n != 1:
            raise ValueError(f"protocol {self.kind!r} uses n = 1, got n = {self.n}")
        if self.rotation_mode not in ROTATION_MODES:
            raise ValueError(f"rotation_mode must be one of {ROTATION_MODES}")
        if self.gain_mode not in ("conditioning", "fixed_gain"):
            raise ValueError("gain_mode must be 'conditioning' or 'fixed_gain'")

    @property
    def xi_step(self) -> float:
        return self.xi_total / self.n

    @classmethod
    def from_density(
        cls,
        kind: str,
        rho: float,
        eta: float,
        n: int | None = None,
        rotation_mode: str = "optimized",
        imperfections: ImperfectionSettings | None = None,
        scattering: bool = True,
        gain_mode: str = "conditioning",
    ) -> "ProtocolSchedule":
        """Schedule from optical density rho and scattering probability eta.

        xi = rho * eta / 9; the decay exponents for the full pulse are
        gamma_par*tau = 8 eta / 9 and gamma_perp*tau = 4 eta / 9, split
        evenly over the n segments.
        """
        if rho <= 0:
            raise ValueError("rho must be > 0")
        if eta < 0:
            raise ValueError("eta must be >= 0")
        if n is None:
            n = DEFAULT_SEGMENTS if kind == "pm" else 1
        total = DecayRates.from_eta(eta) if scattering else DecayRates()
        return cls(
            kind=kind,
            xi_total=rho * eta / 9.0,
            n=n,
            rotation_mode=rotation_mode,
            imperfections=imperfections or ImperfectionSettings(),
            rates_per_segment=total.scaled(1.0 / n),
            rho=rho,
            eta_total=eta,
            scattering=scattering,
            gain_mode=gain_mode,
        )

    @classmethod
    def ideal(
        cls,
        kind: str,
        xi: float,
        n: int | None = None,
        rotation_mode: str = "optimized",
    ) -> "ProtocolSchedule":
        """Decoherence-free, imperfection-free schedule at coupling xi."""
        if n is None:
            n = DEFAULT_SEGMENTS if kind == "pm" else 1
        return cls(kind=kind, xi_total=xi, n=n, rotation_mode=rotation_mode, scattering=False)


@dataclass(frozen=True)
class SqueezingRecord:
    """Outcome of one protocol run."""

    zeta: float
    zeta_db: float
    theta_min: float
    contrast: float
    min_variance: float
    trace: tuple[tuple[float, float], ...] = ()

    def validate(self) -> None:
        if not self.zeta > 0:
            raise ValueError("zeta must be > 0")
        if not 0 < self.contrast <= 1:
            raise ValueError("contrast must be in (0, 1]")
        expected = 2.0 * self.min_variance / self.contrast**2
        if abs(self.zeta - expected) > 1e-9 * max(self.zeta, expected):
            raise ValueError("zeta is inconsistent with min_variance and contrast")

    def to_dict(self) -> dict:
        return {
            "zeta": self.zeta,
            "zeta_db": self.zeta_db,
            "theta_min": self.theta_min,
            "contrast": self.contrast,
            "min_variance": self.min_variance,
            "trace": [list(pair) for pair in self.trace],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SqueezingRecord":
        return cls(
            zeta=float(data["zeta"]),
            zeta_db=float(data["zeta_db"]),
            theta_min=float(data["theta_min"]),
            contrast=float(data["contrast"]),
            min_variance=float(data["min_variance"]),
            trace=tuple((float(a), float(b)) for a, b in data.get("trace", [])),
        )


def _record_from_atom(
    var_min: float, theta: float, contrast: float, trace: list[tuple[float, float]]
) -> SqueezingRecord:
    zeta = 2.0 * var_min / contrast**2
    return SqueezingRecord(
        zeta=zeta,
        zeta_db=squeezing_db(zeta),
        theta_min=theta,
        contrast=contrast,
        min_variance=var_min,
        trace=tuple(trace),
    )


def _finish(state: GaussianState, sched: ProtocolSchedule) -> SqueezingRecord:
    state.check_physical(context=f"{sched.kind} final state")
    var_min, theta = min_variance(state)
    accumulated = sched.n * sched.rates_per_segment.gamma_perp_tau
    zeta = 2.0 * var_min / state.contrast**2
    return _record_from_atom(var_min, theta, state.contrast, [(accumulated, squeezing_db(zeta))])


def _run_qnd(sched: ProtocolSchedule) -> SqueezingRecord:
    half = sched.rates_per_segment.scaled(0.5)
    state = attach_vacuum(new_state(0))
    mode = state.light_modes[-1]
    state = scattering_channel(state, half)
    state = faraday_pass(state, mode, sched.xi_total)
    state = scattering_channel(state, half)
    state, _ = homodyne_condition(state, mode, 0.0, sched.imperfections.detector_noise)
    return _finish(state, sched)


def _run_dp_qe(sched: ProtocolSchedule) -> SqueezingRecord:
    half = sched.rates_per_segment.scaled(0.5)
    state = attach_vacuum(new_state(0))
    mode = state.light_modes[-1]
    state = scattering_channel(state, half)
    if sched.kind == "dp":
        state = double_pass(state, mode, sched.xi_total, sched.imperfections.interpass_loss)
        state = trace_out(state, mode)
    else:
        state = eraser_step(state, mode, sched.xi_total, sched.imperfections, sched.gain_mode)
    state = scattering_channel(state, half)
    return _finish(state, sched)


def _run_pm(sched: ProtocolSchedule) -> SqueezingRecord:
    eraser = _kernels.EraserKernel(
        xi=sched.xi_step,
        eps=sched.imperfections.interpass_loss,
        sigma2=sched.imperfections.detector_noise,
        gain_mode=sched.gain_mode,
    )
    scatter = _kernels.ScatterKernel(sched.rates_per_segment)
    fixed_phi = 0.5 * sched.xi_step
    optimized = sched.rotation_mode == "optimized"

    cxx, cxp, cpp = 0.5, 0.0, 0.5
    contrast = 1.0
    accumulated = 0.0
    trace: list[tuple[float, float]] = []
    floor = (0.5 - 1e-9) ** 2
    for seg in range(sched.n):
        cxx, cxp, cpp = eraser.apply(cxx, cxp, cpp)
        if optimized:
            phi = _kernels.best_rotation(cxx, cxp, cpp, eraser, scatter)
        else:
            phi = fixed_phi
        cxx, cxp, cpp = _kernels.rotate(cxx, cxp, cpp, phi)
        cxx, cxp, cpp = scatter.apply(cxx, cxp, cpp)
        contrast *= scatter.contrast_factor
        accumulated += sched.rates_per_segment.gamma_perp_tau
        tr = cxx + cpp
        # the determinant loses ~tr^2 * eps to cancellation at strong
        # squeezing, so only flag violations that exceed that noise floor
        if cxx * cpp - cxp * cxp < floor - 1e-14 * tr * tr:
            raise UncertaintyViolation(
                f"atom covariance below Heisenberg floor at segment {seg + 1}/{sched.n}"
            )
        zeta_seg = 2.0 * _lam_min_clamped(cxx, cxp, cpp) / contrast**2
        trace.append((accumulated, squeezing_db(zeta_seg)))
    var_min, theta = _min_eig_2x2(cxx, cxp, cpp)
    var_min = max(var_min, 0.25 / (cxx + cpp))
    return _record_from_atom(var_min, theta, contrast, trace)


def _lam_min_clamped(cxx: float, cxp: float, cpp: float) -> float:
    # purity bound lam_min >= det/lam_max >= 1/(4 tr): keeps the reported
    # eigenvalue positive when float cancellation dominates at extreme
    # squeezing (condition numbers beyond ~1e14)
    return max(_kernels.lam_min(cxx, cxp, cpp), 0.25 / (cxx + cpp))


def run_protocol(sched: ProtocolSchedule) -> SqueezingRecord:
    """Run one protocol schedule and return its SqueezingRecord."""
    if sched.kind == "qnd":
        return _run_qnd(sched)
    if sched.kind in ("dp", "qe"):
        return _run_dp_qe(sched)
    return _run_pm(sched)
