"""Rotation optimization, decoherence sweeps, peak extraction, scaling fits."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from . import _kernels
from .channels import DecayRates, ImperfectionSettings
from .protocols import ProtocolSchedule, run_protocol
from .states import GaussianState


def optimize_rotation(
    state: GaussianState,
    next_xi_step: float,
    next_rates: DecayRates = DecayRates(),
    imp: ImperfectionSettings = ImperfectionSettings(),
    tol: float = 1e-9,
) -> float:
    """Rotation angle minimizing the atom minimum variance after the next segment.

    The objective applies rotate(phi), one eraser step of strength
    ``next_xi_step`` with imperfections ``imp``, then scattering at
    ``next_rates``, and evaluates the smaller atom-block eigenvalue.
    Derivative-free search: 64-point coarse grid over [-pi/2, pi/2] plus
    golden-section refinement to absolute tolerance ``tol``; a flat
    objective and ties return the smallest |phi| (in particular 0).
    """
    blk = state.atom_block
    eraser = _kernels.EraserKernel(
        xi=next_xi_step, eps=imp.interpass_loss, sigma2=imp.detector_noise
    )
    scatter = _kernels.ScatterKernel(next_rates)
    return _kernels.best_rotation(blk[0, 0], blk[0, 1], blk[1, 1], eraser, scatter, tol=tol)


class SweepResult(NamedTuple):
    curve: list[tuple[float, float]]
    peak_db: float
    peak_gamma_perp_tau: float


def _schedule_at_eta(base: ProtocolSchedule, eta: float) -> ProtocolSchedule:
    """Rebuild ``base`` at scattering probability eta, keeping xi = rho*eta/9."""
    total = DecayRates.from_eta(eta) if base.scattering else DecayRates()
    return replace(
        base,
        xi_total=base.rho * eta / 9.0,
        eta_total=eta,
        rates_per_segment=total.scaled(1.0 / base.n),
    )


def _point_at_eta(args: tuple[ProtocolSchedule, float]) -> tuple[float, float]:
    base, eta = args
    record = run_protocol(_schedule_at_eta(base, eta))
    return (4.0 * eta / 9.0, record.zeta_db)


def parabolic_peak(xs: list[float], ys: list[float]) -> tuple[float, float]:
    """Vertex of the quadratic through the best point and its neighbors.

    Falls back to the best grid point at the boundary or when the local
    quadratic is not concave.
    """
    i = int(np.argmax(ys))
    if i == 0 or i == len(ys) - 1:
        return xs[i], ys[i]
    x0, x1, x2 = xs[i - 1], xs[i], xs[i + 1]
    y0, y1, y2 = ys[i - 1], ys[i], ys[i + 1]
    d1 = (y1 - y0) / (x1 - x0)
    d2 = (y2 - y1) / (x2 - x1)
    curv = (d2 - d1) / (x2 - x0)
    if curv >= 0:
        return x1, y1
    xv = 0.5 * (x0 + x1 - d1 / curv)
    yv = y0 + d1 * (xv - x0) + curv * (xv - x0) * (xv - x1)
    return xv, yv


def sweep_eta(
    base: ProtocolSchedule,
    eta_grid: list[float],
    workers: int = 1,
) -> SweepResult:
    """Run ``base`` at each scattering probability and locate the peak squeezing.

    Each grid point is an independent pure run (xi = rho*eta/9, decay
    exponents rescaled from eta when the schedule includes scattering);
    points may execute in parallel processes, results keep grid order.
    Returns the (gamma_perp*tau, dB) curve and the interpolated peak.

    Covariance arithmetic in a fixed quadrature basis loses the squeezed
    eigenvalue to cancellation once the condition number reaches ~1/eps,
    so keep rho*eta/9 below roughly 22 per grid point.
    """
    if len(eta_grid) == 0:
        raise ValueError("eta grid must be nonempty")
    if any(b <= a for a, b in zip(eta_grid, eta_grid[1:])):
        raise ValueError("eta grid must be strictly increasing")
    if base.rho <= 0 and any(e > 0 for e in eta_grid):
        raise ValueError("sweep requires a schedule with rho > 0")
    tasks = [(base, float(eta)) for eta in eta_grid]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            curve = list(pool.map(_point_at_eta, tasks))
    else:
        curve = [_point_at_eta(t) for t in tasks]
    xs = [p[0] for p in curve]
    ys = [p[1] for p in curve]
    peak_x, peak_y = parabolic_peak(xs, ys)
    return SweepResult(curve=curve, peak_db=peak_y, peak_gamma_perp_tau=peak_x)


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares fit of peak squeezing versus optical density."""

    model: str
    params: tuple[float, float]
    r_squared: float
    points: tuple[tuple[float, float], ...]
    residuals: tuple[float, ...]

    def coefficients(self, base: float = math.e) -> tuple[float, float]:
        """(a, b) of zeta = (a + b log_base rho)/rho for the log model."""
        if self.model != "log_over_rho":
            raise ValueError("coefficients(base=...) applies to the log_over_rho model")
        a, b = self.params
        return a, b * math.log(base)

    def predict(self, rho: float) -> float:
        a, b = self.params
        if self.model == "log_over_rho":
            return (a + b * math.log(rho)) / rho
        return a * rho**b


def fit_scaling(points: list[tuple[float, float]], model: str = "log_over_rho") -> ScalingFit:
    """Fit peak-squeezing data to a scaling law in optical density.

    ``log_over_rho``: zeta = (a + b ln rho)/rho, fitted linearly in
    zeta*rho versus ln(rho).  ``power_law``: zeta = a rho^b, fitted
    linearly in log-log space.  R^2 is reported in the fitted (linearized)
    coordinates, residuals in the original zeta values.
    """
    if len(points) < 3:
        raise ValueError("need at least 3 points")
    rho = np.array([p[0] for p in points], dtype=float)
    zeta = np.array([p[1] for p in points], dtype=float)
    if np.any(rho <= 0) or np.any(zeta <= 0):
        raise ValueError("rho and zeta must be > 0")
    if np.ptp(rho) == 0:
        raise ValueError("singular design: all rho equal")
    if model == "log_over_rho":
        u, y = np.log(rho), zeta * rho
    elif model == "power_law":
        u, y = np.log(rho), np.log(zeta)
    else:
        raise ValueError(f"unknown model {model!r}")
    b, a = np.polyfit(u, y, 1)
    yhat = a + b * u
    ss_res = float(np.sum((y - yhat) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    if model == "log_over_rho":
        params = (float(a), float(b))
        pred = (a + b * u) / rho
    else:
        params = (float(math.exp(a)), float(b))
        pred = np.exp(a) * rho**b
    return ScalingFit(
        model=model,
        params=params,
        r_squared=r2,
        points=tuple((float(r), float(z)) for r, z in points),
        residuals=tuple(float(v) for v in (pred - zeta)),
    )


@dataclass(frozen=True)
class SimpleNoiseModel:
    """zeta ~ zeta_ideal(xi = rho*eta/9) + c*eta with noise c per scattered photon."""

    c: float
    ideal: str = "qnd"

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("c must be > 0")
        if self.ideal not in ("qnd", "qe", "pm"):
            raise ValueError("ideal must be 'qnd', 'qe' or 'pm'")


def simple_model_min(model: SimpleNoiseModel, rho: float) -> tuple[float, float]:
    """Minimum of zeta_ideal(rho*eta/9) + c*eta over eta, and its location.

    Closed forms (large-xi ideal laws): QND with zeta_ideal = 9/(rho*eta)
    gives eta* = 3/sqrt(c*rho) and zeta_min = 6 sqrt(c/rho); QE with
    81/(rho*eta)^2 gives eta* = (162/(c*rho^2))^(1/3); PM with
    exp(-rho*eta/9) gives eta* = (9/rho) ln(rho/(9c)).
    """
    if rho <= 0:
        raise ValueError("rho must be > 0")
    c = model.c
    if model.ideal == "qnd":
        eta = 3.0 / math.sqrt(c * rho)
        return 6.0 * math.sqrt(c / rho), eta
    if model.ideal == "qe":
        eta = (162.0 / (c * rho * rho)) ** (1.0 / 3.0)
        return 81.0 / (rho * eta) ** 2 + c * eta, eta
    if rho <= 9.0 * c:
        return 1.0, 0.0
    eta = 9.0 / rho * math.log(rho / (9.0 * c))
    return (9.0 * c / rho) * (1.0 + math.log(rho / (9.0 * c))), eta
