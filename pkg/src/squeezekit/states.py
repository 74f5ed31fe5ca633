"""Gaussian states over bosonic modes and their elementary transformations.

A state is specified by a mean vector, a symmetric covariance matrix and a
mean-spin contrast factor.  Quadratures are ordered (X, P) per mode, the
first mode is always the atomic mode, any further modes are light modes.
Units: hbar = 1, [X, P] = i, so a coherent/vacuum state has variance 1/2
per quadrature.

All operations are pure functions returning new states; states are never
mutated in place and can be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

VACUUM_VAR = 0.5

SYMPLECTIC_TOL = 1e-10
PSD_TOL = 1e-12
HEISENBERG_TOL = 1e-9

ATOM = "A"


class ModeError(ValueError):
    """Unknown mode label, or an operation aimed at the wrong mode kind."""


class UncertaintyViolation(RuntimeError):
    """A covariance matrix dropped below the Heisenberg floor.

    Raised by the invariant checks; signals an implementation bug (or a
    deliberately unphysical channel), never a user input error.
    """


def symplectic_form(num_modes: int) -> np.ndarray:
    """Standard symplectic form Omega = diag([[0,1],[-1,0]], ...)."""
    omega = np.zeros((2 * num_modes, 2 * num_modes))
    for k in range(num_modes):
        omega[2 * k, 2 * k + 1] = 1.0
        omega[2 * k + 1, 2 * k] = -1.0
    return omega


def _symmetrize(mat: np.ndarray) -> np.ndarray:
    return 0.5 * (mat + mat.T)


@dataclass(frozen=True)
class GaussianState:
    """Immutable Gaussian state: mode labels, mean, covariance, contrast.

    ``contrast`` is the mean-spin reduction factor f = <J_x>/(N_A/2); it is
    1 until a decay channel has acted and only ever shrinks.
    """

    mode_labels: tuple[str, ...]
    mean: np.ndarray
    cov: np.ndarray
    contrast: float = 1.0

    @property
    def num_modes(self) -> int:
        return len(self.mode_labels)

    @property
    def light_modes(self) -> tuple[str, ...]:
        return self.mode_labels[1:]

    def mode_index(self, label: str) -> int:
        try:
            return self.mode_labels.index(label)
        except ValueError:
            raise ModeError(f"no mode {label!r} in state with modes {self.mode_labels}") from None

    def quad_slice(self, label: str) -> slice:
        k = self.mode_index(label)
        return slice(2 * k, 2 * k + 2)

    @property
    def atom_block(self) -> np.ndarray:
        """2x2 covariance block of the atomic mode."""
        return self.cov[:2, :2]

    def symplectic_eigenvalues(self) -> np.ndarray:
        """Symplectic spectrum of the covariance matrix (ascending).

        Physical states have all values >= 1/2 in these units.
        """
        omega = symplectic_form(self.num_modes)
        ev = np.linalg.eigvals(omega @ self.cov)
        return np.sort(np.abs(ev))[::2]

    def is_physical(self, tol: float = HEISENBERG_TOL) -> bool:
        return bool(self.symplectic_eigenvalues().min() >= VACUUM_VAR - tol)

    def check_physical(self, tol: float = HEISENBERG_TOL, context: str = "") -> None:
        nu = self.symplectic_eigenvalues().min()
        if nu < VACUUM_VAR - tol:
            where = f" ({context})" if context else ""
            raise UncertaintyViolation(
                f"symplectic eigenvalue {nu:.12g} below vacuum floor {VACUUM_VAR}{where}"
            )


@dataclass(frozen=True)
class SymplecticMap:
    """Linear phase-space map x -> S x + d with S symplectic."""

    S: np.ndarray
    d: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        S = np.asarray(self.S, dtype=float)
        d = np.zeros(S.shape[0]) if self.d is None else np.asarray(self.d, dtype=float)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "d", d)
        if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
            raise ValueError(f"S must be square with even dimension, got {S.shape}")
        if d.shape != (S.shape[0],):
            raise ValueError("displacement length does not match S")
        omega = symplectic_form(S.shape[0] // 2)
        defect = np.max(np.abs(S @ omega @ S.T - omega))
        if defect > SYMPLECTIC_TOL:
            raise ValueError(f"matrix is not symplectic (defect {defect:.3e})")

    @property
    def dim(self) -> int:
        return self.S.shape[0]


@dataclass(frozen=True)
class NoiseChannel:
    """Gaussian channel cov -> G cov G^T + N, mean -> G mean.

    ``contrast_factor`` multiplies the state's mean-spin contrast; it is 1
    for channels that do not touch the atomic polarization.
    """

    G: np.ndarray
    N: np.ndarray
    contrast_factor: float = 1.0

    def __post_init__(self):
        G = np.asarray(self.G, dtype=float)
        N = _symmetrize(np.asarray(self.N, dtype=float))
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "N", N)
        if G.shape != N.shape or G.ndim != 2 or G.shape[0] != G.shape[1]:
            raise ValueError("G and N must be square matrices of equal shape")
        if not 0.0 < self.contrast_factor <= 1.0:
            raise ValueError(f"contrast_factor must be in (0, 1], got {self.contrast_factor}")
        wmin = np.linalg.eigvalsh(N).min()
        if wmin < -PSD_TOL:
            raise ValueError(f"noise matrix not PSD (eigenvalue {wmin:.3e})")

    @property
    def dim(self) -> int:
        return self.G.shape[0]


def _fresh_labels(num_light_modes: int, start: int = 1) -> tuple[str, ...]:
    return (ATOM,) + tuple(f"L{k}" for k in range(start, start + num_light_modes))


def new_state(num_light_modes: int = 0) -> GaussianState:
    """Vacuum/coherent state: one atom mode plus ``num_light_modes`` light modes."""
    if num_light_modes < 0:
        raise ValueError("num_light_modes must be >= 0")
    m = 1 + num_light_modes
    return GaussianState(
        mode_labels=_fresh_labels(num_light_modes),
        mean=np.zeros(2 * m),
        cov=VACUUM_VAR * np.eye(2 * m),
        contrast=1.0,
    )


def apply_symplectic(state: GaussianState, smap: SymplecticMap) -> GaussianState:
    """cov -> S cov S^T, mean -> S mean + d; contrast unchanged."""
    if smap.dim != 2 * state.num_modes:
        raise ValueError(
            f"map dimension {smap.dim} does not match state dimension {2 * state.num_modes}"
        )
    return replace(
        state,
        mean=smap.S @ state.mean + smap.d,
        cov=_symmetrize(smap.S @ state.cov @ smap.S.T),
    )


def apply_channel(state: GaussianState, ch: NoiseChannel) -> GaussianState:
    """cov -> G cov G^T + N, mean -> G mean, contrast -> contrast * factor."""
    if ch.dim != 2 * state.num_modes:
        raise ValueError(
            f"channel dimension {ch.dim} does not match state dimension {2 * state.num_modes}"
        )
    return replace(
        state,
        mean=ch.G @ state.mean,
        cov=_symmetrize(ch.G @ state.cov @ ch.G.T + ch.N),
        contrast=state.contrast * ch.contrast_factor,
    )


def attach_vacuum(state: GaussianState) -> GaussianState:
    """Append one light mode in the vacuum state, uncorrelated with the rest."""
    m = state.num_modes
    mean = np.concatenate([state.mean, np.zeros(2)])
    cov = np.zeros((2 * m + 2, 2 * m + 2))
    cov[: 2 * m, : 2 * m] = state.cov
    cov[2 * m, 2 * m] = VACUUM_VAR
    cov[2 * m + 1, 2 * m + 1] = VACUUM_VAR
    # label counter continues past any modes consumed earlier in the run
    used = [int(lbl[1:]) for lbl in state.mode_labels[1:] if lbl[:1] == "L" and lbl[1:].isdigit()]
    nxt = max(used, default=0) + 1
    while f"L{nxt}" in state.mode_labels:
        nxt += 1
    return GaussianState(
        mode_labels=state.mode_labels + (f"L{nxt}",),
        mean=mean,
        cov=cov,
        contrast=state.contrast,
    )


def trace_out(state: GaussianState, mode: str) -> GaussianState:
    """Discard a light mode (delete its rows/columns of cov and mean)."""
    if mode == ATOM or state.mode_index(mode) == 0:
        raise ModeError("cannot trace out the atom mode")
    k = state.mode_index(mode)
    keep = [i for i in range(2 * state.num_modes) if i not in (2 * k, 2 * k + 1)]
    return GaussianState(
        mode_labels=tuple(l for l in state.mode_labels if l != mode),
        mean=state.mean[keep],
        cov=state.cov[np.ix_(keep, keep)],
        contrast=state.contrast,
    )


def homodyne_condition(
    state: GaussianState,
    mode: str,
    angle: float,
    extra_noise_var: float = 0.0,
) -> tuple[GaussianState, float]:
    """Measure cos(angle)*X + sin(angle)*P of a light mode and condition on it.

    The remaining covariance receives the Schur-complement update
    cov' = cov - c c^T / V_m, where c is the cross-covariance of the measured
    quadrature with all quadratures and V_m its variance plus the detector
    noise ``extra_noise_var`` * (1/2).  The measured mode is removed.  The
    conditional mean is kept at its feedback-cancelled value (outcomes are
    not sampled; the Gaussian conditional covariance is outcome independent).

    Returns the conditioned state and V_m (shot noise = 1/2 in these units).
    """
    if extra_noise_var < 0:
        raise ValueError("extra_noise_var must be >= 0")
    k = state.mode_index(mode)
    if k == 0:
        raise ModeError("cannot homodyne the atom mode")
    h = np.zeros(2 * state.num_modes)
    h[2 * k] = np.cos(angle)
    h[2 * k + 1] = np.sin(angle)
    c = state.cov @ h
    v_meas = float(h @ c) + extra_noise_var * VACUUM_VAR
    if v_meas <= 0:
        raise ValueError(f"degenerate measurement: variance {v_meas:.3e} <= 0")
    cov = state.cov - np.outer(c, c) / v_meas
    conditioned = replace(state, cov=_symmetrize(cov))
    return trace_out(conditioned, mode), v_meas


def min_variance(state: GaussianState) -> tuple[float, float]:
    """Smallest atom-quadrature variance and its angle from the X_A axis.

    Closed-form 2x2 eigendecomposition of the atom covariance block.  The
    angle is reported in [0, pi); an isotropic block returns angle 0.
    """
    blk = state.atom_block
    a, b, c = blk[0, 0], blk[0, 1], blk[1, 1]
    return _min_eig_2x2(a, b, c)


def _min_eig_2x2(a: float, b: float, c: float) -> tuple[float, float]:
    half_gap = np.hypot(0.5 * (a - c), b)
    lam = 0.5 * (a + c) - half_gap
    if half_gap <= 1e-14 * max(abs(a), abs(c), 1.0):
        return float(lam), 0.0
    if abs(b) > 1e-14 * half_gap:
        theta = np.arctan2(lam - a, b)
    else:
        theta = 0.0 if a <= c else 0.5 * np.pi
    return float(lam), float(np.mod(theta, np.pi))
