import numpy as np
import pytest

from squeezekit.states import GaussianState, VACUUM_VAR


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


def random_symplectic_2x2(rng, max_squeeze: float = 1.5) -> np.ndarray:
    """Random 2x2 symplectic: rotation * squeeze * rotation."""

    def rot(a):
        c, s = np.cos(a), np.sin(a)
        return np.array([[c, -s], [s, c]])

    r = rng.uniform(-max_squeeze, max_squeeze)
    sq = np.diag([np.exp(r), np.exp(-r)])
    return rot(rng.uniform(-np.pi, np.pi)) @ sq @ rot(rng.uniform(-np.pi, np.pi))


def random_physical_cov(rng, num_modes: int, mixed: bool = True) -> np.ndarray:
    """Random physical covariance: symplectic on vacuum plus optional classical noise."""
    dim = 2 * num_modes
    S = np.eye(dim)
    # a few random two-mode mixers and single-mode squeezers
    for _ in range(3):
        local = np.eye(dim)
        k = rng.integers(0, num_modes)
        local[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = random_symplectic_2x2(rng)
        S = local @ S
        if num_modes > 1:
            a, b = rng.choice(num_modes, size=2, replace=False)
            theta = rng.uniform(0, 2 * np.pi)
            bs = np.eye(dim)
            c, s = np.cos(theta), np.sin(theta)
            for off in (0, 1):
                bs[2 * a + off, 2 * a + off] = c
                bs[2 * b + off, 2 * b + off] = c
                bs[2 * a + off, 2 * b + off] = s
                bs[2 * b + off, 2 * a + off] = -s
            S = bs @ S
    cov = VACUUM_VAR * S @ S.T
    if mixed:
        w = rng.normal(size=(dim, dim)) * rng.uniform(0, 0.4)
        cov = cov + w @ w.T * 0.1
    return 0.5 * (cov + cov.T)


def random_state(rng, num_light_modes: int = 0, mixed: bool = True) -> GaussianState:
    m = 1 + num_light_modes
    labels = ("A",) + tuple(f"L{k}" for k in range(1, num_light_modes + 1))
    return GaussianState(
        mode_labels=labels,
        mean=rng.normal(size=2 * m),
        cov=random_physical_cov(rng, m, mixed=mixed),
        contrast=float(rng.uniform(0.2, 1.0)),
    )
