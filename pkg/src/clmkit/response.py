"""Driven steady-state response and frequency sweeps.

The steady state of a lattice driven at frequency ``omega`` with uniform
damping ``gamma`` is ``psi = kappa (omega I - H + i gamma I)^-1 d``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, InvalidSpecError, ResonanceError
from .lattice import HamiltonianMatrix
from .linalg import lu_factor
from .spectral import eig, fit_line

__all__ = [
    "DriveSpec",
    "ResponseProfile",
    "SweepResult",
    "random_phase_drive",
    "steady_state",
    "frequency_sweep",
    "sweep_metrics",
    "spectral_response",
    "PIVOT_TOL",
]

PIVOT_TOL = 1e-13


@dataclass(frozen=True)
class DriveSpec:
    """Monochromatic drive: frequency, site coupling, damping and phase seed."""

    omega: float
    kappa: float = 0.2
    gamma: float = 1.9
    seed: int = 0

    def __post_init__(self):
        if self.kappa == 0:
            raise InvalidSpecError("kappa must be nonzero")
        if self.gamma < 0:
            raise InvalidSpecError("gamma must be >= 0")


@dataclass(frozen=True)
class ResponseProfile:
    """Steady-state field, its site amplitudes and the solve residual."""

    field: np.ndarray
    amplitudes: np.ndarray
    solve_residual: float

    @property
    def peak_site(self) -> int:
        """1-based site of maximal amplitude."""
        return int(np.argmax(self.amplitudes)) + 1


@dataclass(frozen=True)
class SweepResult:
    """Amplitudes over a frequency grid.

    Attributes
    ----------
    omegas : ndarray, shape (m,)
    profiles : ndarray, shape (m, n)
        ``|psi_j|`` per frequency (row) and site (column).
    peaks : ndarray of int, shape (m,)
        1-based argmax site per frequency.
    residuals : ndarray, shape (m,)
    drive : ndarray
        Drive vector shared by every frequency.
    kappa, gamma : float
    seed : int
    """

    omegas: np.ndarray
    profiles: np.ndarray
    peaks: np.ndarray
    residuals: np.ndarray
    drive: np.ndarray
    kappa: float
    gamma: float
    seed: int

    @property
    def n_sites(self) -> int:
        return self.profiles.shape[1]


def random_phase_drive(n: int, seed: int) -> np.ndarray:
    """Unit-modulus drive ``exp(i theta_j)`` with ``theta_j ~ U[0, 2 pi)``."""
    if n < 1:
        raise InvalidSpecError("drive length must be >= 1")
    theta = np.random.default_rng(seed).uniform(0.0, 2 * np.pi, n)
    return np.exp(1j * theta)


def _matrix(H) -> np.ndarray:
    return H.entries if isinstance(H, HamiltonianMatrix) else np.asarray(H, dtype=complex)


def steady_state(H, drive: DriveSpec, d=None) -> ResponseProfile:
    """Solve ``(omega I - H + i gamma I) psi = kappa d`` by pivoted LU.

    Parameters
    ----------
    H : HamiltonianMatrix or array_like
    drive : DriveSpec
    d : array_like, optional
        Drive vector; defaults to ``random_phase_drive(n, drive.seed)``.

    Raises
    ------
    ResonanceError
        If a pivot falls below ``1e-13 ||H||_F``.
    """
    a = _matrix(H)
    n = a.shape[0]
    if d is None:
        d = random_phase_drive(n, drive.seed)
    d = np.asarray(d, dtype=complex)
    if d.shape != (n,):
        raise InvalidSpecError("drive vector length mismatch")
    scale = np.linalg.norm(a)
    return _solve(a, drive.omega, drive.gamma, drive.kappa, d, scale if scale > 0 else 1.0)


def _solve(a, omega, gamma, kappa, d, scale):
    n = a.shape[0]
    m = -a.copy()
    m[np.diag_indices(n)] += omega + 1j * gamma
    f = lu_factor(m)
    thr = PIVOT_TOL * scale
    if f.min_pivot < thr:
        raise ResonanceError(omega, f.min_pivot, thr)
    rhs = kappa * d
    psi = f.solve(rhs)
    res = float(np.linalg.norm(m @ psi - rhs))
    return ResponseProfile(psi, np.abs(psi), res)


def frequency_sweep(H, omega_grid, kappa: float = 0.2, gamma: float = 1.9, seed: int = 0) -> SweepResult:
    """Steady states over ``omega_grid`` with one shared random-phase drive."""
    a = _matrix(H)
    omegas = np.asarray(omega_grid, dtype=float).ravel()
    if omegas.size == 0:
        raise InvalidSpecError("empty frequency grid")
    DriveSpec(float(omegas[0]), kappa, gamma, seed)
    d = random_phase_drive(a.shape[0], seed)
    scale = np.linalg.norm(a)
    scale = scale if scale > 0 else 1.0
    profiles = np.empty((omegas.size, a.shape[0]))
    res = np.empty(omegas.size)
    for i, w in enumerate(omegas):
        p = _solve(a, float(w), gamma, kappa, d, scale)
        profiles[i] = p.amplitudes
        res[i] = p.solve_residual
    peaks = np.argmax(profiles, axis=1) + 1
    return SweepResult(omegas, profiles, peaks, res, d, float(kappa), float(gamma), int(seed))


def _pearson(x, y) -> float:
    # constant peaks carry no frequency information; report 0
    if np.ptp(y) == 0:
        return 0.0
    return float(np.corrcoef(x, y)[0, 1])


def sweep_metrics(sweep: SweepResult, window_fraction: float = 0.05) -> dict:
    """Trap and funnel statistics of a sweep.

    Returns
    -------
    dict
        ``rainbow_slope`` and ``rainbow_r2`` (least-squares fit of peak
        site against omega), ``funnel_fraction`` (share of frequencies
        whose peak lies among the last ``ceil(window_fraction * n)``
        sites) and ``peak_omega_correlation`` (Pearson coefficient, 0 when
        the peak never moves).

    Raises
    ------
    InsufficientDataError
        Fewer than 5 frequencies or a grid with a single distinct value.
    """
    w = sweep.omegas
    if w.size < 5:
        raise InsufficientDataError("sweep metrics need at least 5 frequencies")
    if np.ptp(w) == 0:
        raise InsufficientDataError("degenerate frequency grid")
    p = sweep.peaks.astype(float)
    slope, intercept, r2 = fit_line(w, p)
    n = sweep.n_sites
    width = max(1, int(np.ceil(window_fraction * n)))
    funnel = float(np.mean(sweep.peaks > n - width))
    return {
        "rainbow_slope": slope,
        "rainbow_intercept": intercept,
        "rainbow_r2": r2,
        "funnel_fraction": funnel,
        "funnel_window": [n - width + 1, n],
        "peak_omega_correlation": _pearson(w, p),
    }


def spectral_response(H, omega: float, gamma: float, kappa: float, d) -> np.ndarray:
    """Oracle: ``kappa sum_n v_n (w_n^H d) / (omega + i gamma - lambda_n)``.

    Left eigenvectors are the rows of ``V^-1`` (so ``w_n^H v_m = delta``).
    """
    dec = eig(H)
    V = dec.vectors
    Winv = lu_factor(V).solve(np.eye(V.shape[0], dtype=complex))
    coef = (Winv @ np.asarray(d, dtype=complex)) / (omega + 1j * gamma - dec.values)
    return kappa * (V @ coef)
