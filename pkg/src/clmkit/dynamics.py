"""Time evolution under ``i d_t psi = H psi``.

For ``s_x = s_y = 1`` the continuum evolution has the closed form
``psi(x, y, t) = f(x - t, y - i t) exp(B (x + i y) t)``.  A gaussian
initial packet stays gaussian: its x-center moves with
``v0 = 1 - B / (2 alpha)``, both widths stay fixed, and the amplitude
grows as ``exp[(B - beta - B^2 / 4 alpha) t^2 + (B x0 + q_y) t]``.

The finite-difference operator used as an independent oracle has to cope
with an ill-posed direction: ``-i s_y d_y`` amplifies y-Fourier modes with
``s_y k > 0`` at rate ``k``.  Round-off in that band is removed after every
step by a one-sided spectral projection, and the x-derivative uses a
7th-order upwind stencil so grid-scale noise is damped rather than carried
into the growing half-plane.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import CoverageError, DivergenceError, InvalidSpecError, StabilityError
from .grid import Grid2D
from .lattice import SiteIndexer

__all__ = [
    "WavepacketSpec",
    "EvolutionResult",
    "GaussianPrediction",
    "Moments",
    "closed_form_evolution",
    "closed_form_wirtinger",
    "wirtinger_from_field",
    "evolution_residual",
    "gaussian_moments_predicted",
    "ContinuumOperator",
    "integrate_rk4",
    "track_moments",
    "wavepacket_grid",
    "packet_y_cutoff",
    "STABILITY_FACTOR",
]

STABILITY_FACTOR = 0.4

# 7th-order upwind first derivative for rightward advection (offset: weight)
_UPWIND7 = {-4: 3 / 420, -3: -28 / 420, -2: 126 / 420, -1: -420 / 420, 0: 105 / 420, 1: 252 / 420, 2: -42 / 420, 3: 4 / 420}
# central first derivatives, weights for offsets +1, +2, ...
_CENTRAL = {
    2: (1 / 2,),
    4: (2 / 3, -1 / 12),
    8: (4 / 5, -1 / 5, 4 / 105, -1 / 280),
}


@dataclass(frozen=True)
class WavepacketSpec:
    """Gaussian ``exp[alpha (x-x0)^2 + i qx x] exp[beta (y-y0)^2 + i qy y]``."""

    alpha: float
    beta: float
    x0: float = 0.0
    y0: float = 0.0
    qx: float = 0.0
    qy: float = 0.0

    def __post_init__(self):
        if not (self.alpha < 0 and self.beta < 0):
            raise InvalidSpecError("alpha and beta must be negative")

    def __call__(self, x, y):
        """Evaluate at (possibly complex) coordinates."""
        return np.exp(self.alpha * (x - self.x0) ** 2 + 1j * self.qx * x) * np.exp(
            self.beta * (y - self.y0) ** 2 + 1j * self.qy * y
        )

    @property
    def widths(self) -> tuple:
        """Std devs of ``|f|^2``: ``1 / sqrt(-4 alpha)``, ``1 / sqrt(-4 beta)``."""
        return (1 / np.sqrt(-4 * self.alpha), 1 / np.sqrt(-4 * self.beta))


class GaussianPrediction(NamedTuple):
    """Analytic moments of an evolved gaussian.

    ``log_amp`` is the amplitude exponent obtained by direct substitution;
    ``log_amp_alt`` adds the extra real term ``(2 alpha x0 + q_y) t``
    that appears in an alternative form of the expansion, kept for comparison.
    """

    center_x: float
    center_y: float
    width_x: float
    width_y: float
    log_amp: float
    log_amp_alt: float
    v0: float


def gaussian_moments_predicted(spec: WavepacketSpec, B: float, t: float) -> GaussianPrediction:
    """Center, widths and amplitude exponent of the evolved gaussian.

    Widths are standard deviations of ``|psi|^2``, i.e. ``1 / sqrt(-4 alpha)``
    (equivalently ``(1 / sqrt(-2 alpha)) / sqrt(2)``), and do not depend on ``t``.
    """
    a, b = spec.alpha, spec.beta
    v0 = 1 - B / (2 * a)
    quad = (B - b - B * B / (4 * a)) * t * t
    lin = (B * spec.x0 + spec.qy) * t
    wx, wy = spec.widths
    return GaussianPrediction(
        spec.x0 + v0 * t, spec.y0, wx, wy, quad + lin, quad + lin + (2 * a * spec.x0 + spec.qy) * t, v0
    )


def _reduce_signs(f0, B, s_x, s_y):
    """Map a sign variant onto ``s_x = s_y = 1`` by coordinate reflection."""
    if s_x not in (1, -1) or s_y not in (1, -1):
        raise InvalidSpecError("s_x and s_y must be +1 or -1")
    return (lambda x, y: f0(s_x * x, s_y * y)), s_x * s_y * B


def closed_form_evolution(B: float, f0, t: float, grid: Grid2D, s_x: int = 1, s_y: int = 1) -> np.ndarray:
    """Exact field at time ``t`` on ``grid`` (shape ``(ny, nx)``).

    Parameters
    ----------
    f0 : WavepacketSpec or callable
        Initial field ``f(x, y)``.  Callables must accept complex
        coordinates (entire functions such as gaussians times plane waves).
    s_x, s_y : {+1, -1}
        Sign variant; other variants are reduced to ``(1, 1)`` by reflection.

    Raises
    ------
    CoverageError
        Gaussian packet center within 6 widths of the grid edge at ``t``.
    """
    if isinstance(f0, WavepacketSpec) and (s_x, s_y) == (1, 1):
        pred = gaussian_moments_predicted(f0, B, t)
        rx, ry = 6 * pred.width_x, 6 * pred.width_y
        cx, cy = pred.center_x, pred.center_y
        if not grid.contains(cx - rx, cx + rx, cy - ry, cy + ry):
            raise CoverageError(f"packet at ({cx:.3g}, {cy:.3g}) leaves the grid at t={t}")
    X, Y = grid.mesh()
    f, Bp = _reduce_signs(f0, B, s_x, s_y)
    Xp, Yp = s_x * X, s_y * Y
    return f(Xp - t, Yp - 1j * t) * np.exp(Bp * (Xp + 1j * Yp) * t)


def wirtinger_from_field(f0) -> Callable:
    """``g(z, w)`` with ``g(z, conj z) = f(x, y)``."""
    return lambda z, w: f0((z + w) / 2, (z - w) / 2j)


def closed_form_wirtinger(B: float, g: Callable, t: float, grid: Grid2D) -> np.ndarray:
    """Closed form in complex coordinates: ``g(z, z* - 2t) exp(B z t)``."""
    X, Y = grid.mesh()
    z = X + 1j * Y
    return g(z, np.conj(z) - 2 * t) * np.exp(B * z * t)


def _continuum_rhs_fd2(psi, X, Y, h, B, s_x, s_y):
    d = np.zeros_like(psi)
    d[:, 1:-1] = (psi[:, 2:] - psi[:, :-2]) / (2 * h)
    e = np.zeros_like(psi)
    e[1:-1, :] = (psi[2:, :] - psi[:-2, :]) / (2 * h)
    return s_x * (-1j * d - B * Y * psi) + 1j * s_y * (-1j * e + B * X * psi)


def evolution_residual(B: float, f0, t: float, grid: Grid2D, dt: float = 1e-3, s_x: int = 1, s_y: int = 1) -> float:
    """Relative FD residual of ``i d_t psi - H psi`` for the closed form.

    Time derivative by a central difference of width ``2 dt``; spatial
    derivatives second-order central.  Interior nodes only.
    """
    p_plus = closed_form_evolution(B, f0, t + dt, grid, s_x, s_y)
    p_minus = closed_form_evolution(B, f0, t - dt, grid, s_x, s_y)
    psi = closed_form_evolution(B, f0, t, grid, s_x, s_y)
    X, Y = grid.mesh()
    r = 1j * (p_plus - p_minus) / (2 * dt) - _continuum_rhs_fd2(psi, X, Y, grid.h, B, s_x, s_y)
    return float(np.linalg.norm(r[1:-1, 1:-1]) / np.linalg.norm(psi[1:-1, 1:-1]))


def wavepacket_grid(spec: WavepacketSpec, B: float, T: float, nx: int = 200, ny: int = 200, h: float = 1.0) -> Grid2D:
    """Grid centered on the packet's mean trajectory over ``[0, T]``."""
    v0 = 1 - B / (2 * spec.alpha)
    return Grid2D.centered(spec.x0 + v0 * T / 2, spec.y0, nx, ny, h)


def packet_y_cutoff(spec: WavepacketSpec, B: float, T: float, margin: float = 10.0) -> float:
    """Projection cutoff that keeps the whole y-spectrum of an evolving packet.

    The y-Fourier amplitude of the exact field is ``exp[(k - k_c)^2 / 4 beta]``
    with ``k_c = q_y + (B - 2 beta) t``.  The cutoff sits ``margin sqrt(-beta)``
    above the largest ``k_c`` on ``[0, T]``, where the tail is ``exp(-margin^2 / 4)``.
    """
    drift = (B - 2 * spec.beta) * T
    return float(spec.qy + max(0.0, drift) + margin * np.sqrt(-spec.beta))


class ContinuumOperator:
    """Finite-difference continuum Hamiltonian on a uniform grid.

    Parameters
    ----------
    B : float
    grid : Grid2D
    s_x, s_y : {+1, -1}
    x_scheme : {"upwind7", "central2", "central4", "central8"}
        ``upwind7`` is biased against the advection direction ``s_x``.
    y_scheme : {"central2", "central4", "central8"}
    y_cutoff : float or None
        After each time step, y-Fourier modes with ``s_y k > y_cutoff`` are
        removed (see :meth:`project`); ``None`` disables the projection.

    Notes
    -----
    Fields are zero outside the grid (homogeneous Dirichlet padding).
    """

    def __init__(self, B, grid: Grid2D, s_x=1, s_y=1, x_scheme="upwind7", y_scheme="central8", y_cutoff=0.7):
        if s_x not in (1, -1) or s_y not in (1, -1):
            raise InvalidSpecError("s_x and s_y must be +1 or -1")
        self.B, self.grid, self.s_x, self.s_y = float(B), grid, s_x, s_y
        self._xw = self._weights(x_scheme, upwind_sign=s_x)
        self._yw = self._weights(y_scheme, upwind_sign=s_y)
        if y_scheme.startswith("upwind"):
            raise InvalidSpecError("y derivative must be central")
        self.y_cutoff = y_cutoff
        self.X, self.Y = grid.mesh()
        h = grid.h
        ky = 2 * np.pi * np.fft.fftfreq(grid.ny, h)
        self._keep = (s_y * ky <= y_cutoff)[:, None] if y_cutoff is not None else None

    @staticmethod
    def _weights(scheme, upwind_sign):
        if scheme == "upwind7":
            return {upwind_sign * o: upwind_sign * c for o, c in _UPWIND7.items()}
        try:
            order = int(scheme.replace("central", ""))
            half = _CENTRAL[order]
        except (ValueError, KeyError):
            raise InvalidSpecError(f"unknown stencil {scheme!r}") from None
        w = {}
        for i, c in enumerate(half, start=1):
            w[i], w[-i] = c, -c
        return w

    def _deriv(self, psi, weights, axis):
        m = max(abs(o) for o in weights)
        pad = [(0, 0), (0, 0)]
        pad[axis] = (m, m)
        p = np.pad(psi, pad)
        n = psi.shape[axis]
        out = np.zeros_like(psi)
        for o, c in weights.items():
            sl = [slice(None), slice(None)]
            sl[axis] = slice(m + o, m + o + n)
            out += c * p[tuple(sl)]
        return out / self.grid.h

    def apply(self, psi):
        """``H psi`` for a field of shape ``(ny, nx)``."""
        B, sx, sy = self.B, self.s_x, self.s_y
        dx = self._deriv(psi, self._xw, 1)
        dy = self._deriv(psi, self._yw, 0)
        return sx * (-1j * dx - B * self.Y * psi) + 1j * sy * (-1j * dy + B * self.X * psi)

    __call__ = apply

    def project(self, psi):
        """Remove y-Fourier content in the ill-posed band ``s_y k > y_cutoff``."""
        if self._keep is None:
            return psi
        return np.fft.ifft(np.fft.fft(psi, axis=0) * self._keep, axis=0)

    def spectral_bound(self) -> float:
        """Gershgorin bound: stencil row sums plus the largest potential."""
        h = self.grid.h
        sx = sum(abs(c) for c in self._xw.values()) / h
        sy = sum(abs(c) for c in self._yw.values()) / h
        pot = abs(self.B) * (np.max(np.abs(self.Y)) + np.max(np.abs(self.X)))
        return float(sx + sy + pot)


@dataclass(frozen=True)
class EvolutionResult:
    """Sampled evolution record.

    ``center`` and ``width`` have shape ``(m, 2)`` (NaN columns for 1D
    fields); ``log_norm`` is ``ln ||psi||`` with the grid area element.
    """

    times: np.ndarray
    center: np.ndarray
    width: np.ndarray
    log_norm: np.ndarray
    snapshots: list | None = None
    final: np.ndarray | None = None


class Moments(NamedTuple):
    center: tuple
    widths: tuple
    log_norm: float


def _coords(field, coords):
    if isinstance(coords, Grid2D):
        X, Y = coords.mesh()
        return (X, Y), coords.h ** 2
    if isinstance(coords, SiteIndexer):
        return tuple(c.reshape(field.shape) for c in coords.positions()), 1.0
    if coords is None:
        return None, 1.0
    return tuple(np.asarray(c).reshape(field.shape) for c in coords), 1.0


def track_moments(field, grid) -> Moments:
    """``|psi|^2``-weighted mean and standard deviation per axis, and ``ln ||psi||``.

    ``grid`` is a :class:`Grid2D`, a :class:`SiteIndexer` or a tuple of
    coordinate arrays.  Widths are standard deviations, so
    ``exp(alpha x^2)`` has width ``1 / sqrt(-4 alpha)``.
    """
    field = np.asarray(field)
    p = np.abs(field) ** 2
    cs, area = _coords(field, grid)
    tot = p.sum()
    if tot == 0:
        raise InvalidSpecError("moments of a zero field")
    log_norm = 0.5 * np.log(tot * area)
    if cs is None:
        return Moments((np.nan, np.nan), (np.nan, np.nan), float(log_norm))
    centers, widths = [], []
    for c in cs:
        m = np.sum(c * p) / tot
        centers.append(float(m))
        widths.append(float(np.sqrt(max(np.sum((c - m) ** 2 * p) / tot, 0.0))))
    while len(centers) < 2:
        centers.append(np.nan)
        widths.append(np.nan)
    return Moments(tuple(centers), tuple(widths), float(log_norm))


def integrate_rk4(op, psi0, dt: float, T: float, record_every: int = 1, *, coords=None, spectral_bound=None, project=None, keep_snapshots: bool = False) -> EvolutionResult:
    """Classical RK4 for ``d_t psi = -i H psi``.

    Parameters
    ----------
    op : callable or object with ``apply``
        Applies ``H``.  If it has ``spectral_bound()`` that value is used
        for the stability check unless ``spectral_bound`` is given.
    psi0 : ndarray
    dt, T : float
        Step and horizon; the step is shrunk slightly so that an integer
        number of steps lands on ``T``.
    record_every : int
        Record moments every this many steps (the final step is always
        recorded).
    coords : Grid2D, SiteIndexer or tuple, optional
        Coordinates for centers and widths.
    project : callable, optional
        Applied to the state after each step.
    keep_snapshots : bool

    Raises
    ------
    StabilityError
        ``dt > 0.4 / rho`` with ``rho`` a Gershgorin bound of ``H``.
    DivergenceError
        The state becomes non-finite.
    """
    apply = op.apply if hasattr(op, "apply") else op
    rho = spectral_bound
    if rho is None and hasattr(op, "spectral_bound"):
        rho = op.spectral_bound()
    if rho is None:
        raise StabilityError("no spectral bound available for the stability check")
    if not dt > 0 or not T > 0:
        raise InvalidSpecError("dt and T must be positive")
    if dt > STABILITY_FACTOR / rho:
        raise StabilityError(f"dt={dt} exceeds {STABILITY_FACTOR}/rho = {STABILITY_FACTOR / rho:.4g}")
    nsteps = int(np.ceil(T / dt - 1e-9))
    dt = T / nsteps
    psi = np.array(psi0, dtype=complex)
    times, cen, wid, lognorm, snaps = [], [], [], [], []

    def record(t):
        m = track_moments(psi, coords)
        times.append(t)
        cen.append(m.center)
        wid.append(m.widths)
        lognorm.append(m.log_norm)
        if keep_snapshots:
            snaps.append(psi.copy())

    record(0.0)
    f = lambda v: -1j * apply(v)
    for step in range(1, nsteps + 1):
        k1 = f(psi)
        k2 = f(psi + 0.5 * dt * k1)
        k3 = f(psi + 0.5 * dt * k2)
        k4 = f(psi + dt * k3)
        psi = psi + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if project is not None:
            psi = project(psi)
        if not np.all(np.isfinite(psi)):
            raise DivergenceError(step * dt)
        if step % record_every == 0 or step == nsteps:
            record(step * dt)
    return EvolutionResult(
        np.array(times), np.array(cen), np.array(wid), np.array(lognorm), snaps if keep_snapshots else None, psi
    )
