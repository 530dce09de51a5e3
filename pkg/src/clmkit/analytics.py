"""Analytic continuum-Landau-mode (CLM) machinery.

Continuum model
    ``H = s_x (-i d_x - B y) + i s_y (-i d_y + B x)`` has gaussian
    eigenstates ``C exp(-tau |r - r0|^2 + i q.r)`` with
    ``tau = -s_x s_y B / 2`` at every complex energy ``E``.

Lattice models
    A Bloch factor ``exp(i k.r)`` times a slowly varying envelope obeys a
    first-order envelope Hamiltonian.  Expanding the 2D model gives
    ``H_k = E0_k + i mu d_x + nu d_y + B y - i B x`` with
    ``E0_k = 2 (tx cos kx + i ty sin ky)``, ``mu = 2 tx sin kx`` and
    ``nu = 2 ty cos ky``.  For the chains (same Bloch convention):

    * nonreciprocal: ``E0_k = -2 i t sin k``, ``H_k = E0_k + B x + c d_x``
      with ``c = -2 t cos k``;
    * gain/loss: ``E0_k = 2 t cos k``, ``H_k = E0_k + i B x + i c d_x``
      with ``c = 2 t sin k``.

    In both chains ``tau = B / (2 c)``.
"""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .errors import CoverageError, DegenerateDriftError, InvalidSpecError, NoFieldError
from .grid import Grid2D
from .lattice import HamiltonianMatrix, SiteIndexer

__all__ = [
    "EnvelopeWarning",
    "ContinuumParams",
    "ContinuumClm",
    "Lattice2dParams",
    "ChainParams",
    "LatticeClm2d",
    "LatticeClm1d",
    "EnergyBounds",
    "LatticeSample",
    "continuum_clm",
    "sample_continuum_clm",
    "continuum_residual",
    "lattice_clm_2d",
    "lattice_clm_1d",
    "best_k_2d",
    "best_k_1d",
    "fit_lattice_clm_2d",
    "fit_lattice_clm_1d",
    "sample_lattice_clm",
    "ansatz_pointwise_error",
    "rayleigh_residual",
    "energy_bounds",
    "gaussian_pr_1d",
    "gaussian_pr_2d",
    "max_ansatz_pr_2d",
    "generalized_mode_residual",
    "dirac_zero_mode_residual",
    "descriptor_record",
    "format_record",
    "gaussian_width",
]

_Q_MAX = 0.2
_MIN_RADIUS = 3.0


class EnvelopeWarning(UserWarning):
    """The slowly-varying-envelope assumption is stretched."""


def gaussian_width(tau: float) -> float:
    """Standard deviation of ``|exp(-tau x^2)|^2``, i.e. ``1 / (2 sqrt(tau))``."""
    return 0.5 / np.sqrt(tau)


# ----------------------------------------------------------------- continuum


@dataclass(frozen=True)
class ContinuumParams:
    s_x: int = 1
    s_y: int = -1
    B: float = 0.5

    def __post_init__(self):
        if self.s_x not in (1, -1) or self.s_y not in (1, -1):
            raise InvalidSpecError("s_x and s_y must be +1 or -1")

    def e0(self, q) -> complex:
        """Free dispersion ``s_x q_x + i s_y q_y``."""
        return self.s_x * q[0] + 1j * self.s_y * q[1]


@dataclass(frozen=True)
class ContinuumClm:
    """Gaussian continuum eigenstate.

    ``C`` is the plane normalization ``sqrt(2 tau / pi)`` (NaN when not
    normalizable); sampled fields are renormalized on their grid.
    """

    params: ContinuumParams
    E: complex
    q: tuple
    r0: tuple
    tau: float
    normalizable: bool
    C: float

    def value(self, x, y):
        """Unnormalized field ``exp(-tau |r - r0|^2 + i q.r)``."""
        dx = x - self.r0[0]
        dy = y - self.r0[1]
        return np.exp(-self.tau * (dx * dx + dy * dy) + 1j * (self.q[0] * x + self.q[1] * y))


def continuum_clm(params: ContinuumParams, E: complex, q=(0.0, 0.0)) -> ContinuumClm:
    """CLM descriptor at energy ``E`` and momentum ``q``.

    Raises
    ------
    NoFieldError
        If ``B == 0``.
    """
    B = params.B
    if B == 0:
        raise NoFieldError("no continuum Landau mode at B = 0")
    q = (float(q[0]), float(q[1]))
    tau = -params.s_x * params.s_y * B / 2.0
    d = complex(E) - params.e0(q)
    r0 = (d.imag / (params.s_y * B), -d.real / (params.s_x * B))
    ok = tau > 0
    C = float(np.sqrt(2 * tau / np.pi)) if ok else float("nan")
    return ContinuumClm(params, complex(E), q, r0, float(tau), bool(ok), C)


def _default_grid(clm: ContinuumClm, h: float, margin: float = 6.0) -> Grid2D:
    half = margin / np.sqrt(clm.tau) + 2 * h
    return Grid2D.covering(clm.r0[0], clm.r0[1], half, half, h)


def sample_continuum_clm(clm: ContinuumClm, grid: Grid2D) -> np.ndarray:
    """Field on ``grid`` (shape ``(ny, nx)``), unit L2 with area element ``h^2``.

    Raises
    ------
    InvalidSpecError
        If the CLM is not normalizable.
    CoverageError
        If the grid does not reach ``r0 +- 6 / sqrt(tau)``.
    """
    if not clm.normalizable:
        raise InvalidSpecError("cannot sample a non-normalizable CLM")
    reach = 6.0 / np.sqrt(clm.tau)
    x0, y0 = clm.r0
    tol = 1e-9 * grid.h
    if not grid.contains(x0 - reach + tol, x0 + reach - tol, y0 - reach + tol, y0 + reach - tol):
        raise CoverageError(f"grid must cover r0 +- {reach:.3g}")
    X, Y = grid.mesh()
    psi = clm.value(X, Y)
    return psi / np.sqrt(np.sum(np.abs(psi) ** 2) * grid.h**2)


def _d1(f, h, axis):
    """Second-order central first derivative on interior nodes (edges zero)."""
    out = np.zeros_like(f)
    if axis == 1:
        out[:, 1:-1] = (f[:, 2:] - f[:, :-2]) / (2 * h)
    else:
        out[1:-1, :] = (f[2:, :] - f[:-2, :]) / (2 * h)
    return out


def _continuum_apply(params: ContinuumParams, psi, X, Y, h):
    sx, sy, B = params.s_x, params.s_y, params.B
    dx = _d1(psi, h, 1)
    dy = _d1(psi, h, 0)
    return sx * (-1j * dx - B * Y * psi) + 1j * sy * (-1j * dy + B * X * psi)


def _interior_ratio(r, psi):
    ri = r[1:-1, 1:-1]
    pi = psi[1:-1, 1:-1]
    return float(np.linalg.norm(ri) / np.linalg.norm(pi))


def continuum_residual(params: ContinuumParams, E, q=(0.0, 0.0), grid: Grid2D | None = None, h: float = 0.1) -> float:
    """``||H_fd psi - E psi|| / ||psi||`` on interior nodes.

    ``H_fd`` replaces both derivatives by second-order central differences,
    so the result is ``O(h^2)``.  Without ``grid`` a grid of spacing ``h``
    reaching 6 decay lengths around ``r0`` is used.
    """
    clm = continuum_clm(params, E, q)
    if grid is None:
        grid = _default_grid(clm, h)
    psi = sample_continuum_clm(clm, grid)
    X, Y = grid.mesh()
    r = _continuum_apply(params, psi, X, Y, grid.h) - clm.E * psi
    return _interior_ratio(r, psi)


# ------------------------------------------------------------------- lattice


@dataclass(frozen=True)
class Lattice2dParams:
    tx: float = 1.0
    ty: float = 1.0
    B: float = 0.3

    @classmethod
    def from_hamiltonian(cls, H: HamiltonianMatrix) -> "Lattice2dParams":
        p = H.params
        return cls(p["tx"], p["ty"], p["B"])

    def e0(self, k) -> complex:
        return 2 * (self.tx * np.cos(k[0]) + 1j * self.ty * np.sin(k[1]))


@dataclass(frozen=True)
class ChainParams:
    t: float = 1.0
    B: float = 0.05

    @classmethod
    def from_hamiltonian(cls, H: HamiltonianMatrix) -> "ChainParams":
        return cls(H.params["t"], H.params["B"])


def _e0_chain(model: str, t: float, k: float) -> complex:
    if model == "nonreciprocal":
        return -2j * t * np.sin(k)
    if model == "gainloss":
        return complex(2 * t * np.cos(k))
    raise InvalidSpecError(f"unknown chain model {model!r}")


def _drift_chain(model: str, t: float, k: float) -> float:
    return -2 * t * np.cos(k) if model == "nonreciprocal" else 2 * t * np.sin(k)


@dataclass(frozen=True)
class LatticeClm2d:
    """Gaussian envelope ansatz for the 2D lattice."""

    k: tuple
    q: tuple
    E: complex
    mu: float
    nu: float
    tau_x: float
    tau_y: float
    r0: tuple
    exists: bool
    B: float

    @property
    def widths(self) -> tuple:
        return (gaussian_width(self.tau_x), gaussian_width(self.tau_y))

    @property
    def pr(self) -> float:
        return gaussian_pr_2d(self.tau_x, self.tau_y)


@dataclass(frozen=True)
class LatticeClm1d:
    """Gaussian envelope ansatz for a chain.

    ``x0_imag`` is the imaginary part of the complex envelope center; it
    encodes the part of ``E - E0`` that the real center cannot absorb and
    appears as an extra envelope momentum ``2 tau x0_imag``.
    """

    model: str
    k: float
    q: float
    E: complex
    c: float
    tau: float
    x0: float
    exists: bool
    B: float
    x0_imag: float = 0.0

    @property
    def width(self) -> float:
        return gaussian_width(self.tau)

    @property
    def pr(self) -> float:
        return gaussian_pr_1d(self.tau)


def _guard(q, tau_values):
    if np.max(np.abs(q)) > _Q_MAX:
        warnings.warn(f"|q| > {_Q_MAX}: envelope expansion unreliable", EnvelopeWarning, stacklevel=3)
    for tau in tau_values:
        if tau > 0 and 1.0 / np.sqrt(tau) < _MIN_RADIUS:
            warnings.warn(
                f"envelope radius 1/sqrt(tau) = {1 / np.sqrt(tau):.2f} < {_MIN_RADIUS} sites",
                EnvelopeWarning,
                stacklevel=3,
            )


def lattice_clm_2d(params: Lattice2dParams, k, q=(0.0, 0.0), E: complex = 0.0) -> LatticeClm2d:
    """2D lattice CLM descriptor.

    Raises
    ------
    NoFieldError
        ``B == 0``.
    DegenerateDriftError
        ``mu_k == 0`` or ``nu_k == 0``.
    """
    B = params.B
    if B == 0:
        raise NoFieldError("no lattice CLM at B = 0")
    k = (float(k[0]), float(k[1]))
    q = (float(q[0]), float(q[1]))
    mu = 2 * params.tx * np.sin(k[0])
    nu = 2 * params.ty * np.cos(k[1])
    if abs(mu) < 1e-12 or abs(nu) < 1e-12:
        raise DegenerateDriftError(f"vanishing drift at k={k}: mu={mu:.3g}, nu={nu:.3g}")
    tau_x = -B / (2 * mu)
    tau_y = B / (2 * nu)
    d = complex(E) - params.e0((k[0] + q[0], k[1] + q[1]))
    r0 = (-d.imag / B, d.real / B)
    _guard(q, (tau_x, tau_y))
    return LatticeClm2d(k, q, complex(E), float(mu), float(nu), float(tau_x), float(tau_y), r0, bool(tau_x > 0 and tau_y > 0), float(B))


def lattice_clm_1d(params: ChainParams, model: str, k: float, q: float = 0.0, E: complex = 0.0) -> LatticeClm1d:
    """Chain CLM descriptor for ``model`` in {"nonreciprocal", "gainloss"}.

    Raises
    ------
    NoFieldError
        ``B == 0``.
    DegenerateDriftError
        Zero drift coefficient ``c``.
    """
    B = params.B
    if B == 0:
        raise NoFieldError("no lattice CLM at B = 0")
    c = _drift_chain(model, params.t, k)
    if abs(c) < 1e-12:
        raise DegenerateDriftError(f"vanishing drift at k={k}")
    tau = B / (2 * c)
    d = complex(E) - _e0_chain(model, params.t, k + q)
    z0 = d / B if model == "nonreciprocal" else d / (1j * B)
    _guard((q,), (tau,))
    return LatticeClm1d(model, float(k), float(q), complex(E), float(c), float(tau), float(z0.real), bool(tau > 0), float(B), float(z0.imag))


def best_k_2d(params: Lattice2dParams) -> tuple:
    """Momentum with the widest existing envelope: ``|mu| = 2 tx``, ``|nu| = 2 ty``."""
    kx = -np.sign(params.B * params.tx) * np.pi / 2
    ky = 0.0 if params.B * params.ty > 0 else np.pi
    return (float(kx), float(ky))


def best_k_1d(params: ChainParams, model: str) -> float:
    """Momentum with the widest existing envelope (``|c| = 2 t``)."""
    s = np.sign(params.B * params.t)
    if model == "nonreciprocal":
        return float(np.pi if s > 0 else 0.0)
    return float(s * np.pi / 2)


def fit_lattice_clm_2d(params: Lattice2dParams, E: complex, center) -> LatticeClm2d:
    """CLM whose center and energy match an observed state.

    Inverts the center law for ``E0 = E - B y0 + i B x0``, picks the
    Bloch momentum on the existing branch, and sets ``q = 0``.
    """
    B = params.B
    e0 = complex(E) - B * center[1] + 1j * B * center[0]
    cx = np.clip(e0.real / (2 * params.tx), -1.0, 1.0)
    sy = np.clip(e0.imag / (2 * params.ty), -1.0, 1.0)
    ax = float(np.arccos(cx))
    ay = float(np.arcsin(sy))
    for kx in (ax, -ax):
        for ky in (ay, np.pi - ay):
            mu = 2 * params.tx * np.sin(kx)
            nu = 2 * params.ty * np.cos(ky)
            if abs(mu) > 1e-9 and abs(nu) > 1e-9 and -B / mu > 0 and B / nu > 0:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", EnvelopeWarning)
                    clm = lattice_clm_2d(params, (kx, ky), (0.0, 0.0), E)
                return LatticeClm2d(clm.k, clm.q, clm.E, clm.mu, clm.nu, clm.tau_x, clm.tau_y, (float(center[0]), float(center[1])), clm.exists, clm.B)
    raise DegenerateDriftError(f"no existing envelope reproduces E={E}")


def fit_lattice_clm_1d(params: ChainParams, model: str, E: complex, center: float) -> LatticeClm1d:
    """Chain analogue of :func:`fit_lattice_clm_2d`."""
    t, B = params.t, params.B
    if model == "nonreciprocal":
        s = np.clip(-(complex(E) - B * center).imag / (2 * t), -1.0, 1.0)
        cands = (float(np.arcsin(s)), float(np.pi - np.arcsin(s)))
    else:
        c = np.clip((complex(E) - 1j * B * center).real / (2 * t), -1.0, 1.0)
        cands = (float(np.arccos(c)), -float(np.arccos(c)))
    for k in cands:
        cc = _drift_chain(model, t, k)
        if abs(cc) > 1e-9 and B / (2 * cc) > 0:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", EnvelopeWarning)
                return lattice_clm_1d(params, model, k, 0.0, E)
    raise DegenerateDriftError(f"no existing envelope reproduces E={E}")


class LatticeSample(NamedTuple):
    psi: np.ndarray
    warning: str | None


def sample_lattice_clm(desc, indexer: SiteIndexer) -> LatticeSample:
    """Unit-norm lattice vector of a CLM descriptor.

    Returns
    -------
    LatticeSample
        ``psi`` plus a boundary-clipping message (``None`` when the center
        sits at least 3 widths inside the lattice).

    Raises
    ------
    InvalidSpecError
        If the descriptor does not describe an existing CLM.
    """
    if not desc.exists:
        raise InvalidSpecError("CLM does not exist for this descriptor")
    pos = indexer.positions()
    half = indexer.half_extent()
    if isinstance(desc, LatticeClm2d):
        if indexer.ndim != 2:
            raise InvalidSpecError("2D descriptor needs a 2D indexer")
        x, y = pos
        K = (desc.k[0] + desc.q[0], desc.k[1] + desc.q[1])
        env = -desc.tau_x * (x - desc.r0[0]) ** 2 - desc.tau_y * (y - desc.r0[1]) ** 2
        psi = np.exp(1j * (K[0] * x + K[1] * y) + env)
        centers, widths = desc.r0, desc.widths
    else:
        if indexer.ndim != 1:
            raise InvalidSpecError("chain descriptor needs a 1D indexer")
        (x,) = pos
        z0 = desc.x0 + 1j * desc.x0_imag
        psi = np.exp(1j * (desc.k + desc.q) * x - desc.tau * (x - z0) ** 2)
        centers, widths = (desc.x0,), (desc.width,)
    msg = None
    for c, w, hlf in zip(centers, widths, half):
        if abs(c) > hlf:
            msg = f"center {c:.3g} outside lattice half-extent {hlf:.3g}"
            break
        if abs(c) + 3 * w > hlf:
            msg = f"center {c:.3g} within 3 widths ({3 * w:.3g}) of the boundary"
    return LatticeSample(psi / np.linalg.norm(psi), msg)


def ansatz_pointwise_error(psi, desc, indexer: SiteIndexer, radius: float = 2.0) -> float:
    """Max relative deviation of ``|psi|`` from the ansatz near its center.

    Both vectors are scaled to unit L2 norm; sites within ``radius``
    gaussian widths (elliptical distance) of the ansatz center count.
    """
    phi = np.abs(sample_lattice_clm(desc, indexer).psi)
    a = np.abs(np.asarray(psi))
    a = a / np.linalg.norm(a)
    pos = indexer.positions()
    if isinstance(desc, LatticeClm2d):
        wx, wy = desc.widths
        d2 = ((pos[0] - desc.r0[0]) / wx) ** 2 + ((pos[1] - desc.r0[1]) / wy) ** 2
    else:
        d2 = ((pos[0] - desc.x0) / desc.width) ** 2
    m = d2 <= radius**2
    if not np.any(m):
        raise InvalidSpecError("no sites within the comparison radius")
    return float(np.max(np.abs(a[m] - phi[m]) / phi[m]))


def rayleigh_residual(H, psi):
    """``E_est = psi^H H psi / psi^H psi`` and ``||H psi - E_est psi|| / ||psi||``."""
    a = H.entries if isinstance(H, HamiltonianMatrix) else np.asarray(H)
    psi = np.asarray(psi, dtype=complex)
    nn = np.vdot(psi, psi).real
    if nn == 0:
        raise InvalidSpecError("Rayleigh quotient of a zero vector")
    hp = a @ psi
    e = np.vdot(psi, hp) / nn
    return complex(e), float(np.linalg.norm(hp - e * psi) / np.sqrt(nn))


@dataclass(frozen=True)
class EnergyBounds:
    re_max: float
    im_max: float

    def contains(self, E, pad: float = 0.0) -> np.ndarray:
        E = np.asarray(E)
        return (np.abs(E.real) <= self.re_max + pad) & (np.abs(E.imag) <= self.im_max + pad)


def energy_bounds(model: str, B: float, *, Lx=None, Ly=None, N=None, tx=1.0, ty=1.0, t=1.0) -> EnergyBounds:
    """Box half-widths for CLM energies (``model`` is "2d", "nonreciprocal" or "gainloss")."""
    B = abs(B)
    if model == "2d":
        return EnergyBounds(B * Ly / 2 + 2 * abs(tx), B * Lx / 2 + 2 * abs(ty))
    if model == "nonreciprocal":
        return EnergyBounds(B * N / 2, 2 * abs(t))
    if model == "gainloss":
        return EnergyBounds(2 * abs(t), B * N / 2)
    raise InvalidSpecError(f"unknown model {model!r}")


def bounds_for(H: HamiltonianMatrix) -> EnergyBounds:
    """:func:`energy_bounds` from a built Hamiltonian's parameters."""
    p = H.params
    if H.model_tag.startswith("2d"):
        return energy_bounds("2d", p["B"], Lx=p["Lx"], Ly=p["Ly"], tx=p["tx"], ty=p["ty"])
    model = "nonreciprocal" if "nonreciprocal" in H.model_tag else "gainloss"
    return energy_bounds(model, p["B"], N=p["N"], t=p["t"])


def gaussian_pr_1d(tau: float) -> float:
    return float(np.sqrt(np.pi / tau))


def gaussian_pr_2d(tau_x: float, tau_y: float) -> float:
    return float(np.pi / np.sqrt(tau_x * tau_y))


def max_ansatz_pr_2d(params: Lattice2dParams, nk: int = 721):
    """Largest ansatz PR over existing CLMs on an ``nk x nk`` momentum grid.

    Returns
    -------
    pr_max : float
    mu, nu : float
        Drift coefficients at the maximizer.
    """
    ks = np.linspace(-np.pi, np.pi, nk)
    KX, KY = np.meshgrid(ks, ks)
    mu = 2 * params.tx * np.sin(KX)
    nu = 2 * params.ty * np.cos(KY)
    with np.errstate(divide="ignore", invalid="ignore"):
        tx = -params.B / (2 * mu)
        ty = params.B / (2 * nu)
        pr = np.where((tx > 0) & (ty > 0), np.pi / np.sqrt(np.abs(tx * ty)), -np.inf)
    i = np.unravel_index(np.argmax(pr), pr.shape)
    return float(pr[i]), float(mu[i]), float(nu[i])


# ------------------------------------------------ generalized-mode residuals


def generalized_mode_residual(n: int, B: float, q: float = 0.0, h: float = 0.05, extent: float | None = None) -> float:
    """FD residual of the 1D mode of ``s_y d_y - s_x B y^n``.

    The mode is ``exp(a y^(n+1) + i q y)`` with ``a = s_x s_y B / (n + 1)``
    and energy ``i s_y q``.  We take ``s_y = 1`` and ``s_x = -sign(B)`` so
    that ``a < 0`` (decaying on both sides).

    Raises
    ------
    InvalidSpecError
        ``n`` even or non-positive (no doubly decaying solution), or ``B = 0``.
    """
    if int(n) != n or n < 1 or n % 2 == 0:
        raise InvalidSpecError("n must be a positive odd integer")
    if B == 0:
        raise NoFieldError("no mode at B = 0")
    sy, sx = 1, -int(np.sign(B))
    a = sx * sy * B / (n + 1)
    if extent is None:
        extent = (36.0 / abs(a)) ** (1.0 / (n + 1)) + 4 * h
    m = int(np.ceil(extent / h))
    y = h * np.arange(-m, m + 1)
    psi = np.exp(a * y ** (n + 1) + 1j * q * y)
    E = 1j * sy * q
    d = (psi[2:] - psi[:-2]) / (2 * h)
    r = sy * d - sx * B * y[1:-1] ** n * psi[1:-1] - E * psi[1:-1]
    return float(np.linalg.norm(r) / np.linalg.norm(psi[1:-1]))


def dirac_zero_mode_residual(E: complex, B: float, q=(0.0, 0.0), h: float = 0.1, grid: Grid2D | None = None, sublattice: str | None = None) -> float:
    """Residual certifying the CLM <-> zeroth-Landau-level map.

    The CLM at energy ``E`` is displaced by ``d = (-Im E / (s_y B),
    Re E / (s_x B))``; the displaced field must be a zero mode of the Dirac
    block.  Sublattice ``"B"`` uses ``(s_x, s_y) = (1, -1)`` and needs
    ``B > 0``; sublattice ``"A"`` uses ``(1, 1)`` and needs ``B < 0``.

    Raises
    ------
    InvalidSpecError
        Requested sublattice has no normalizable zero mode at this ``B``.
    """
    if B == 0:
        raise NoFieldError("no zero modes at B = 0")
    if sublattice is None:
        sublattice = "B" if B > 0 else "A"
    if sublattice not in ("A", "B"):
        raise InvalidSpecError("sublattice must be 'A' or 'B'")
    if (sublattice == "B") != (B > 0):
        raise InvalidSpecError(f"sublattice {sublattice} zero mode is not normalizable for B={B}")
    p = ContinuumParams(1, -1 if sublattice == "B" else 1, B)
    clm = continuum_clm(p, E, q)
    E = complex(E)
    d = (-E.imag / (p.s_y * B), E.real / (p.s_x * B))
    zero = continuum_clm(p, 0.0, q)
    if grid is None:
        grid = _default_grid(zero, h)
    X, Y = grid.mesh()
    phi = clm.value(X - d[0], Y - d[1])
    phi = phi / np.sqrt(np.sum(np.abs(phi) ** 2) * grid.h**2)
    r = _continuum_apply(p, phi, X, Y, grid.h)
    return _interior_ratio(r, phi)


# ----------------------------------------------------------------- records


def descriptor_record(desc) -> dict:
    """Flat key-value record of any CLM descriptor."""
    if isinstance(desc, ContinuumClm):
        d = dict(model=f"continuum(s_x={desc.params.s_x},s_y={desc.params.s_y})", B=desc.params.B, k="-", q=desc.q, E=desc.E, tau=desc.tau, r0=desc.r0, exists=desc.normalizable)
    elif isinstance(desc, LatticeClm2d):
        d = dict(model="2d", B=desc.B, k=desc.k, q=desc.q, E=desc.E, tau=(desc.tau_x, desc.tau_y), r0=desc.r0, exists=desc.exists, mu=desc.mu, nu=desc.nu)
    elif isinstance(desc, LatticeClm1d):
        d = asdict(desc)
        d["r0"] = d.pop("x0")
    else:
        raise InvalidSpecError(f"not a CLM descriptor: {type(desc).__name__}")
    return d


def _fmt(v) -> str:
    if isinstance(v, (tuple, list)):
        return ",".join(_fmt(x) for x in v)
    if isinstance(v, complex):
        return f"{v.real!r}{v.imag:+}j"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def format_record(record: dict) -> str:
    """``key=value`` lines, one per field."""
    return "".join(f"{k}={_fmt(v)}\n" for k, v in record.items())
