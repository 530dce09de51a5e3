"""Finite lattice Hamiltonians with a fixed site-index convention.

Three models are provided:

* ``build_2d_clm``: square lattice, reciprocal x-bonds, nonreciprocal
  y-bonds and the complex mass ``B (y - i x)``.
* ``build_1d_nonreciprocal``: chain with hoppings ``t`` / ``-t`` and a
  real onsite mass.
* ``build_1d_gainloss``: chain with symmetric hoppings and an imaginary
  (gain/loss) onsite mass.

Matrices are dense, row-major and immutable once built.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import InvalidSpecError

__all__ = [
    "SiteIndexer",
    "MassProfile",
    "HamiltonianMatrix",
    "LatticeOperator",
    "build_2d_clm",
    "build_1d_nonreciprocal",
    "build_1d_gainloss",
    "apply",
    "export_matrix_text",
    "load_matrix_text",
]


@dataclass(frozen=True)
class SiteIndexer:
    """Map between flat row indices and integer lattice coordinates.

    Parameters
    ----------
    dims : tuple of int
        ``(N,)`` for a chain or ``(Lx, Ly)`` for a square lattice.

    Notes
    -----
    Integer coordinates are 1-based.  In 2D the flat index is
    ``(iy - 1) * Lx + (ix - 1)``.  Physical coordinates are centered on the
    lattice midpoint: ``x = ix - (Lx + 1) / 2`` (and likewise for y, or
    ``j - j0`` with ``j0 = (N + 1) / 2`` in 1D).
    """

    dims: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) not in (1, 2) or any(d < 1 for d in dims):
            raise InvalidSpecError(f"invalid lattice dims {self.dims!r}")
        object.__setattr__(self, "dims", dims)

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def n(self) -> int:
        return int(np.prod(self.dims))

    def index(self, ix: int, iy: int | None = None) -> int:
        """Flat index of a 1-based site."""
        if self.ndim == 1:
            if iy is not None or not 1 <= ix <= self.dims[0]:
                raise IndexError(f"site {ix} outside chain of {self.dims[0]}")
            return ix - 1
        lx, ly = self.dims
        if iy is None or not (1 <= ix <= lx and 1 <= iy <= ly):
            raise IndexError(f"site ({ix}, {iy}) outside {lx}x{ly} lattice")
        return (iy - 1) * lx + (ix - 1)

    def site(self, idx: int) -> tuple:
        """1-based integer coordinates of a flat index."""
        if not 0 <= idx < self.n:
            raise IndexError(f"index {idx} out of range")
        if self.ndim == 1:
            return (idx + 1,)
        lx = self.dims[0]
        return (idx % lx + 1, idx // lx + 1)

    def positions(self) -> tuple:
        """Centered physical coordinates of every row, as float arrays.

        Returns ``(x,)`` in 1D and ``(x, y)`` in 2D.
        """
        if self.ndim == 1:
            n = self.dims[0]
            return (np.arange(1, n + 1) - (n + 1) / 2.0,)
        lx, ly = self.dims
        idx = np.arange(self.n)
        x = idx % lx + 1 - (lx + 1) / 2.0
        y = idx // lx + 1 - (ly + 1) / 2.0
        return (x, y)

    def half_extent(self) -> tuple:
        """Largest centered coordinate along each axis."""
        return tuple((d - 1) / 2.0 for d in self.dims)


@dataclass(frozen=True)
class MassProfile:
    """Onsite mass specification for the 1D chains.

    Parameters
    ----------
    kind : {"linear", "random"}
        ``linear`` gives ``B (j - j0)``; ``random`` draws each mass
        uniformly from ``[-|B| N / 2, |B| N / 2)``.
    B : float
        Gradient strength.
    seed : int, optional
        Seed for the random kind.
    component : {"real", "imaginary"}
        Imaginary profiles are multiplied by ``i``.
    """

    kind: str = "linear"
    B: float = 0.0
    seed: int | None = None
    component: str = "real"

    def __post_init__(self):
        if self.kind not in ("linear", "random"):
            raise InvalidSpecError(f"unknown mass kind {self.kind!r}")
        if self.component not in ("real", "imaginary"):
            raise InvalidSpecError(f"unknown mass component {self.component!r}")
        if self.kind == "random" and self.seed is None:
            raise InvalidSpecError("random mass profile requires a seed")
        if self.seed is not None and not 0 <= int(self.seed) < 2**64:
            raise InvalidSpecError("seed must be an unsigned 64-bit integer")

    def values(self, n: int) -> np.ndarray:
        """Onsite masses for a chain of ``n`` sites."""
        if self.kind == "linear":
            m = self.B * (np.arange(1, n + 1) - (n + 1) / 2.0)
        else:
            half = abs(self.B) * n / 2.0
            m = np.random.default_rng(int(self.seed)).uniform(-half, half, n)
        return 1j * m if self.component == "imaginary" else m.astype(complex)

    def tag(self) -> str:
        s = f"{self.kind}-{self.component}"
        return s + (f"-seed{self.seed}" if self.kind == "random" else "")


@dataclass(frozen=True, eq=False)
class HamiltonianMatrix:
    """Dense, immutable complex Hamiltonian with site metadata.

    Attributes
    ----------
    entries : ndarray, shape (n, n)
        Read-only complex matrix.
    indexer : SiteIndexer
    model_tag : str
        Provenance label, e.g. ``"2d-clm"`` or ``"1d-gainloss:random-imaginary-seed3"``.
    params : mapping
        Construction parameters (read-only).
    """

    entries: np.ndarray
    indexer: SiteIndexer
    model_tag: str
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex, order="C")
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidSpecError("Hamiltonian must be square")
        if a.shape[0] != self.indexer.n:
            raise InvalidSpecError("matrix size does not match indexer")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def hermiticity_defect(self) -> float:
        """Frobenius norm of ``H - H^dagger``."""
        return float(np.linalg.norm(self.entries - self.entries.conj().T))

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def shifted(self, c: complex) -> "HamiltonianMatrix":
        """Copy with ``c`` added to every diagonal entry."""
        a = self.entries + c * np.eye(self.n)
        p = dict(self.params)
        p["shift"] = complex(c) + complex(p.get("shift", 0.0))
        return HamiltonianMatrix(a, self.indexer, self.model_tag, p)

    def operator(self) -> "LatticeOperator":
        """Matrix-free view of this Hamiltonian."""
        return LatticeOperator.from_matrix(self)


@dataclass(frozen=True)
class LatticeOperator:
    """Matrix-free nearest-neighbor Hamiltonian.

    Stores the diagonal and the four bond amplitudes, so memory is
    ``O(n)``.  ``apply`` reproduces the dense product exactly.

    Attributes
    ----------
    diag : ndarray
        Onsite terms (flat index order).
    shape : tuple
        ``(N,)`` or ``(Lx, Ly)``.
    fx, bx : complex
        ``H[r + x, r]`` and ``H[r, r + x]`` (forward and backward x-bonds).
    fy, by : complex
        Same for y-bonds (2D only).
    """

    diag: np.ndarray
    shape: tuple
    fx: complex
    bx: complex
    fy: complex = 0.0
    by: complex = 0.0

    @classmethod
    def from_matrix(cls, H: HamiltonianMatrix) -> "LatticeOperator":
        a, ix = H.entries, H.indexer
        diag = np.diag(a).copy()
        if ix.ndim == 1:
            n = ix.n
            fx = a[1, 0] if n > 1 else 0.0
            bx = a[0, 1] if n > 1 else 0.0
            return cls(diag, ix.dims, complex(fx), complex(bx))
        lx, ly = ix.dims
        fx = a[ix.index(2, 1), ix.index(1, 1)] if lx > 1 else 0.0
        bx = a[ix.index(1, 1), ix.index(2, 1)] if lx > 1 else 0.0
        fy = a[ix.index(1, 2), ix.index(1, 1)] if ly > 1 else 0.0
        by = a[ix.index(1, 1), ix.index(1, 2)] if ly > 1 else 0.0
        return cls(diag, ix.dims, complex(fx), complex(bx), complex(fy), complex(by))

    @property
    def n(self) -> int:
        return int(np.prod(self.shape))

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        if v.shape != (self.n,):
            raise InvalidSpecError(f"vector length {v.shape} does not match n={self.n}")
        out = self.diag * v
        if len(self.shape) == 1:
            out[1:] += self.fx * v[:-1]
            out[:-1] += self.bx * v[1:]
            return out
        lx, ly = self.shape
        g = v.reshape(ly, lx)
        o = out.reshape(ly, lx)
        o[:, 1:] += self.fx * g[:, :-1]
        o[:, :-1] += self.bx * g[:, 1:]
        o[1:, :] += self.fy * g[:-1, :]
        o[:-1, :] += self.by * g[1:, :]
        return out

    __call__ = apply

    def spectral_bound(self) -> float:
        """Gershgorin bound on the spectral radius."""
        hop = abs(self.fx) + abs(self.bx) + abs(self.fy) + abs(self.by)
        return float(np.max(np.abs(self.diag)) + hop)


def _check_size(*dims):
    for d in dims:
        if int(d) != d or d < 2:
            raise InvalidSpecError(f"lattice dimension must be an integer >= 2, got {d!r}")


def build_2d_clm(Lx: int, Ly: int, tx: float, ty: float, B: float) -> HamiltonianMatrix:
    """Square-lattice CLM Hamiltonian with open boundaries.

    Parameters
    ----------
    Lx, Ly : int
        Lattice size (both >= 2).
    tx, ty : float
        Reciprocal x-hopping and nonreciprocal y-hopping amplitudes.
    B : float
        Mass gradient; the onsite term is ``B (y - i x)`` in centered
        coordinates.

    Returns
    -------
    HamiltonianMatrix
        ``<r+x|H|r> = <r|H|r+x> = tx``, ``<r-y|H|r> = ty`` and
        ``<r|H|r-y> = -ty``.
    """
    _check_size(Lx, Ly)
    ix = SiteIndexer((Lx, Ly))
    x, y = ix.positions()
    n = ix.n
    a = np.zeros((n, n), dtype=complex)
    a[np.arange(n), np.arange(n)] = B * (y - 1j * x)
    r = np.arange(n)
    hasx = (r % Lx) < Lx - 1
    a[r[hasx] + 1, r[hasx]] = tx
    a[r[hasx], r[hasx] + 1] = tx
    hasy = r < n - Lx
    # r -> r + y: <r|H|r+y> = ty, <r+y|H|r> = -ty
    a[r[hasy], r[hasy] + Lx] = ty
    a[r[hasy] + Lx, r[hasy]] = -ty
    params = dict(Lx=int(Lx), Ly=int(Ly), tx=float(tx), ty=float(ty), B=float(B))
    return HamiltonianMatrix(a, ix, "2d-clm", params)


def _build_chain(N, t_fwd, t_bwd, mass: MassProfile, tag, t):
    _check_size(N)
    ix = SiteIndexer((N,))
    a = np.zeros((N, N), dtype=complex)
    a[np.arange(N), np.arange(N)] = mass.values(N)
    j = np.arange(1, N)
    a[j, j - 1] = t_fwd
    a[j - 1, j] = t_bwd
    params = dict(N=int(N), t=float(t), B=float(mass.B), mass=mass.kind)
    if mass.seed is not None:
        params["seed"] = int(mass.seed)
    return HamiltonianMatrix(a, ix, f"{tag}:{mass.tag()}", params)


def build_1d_nonreciprocal(N: int, t: float, mass: MassProfile) -> HamiltonianMatrix:
    """Chain with ``<j|H|j-1> = t``, ``<j-1|H|j> = -t`` and a real mass.

    Raises
    ------
    InvalidSpecError
        If ``mass`` is not a real profile or ``N < 2``.
    """
    if mass.component != "real":
        raise InvalidSpecError("nonreciprocal chain requires a real mass profile")
    return _build_chain(N, t, -t, mass, "1d-nonreciprocal", t)


def build_1d_gainloss(N: int, t: float, mass: MassProfile) -> HamiltonianMatrix:
    """Chain with symmetric hopping ``t`` and an imaginary mass ``i m_j``.

    Raises
    ------
    InvalidSpecError
        If ``mass`` is not an imaginary profile or ``N < 2``.
    """
    if mass.component != "imaginary":
        raise InvalidSpecError("gain/loss chain requires an imaginary mass profile")
    return _build_chain(N, t, t, mass, "1d-gainloss", t)


def apply(H, v) -> np.ndarray:
    """Return ``H @ v`` for a HamiltonianMatrix, LatticeOperator or array."""
    if isinstance(H, LatticeOperator):
        return H.apply(v)
    a = H.entries if isinstance(H, HamiltonianMatrix) else np.asarray(H)
    v = np.asarray(v)
    if v.ndim != 1 or v.shape[0] != a.shape[1]:
        raise InvalidSpecError(f"vector length {v.shape} does not match n={a.shape[1]}")
    return a @ v


def export_matrix_text(H: HamiltonianMatrix, path) -> None:
    """Write ``n model_tag key=value ...`` then ``row col re im`` per nonzero."""
    a = H.entries
    kv = " ".join(f"{k}={v}" for k, v in H.params.items())
    dims = "x".join(str(d) for d in H.indexer.dims)
    rows, cols = np.nonzero(a)
    with open(path, "w") as fh:
        fh.write(f"{H.n} {H.model_tag} dims={dims} {kv}".rstrip() + "\n")
        for r, c in zip(rows, cols):
            z = a[r, c]
            fh.write(f"{r} {c} {float(z.real)!r} {float(z.imag)!r}\n")


def load_matrix_text(path) -> HamiltonianMatrix:
    """Inverse of :func:`export_matrix_text`."""
    with open(path) as fh:
        head = fh.readline().split()
        n, tag = int(head[0]), head[1]
        params = {}
        dims = (n,)
        for tok in head[2:]:
            k, _, v = tok.partition("=")
            if k == "dims":
                dims = tuple(int(d) for d in v.split("x"))
                continue
            params[k] = _parse_scalar(v)
        a = np.zeros((n, n), dtype=complex)
        for line in fh:
            r, c, re, im = line.split()
            a[int(r), int(c)] = complex(float(re), float(im))
    return HamiltonianMatrix(a, SiteIndexer(dims), tag, params)


def _parse_scalar(s: str):
    for conv in (int, float, complex):
        try:
            return conv(s)
        except ValueError:
            pass
    return s
