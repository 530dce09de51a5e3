"""Dense non-Hermitian eigensolver and per-state statistics."""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .errors import ConvergenceError, InsufficientDataError, InvalidSpecError
from .lattice import HamiltonianMatrix, SiteIndexer

__all__ = [
    "EigenDecomposition",
    "StateStats",
    "eig",
    "participation_ratio",
    "spectrum_table",
    "table_arrays",
    "interior_filter",
    "linear_trend",
]


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenpairs sorted by ``(Re, Im)``.

    Attributes
    ----------
    values : ndarray, shape (n,)
    vectors : ndarray, shape (n, n)
        Column ``i`` is the unit-norm right eigenvector of ``values[i]``;
        its largest-modulus component is real and positive.
    residuals : ndarray, shape (n,)
        ``||H v - lambda v||``.
    sweeps : int
        QR sweeps used (0 for the LAPACK backend).
    """

    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    sweeps: int = 0

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _as_array(H) -> np.ndarray:
    a = H.entries if isinstance(H, HamiltonianMatrix) else np.asarray(H, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise InvalidSpecError("eig needs a non-empty square matrix")
    if not np.all(np.isfinite(a)):
        raise InvalidSpecError("matrix has non-finite entries")
    return np.ascontiguousarray(a, dtype=np.complex128)


def eig(H, tol: float = 1e-12, backend: str = "native") -> EigenDecomposition:
    """Full eigendecomposition of a dense complex matrix.

    Parameters
    ----------
    H : HamiltonianMatrix or array_like
    tol : float
        Deflation threshold relative to ``||H||_F``.
    backend : {"native", "lapack"}
        ``native`` runs Householder-Hessenberg reduction, shifted QR with
        deflation and inverse iteration.  ``lapack`` defers to
        ``numpy.linalg.eig`` and is only meant for very large lattices.

    Raises
    ------
    ConvergenceError
        If QR needs more than ``30 n`` sweeps; converged values are
        attached as ``partial_values``.
    """
    a = _as_array(H)
    n = a.shape[0]
    if backend == "lapack":
        w, v = np.linalg.eig(a)
        sweeps = 0
    elif backend == "native":
        h, q = _kernels.hessenberg_reduce(a)
        w, status, sweeps = _kernels.hessenberg_qr(h, tol, 30)
        if status:
            raise ConvergenceError(
                f"QR did not converge after {sweeps} sweeps; {status} eigenvalues pending",
                partial_values=np.array(w[status:]),
                sweeps=int(sweeps),
            )
        start = np.random.default_rng(0x5EED).standard_normal(n) + 0j
        hn = np.linalg.norm(h)
        y = _kernels.hessenberg_inverse_iteration(h, w, start, 3, 1e-8 * max(hn, 1e-300))
        v = q @ y
    else:
        raise InvalidSpecError(f"unknown eig backend {backend!r}")

    v = v / np.linalg.norm(v, axis=0)
    big = np.argmax(np.abs(v), axis=0)
    ph = v[big, np.arange(n)]
    v = v * (np.abs(ph) / ph)
    order = np.lexsort((w.imag, w.real))
    w = np.asarray(w)[order]
    v = np.ascontiguousarray(v[:, order])
    res = np.linalg.norm(a @ v - v * w, axis=0)
    return EigenDecomposition(w, v, res, int(sweeps))


def participation_ratio(psi) -> float:
    """``(sum |psi|^2)^2 / sum |psi|^4``; scale invariant, between 1 and n."""
    p = np.abs(np.asarray(psi)) ** 2
    s2 = np.sum(p**2)
    if s2 == 0.0:
        raise InvalidSpecError("participation ratio of a zero vector")
    return float(np.sum(p) ** 2 / s2)


@dataclass(frozen=True)
class StateStats:
    """Summary of one eigenpair.

    ``mean_*`` and ``width_*`` are the mean and standard deviation of the
    centered coordinates under ``|psi|^2``; y-fields are NaN in 1D.
    """

    E: complex
    pr: float
    mean_x: float
    mean_y: float
    residual: float
    width_x: float
    width_y: float

    @property
    def re_E(self) -> float:
        return float(np.real(self.E))

    @property
    def im_E(self) -> float:
        return float(np.imag(self.E))


def spectrum_table(H, decomp: EigenDecomposition, indexer: SiteIndexer | None = None) -> list:
    """One :class:`StateStats` per eigenpair, in eigenvalue order."""
    if indexer is None:
        if not isinstance(H, HamiltonianMatrix):
            raise InvalidSpecError("an indexer is required for raw matrices")
        indexer = H.indexer
    p = np.abs(decomp.vectors) ** 2
    norm = p.sum(axis=0)
    pr = norm**2 / np.sum(p**2, axis=0)
    pos = indexer.positions()
    means, widths = [], []
    for c in pos:
        m = (c @ p) / norm
        var = ((c**2) @ p) / norm - m**2
        means.append(m)
        widths.append(np.sqrt(np.maximum(var, 0.0)))
    if len(pos) == 1:
        nan = np.full(decomp.n, np.nan)
        means.append(nan)
        widths.append(nan)
    return [
        StateStats(
            complex(decomp.values[i]),
            float(pr[i]),
            float(means[0][i]),
            float(means[1][i]),
            float(decomp.residuals[i]),
            float(widths[0][i]),
            float(widths[1][i]),
        )
        for i in range(decomp.n)
    ]


_FIELDS = ("re_E", "im_E", "pr", "mean_x", "mean_y", "residual", "width_x", "width_y")


def table_arrays(table: Sequence[StateStats]) -> dict:
    """Column arrays for a spectrum table, keyed by field name."""
    out = {k: np.array([getattr(s, k) for s in table], dtype=float) for k in _FIELDS}
    out["E"] = np.array([s.E for s in table], dtype=complex)
    return out


def interior_filter(indexer: SiteIndexer, widths: float = 3.0) -> Callable[[StateStats], bool]:
    """Predicate keeping states whose center is ``widths`` std devs from every edge."""
    half = indexer.half_extent()

    def keep(s: StateStats) -> bool:
        if abs(s.mean_x) + widths * s.width_x > half[0]:
            return False
        if len(half) == 2 and abs(s.mean_y) + widths * s.width_y > half[1]:
            return False
        return True

    return keep


def linear_trend(table, x_field: str, y_field: str, interior_filter=None, min_states: int = 10):
    """Least-squares line ``y = slope * x + intercept`` over filtered states.

    Returns
    -------
    slope, intercept, r_squared : float

    Raises
    ------
    InsufficientDataError
        Fewer than ``min_states`` states pass the filter.
    """
    valid = {f.name for f in fields(StateStats)} | set(_FIELDS)
    for f in (x_field, y_field):
        if f not in valid:
            raise InvalidSpecError(f"unknown field {f!r}")
    rows = [s for s in table if interior_filter is None or interior_filter(s)]
    if len(rows) < min_states:
        raise InsufficientDataError(f"{len(rows)} states pass the filter, need {min_states}")
    x = np.array([getattr(s, x_field) for s in rows], dtype=float)
    y = np.array([getattr(s, y_field) for s in rows], dtype=float)
    return fit_line(x, y)


def fit_line(x, y):
    """Ordinary least squares with R^2; ``R^2 = 1`` for a perfectly flat exact fit."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or np.ptp(x) == 0.0:
        raise InsufficientDataError("need at least two distinct abscissae")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), float(r2)
