"""Dense complex LU factorization with partial pivoting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels

__all__ = ["LUFactor", "lu_factor", "lu_solve", "det", "inverse"]


@dataclass(frozen=True)
class LUFactor:
    """Packed ``P A = L U`` factors.

    Attributes
    ----------
    lu : ndarray
        Unit-lower ``L`` below the diagonal, ``U`` on and above it.
    perm : ndarray
        Row permutation: row ``i`` of ``P A`` is row ``perm[i]`` of ``A``.
    n_swaps : int
    min_pivot : float
        Smallest ``|U_kk|``, the resonance indicator.
    """

    lu: np.ndarray
    perm: np.ndarray
    n_swaps: int
    min_pivot: float

    @property
    def n(self) -> int:
        return self.lu.shape[0]

    def solve(self, b) -> np.ndarray:
        """Solve ``A x = b`` for a vector or a stack of columns."""
        b = np.asarray(b, dtype=complex)
        vec = b.ndim == 1
        rhs = np.ascontiguousarray(b.reshape(self.n, -1))
        x = _kernels.lu_solve_inplace(self.lu, self.perm, rhs)
        return x[:, 0] if vec else x

    def det(self) -> complex:
        sign = -1.0 if self.n_swaps % 2 else 1.0
        return complex(sign * np.prod(np.diag(self.lu)))


def lu_factor(a) -> LUFactor:
    """Factor a square complex matrix."""
    a = np.array(a, dtype=np.complex128, order="C", copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("lu_factor needs a square matrix")
    perm, nswap, minpiv = _kernels.lu_factor_inplace(a)
    return LUFactor(a, perm, int(nswap), float(minpiv))


def lu_solve(a, b) -> np.ndarray:
    return lu_factor(a).solve(b)


def det(a) -> complex:
    """Determinant via LU."""
    return lu_factor(a).det()


def inverse(a) -> np.ndarray:
    n = np.asarray(a).shape[0]
    return lu_factor(a).solve(np.eye(n, dtype=complex))
