"""Uniform rectangular grids for continuum fields."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpecError

__all__ = ["Grid2D"]


@dataclass(frozen=True)
class Grid2D:
    """Uniform grid with nodes ``x_min + i h`` and ``y_min + j h``.

    Fields live in arrays of shape ``(ny, nx)`` (y rows, x columns).
    """

    nx: int
    ny: int
    h: float
    x_min: float
    y_min: float

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3 or not self.h > 0:
            raise InvalidSpecError("grid needs nx, ny >= 3 and h > 0")

    @classmethod
    def centered(cls, cx: float, cy: float, nx: int, ny: int, h: float) -> "Grid2D":
        """``nx x ny`` nodes centered on ``(cx, cy)``."""
        return cls(int(nx), int(ny), float(h), cx - (nx - 1) * h / 2.0, cy - (ny - 1) * h / 2.0)

    @classmethod
    def covering(cls, cx: float, cy: float, half_x: float, half_y: float, h: float) -> "Grid2D":
        """Smallest centered grid reaching at least ``half_x``, ``half_y`` from the center."""
        nx = 2 * int(np.ceil(half_x / h)) + 1
        ny = 2 * int(np.ceil(half_y / h)) + 1
        return cls.centered(cx, cy, nx, ny, h)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.h * np.arange(self.nx)

    @property
    def y(self) -> np.ndarray:
        return self.y_min + self.h * np.arange(self.ny)

    @property
    def x_max(self) -> float:
        return self.x_min + self.h * (self.nx - 1)

    @property
    def y_max(self) -> float:
        return self.y_min + self.h * (self.ny - 1)

    def mesh(self):
        """``(X, Y)`` coordinate arrays of shape ``(ny, nx)``."""
        return np.meshgrid(self.x, self.y)

    def contains(self, x_lo, x_hi, y_lo, y_hi) -> bool:
        return (
            self.x_min <= x_lo and x_hi <= self.x_max and self.y_min <= y_lo and y_hi <= self.y_max
        )
