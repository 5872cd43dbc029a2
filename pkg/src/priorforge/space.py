"""Parameter spaces: products of open intervals.

A :class:`ParameterSpace` is a box ``(lo_1, hi_1) x ... x (lo_d, hi_d)``
with open (possibly infinite) sides.  All evaluation points handed to
family / prior operations must lie strictly inside; points within
``BOUNDARY_MARGIN`` of a finite edge are rejected rather than risking
overflow or meaningless derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundaryError, DomainError

BOUNDARY_MARGIN = 1e-8


@dataclass(frozen=True)
class ParameterSpace:
    """Product of per-coordinate open intervals.

    Parameters
    ----------
    boxes:
        Tuple of ``(lower, upper)`` pairs; either end may be ``-inf`` /
        ``+inf``.  ``lower < upper`` is required in every coordinate.
    """

    boxes: tuple

    def __post_init__(self):
        boxes = tuple((float(lo), float(hi)) for lo, hi in self.boxes)
        object.__setattr__(self, "boxes", boxes)
        for lo, hi in boxes:
            if not lo < hi:
                raise DomainError(f"empty box ({lo}, {hi})")

    @property
    def dim(self) -> int:
        return len(self.boxes)

    def contains(self, theta) -> bool:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if theta.shape != (self.dim,):
            return False
        return all(lo < t < hi for t, (lo, hi) in zip(theta, self.boxes))

    def require_interior(self, theta, margin: float = BOUNDARY_MARGIN):
        """Return ``theta`` as a 1-D array, raising if it is not strictly
        inside every box with the given absolute margin to finite edges."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if theta.shape != (self.dim,):
            raise DomainError(
                f"parameter has shape {theta.shape}, space has dim {self.dim}"
            )
        for t, (lo, hi) in zip(theta, self.boxes):
            if not (lo < t < hi):
                raise BoundaryError(f"parameter {t} outside open box ({lo}, {hi})")
            if np.isfinite(lo) and t - lo < margin:
                raise BoundaryError(f"parameter {t} within {margin} of lower edge {lo}")
            if np.isfinite(hi) and hi - t < margin:
                raise BoundaryError(f"parameter {t} within {margin} of upper edge {hi}")
        return theta

    def distance_to_edge(self, theta) -> np.ndarray:
        """Per-coordinate distance to the nearest finite edge (inf if none)."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        out = np.full(self.dim, np.inf)
        for i, (t, (lo, hi)) in enumerate(zip(theta, self.boxes)):
            d = np.inf
            if np.isfinite(lo):
                d = min(d, t - lo)
            if np.isfinite(hi):
                d = min(d, hi - t)
            out[i] = d
        return out

    def coordinate_grid(self, i: int, n: int) -> np.ndarray:
        """Default evaluation grid for coordinate ``i``.

        Equally spaced points are pushed through the transform natural to
        the box so the grid approaches but never touches the edges:
        logistic map for a finite box, exponential for a half-line,
        identity for the whole line.
        """
        lo, hi = self.boxes[i]
        u = np.linspace(-4.0, 4.0, n)
        if np.isfinite(lo) and np.isfinite(hi):
            return lo + (hi - lo) / (1.0 + np.exp(-u))
        if np.isfinite(lo):
            return lo + np.exp(np.linspace(-2.0, 2.0, n))
        if np.isfinite(hi):
            return hi - np.exp(np.linspace(-2.0, 2.0, n))
        return np.linspace(-3.0, 3.0, n)

    def grid(self, n: int = 33) -> np.ndarray:
        """Product grid, shape ``(n**dim, dim)`` (``(n,)`` when dim == 1)."""
        axes = [self.coordinate_grid(i, n) for i in range(self.dim)]
        if self.dim == 1:
            return axes[0]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)


def interval(lo: float, hi: float) -> ParameterSpace:
    return ParameterSpace(((lo, hi),))


def box(*pairs) -> ParameterSpace:
    return ParameterSpace(tuple(pairs))
