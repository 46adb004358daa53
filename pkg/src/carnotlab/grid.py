"""Rectangular lattices over boxes in ``W``-coordinates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True, eq=False)
class Grid:
    """Closed box ``[lo, hi]`` sampled by ``shape[i]`` equispaced nodes per axis."""

    lo: np.ndarray
    hi: np.ndarray
    shape: tuple

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float).reshape(-1)
        hi = np.asarray(self.hi, dtype=float).reshape(-1)
        shape = tuple(int(s) for s in np.atleast_1d(self.shape))
        if not (lo.shape == hi.shape and len(shape) == lo.shape[0]):
            raise ValidationError("grid lo, hi and shape must have the same length")
        if not np.all(hi > lo):
            raise ValidationError("grid box must be nonempty (hi > lo on every axis)")
        if min(shape) < 2:
            raise ValidationError("grid needs at least 2 nodes per axis")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "shape", shape)

    @classmethod
    def cube(cls, d: int, half_width: float, n: int) -> "Grid":
        return cls(-half_width * np.ones(d), half_width * np.ones(d), (n,) * d)

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def spacing(self) -> np.ndarray:
        return (self.hi - self.lo) / (np.asarray(self.shape) - 1)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axes(self) -> list[np.ndarray]:
        return [np.linspace(a, b, n) for a, b, n in zip(self.lo, self.hi, self.shape)]

    def nodes(self) -> np.ndarray:
        """All nodes, shape ``(size, dim)``, in C (node-major) order (read-only, cached)."""
        cached = self.__dict__.get("_nodes")
        if cached is None:
            mesh = np.meshgrid(*self.axes(), indexing="ij")
            cached = np.stack([m.ravel() for m in mesh], axis=-1)
            cached.setflags(write=False)
            object.__setattr__(self, "_nodes", cached)
        return cached

    def node_array(self) -> np.ndarray:
        """Nodes shaped ``shape + (dim,)``."""
        return self.nodes().reshape(self.shape + (self.dim,))

    def node(self, index) -> np.ndarray:
        index = np.asarray(index)
        return self.lo + index * self.spacing

    def to_dict(self) -> dict:
        return {"lo": self.lo.tolist(), "hi": self.hi.tolist(), "shape": list(self.shape)}

    def refined(self) -> "Grid":
        """Same box with the spacing halved."""
        return Grid(self.lo, self.hi, tuple(2 * s - 1 for s in self.shape))
