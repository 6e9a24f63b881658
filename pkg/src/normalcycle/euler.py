"""Euler characteristics and integration of constructible functions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complex import SimplicialComplex, is_face_closed
from .errors import ComplexMismatch, NotFaceClosed


def _signs(X: SimplicialComplex) -> np.ndarray:
    return np.where(X.dims % 2 == 0, 1, -1)


def chi_o(X: SimplicialComplex, sel=None) -> int:
    """Signed count of the selected open cells, ``sum (-1)**dim``.

    ``sel`` is a boolean mask over ``X.simplices``; ``None`` selects all.
    Any union of open cells is allowed.
    """
    signs = _signs(X)
    if sel is None:
        return int(signs.sum())
    return int(signs[np.asarray(sel, dtype=bool)].sum())


def chi_top_compact(X: SimplicialComplex, sel=None) -> int:
    """Topological Euler characteristic of a closed (face-closed) selection."""
    if sel is not None and not is_face_closed(X, sel):
        raise NotFaceClosed("chi_top_compact needs a face-closed selection")
    return chi_o(X, sel)


@dataclass(frozen=True, eq=False)
class ConstructibleFunction:
    """Integer weight per open cell of a fixed complex."""

    complex: SimplicialComplex
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.int64).reshape(-1)
        if w.shape != (len(self.complex),):
            raise ValueError(
                f"expected {len(self.complex)} weights, got {w.shape[0]}"
            )
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def __eq__(self, other):
        if not isinstance(other, ConstructibleFunction):
            return NotImplemented
        return self.complex == other.complex and bool(np.array_equal(self.weights, other.weights))

    def __add__(self, other):
        return cf_add(self, other)

    def __sub__(self, other):
        return cf_add(self, cf_scale(other, -1))

    def __neg__(self):
        return cf_scale(self, -1)

    def __mul__(self, k):
        return cf_scale(self, k)

    __rmul__ = __mul__

    def value(self, simplex) -> int:
        return int(self.weights[self.complex.index[tuple(sorted(simplex))]])

    def level_sets(self) -> dict[int, np.ndarray]:
        """``{n: mask of f**-1(n)}`` for every value taken, zero included."""
        return {int(n): self.weights == n for n in np.unique(self.weights)}


def cf_indicator(X: SimplicialComplex, sel=None) -> ConstructibleFunction:
    w = np.ones(len(X), dtype=np.int64) if sel is None else np.asarray(sel, dtype=np.int64)
    return ConstructibleFunction(X, w)


def cf_zero(X: SimplicialComplex) -> ConstructibleFunction:
    return ConstructibleFunction(X, np.zeros(len(X), dtype=np.int64))


def cf_add(f: ConstructibleFunction, g: ConstructibleFunction) -> ConstructibleFunction:
    if f.complex is not g.complex and f.complex != g.complex:
        raise ComplexMismatch("constructible functions live on different complexes")
    return ConstructibleFunction(f.complex, f.weights + g.weights)


def cf_scale(f: ConstructibleFunction, k: int) -> ConstructibleFunction:
    return ConstructibleFunction(f.complex, f.weights * int(k))


def euler_integral(f: ConstructibleFunction) -> int:
    """Integral with respect to the Euler characteristic."""
    return int(np.dot(f.weights, _signs(f.complex)))
