"""Embedded finite simplicial complexes.

A complex stores a coordinate array and a face-closed set of simplices, each a
sorted tuple of vertex ids.  Coordinates not referenced by any simplex are
allowed (links and subcomplexes keep the parent's vertex numbering).

Selections of open cells are boolean masks aligned with
:attr:`SimplicialComplex.simplices`.
"""

from __future__ import annotations

from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateSimplex,
    DuplicateVertex,
    GenericityFailure,
    NonGenericCovector,
    NotFaceClosed,
    UnknownVertex,
    UnsupportedDimension,
    ValidationError,
)

Simplex = tuple
MAX_DIM = 3
EPS_TIE = 1e-9
AFFINE_TOL = 1e-9


def faces(simplex: Simplex) -> list[Simplex]:
    """All nonempty faces of ``simplex``, the simplex itself included."""
    return [c for k in range(1, len(simplex) + 1) for c in combinations(simplex, k)]


def face_closure(cells: Iterable[Simplex]) -> set[Simplex]:
    out: set[Simplex] = set()
    for s in cells:
        s = tuple(sorted(s))
        if s in out:
            continue
        out.update(faces(s))
    return out


def _canonical_order(cells: Iterable[Simplex]) -> tuple[Simplex, ...]:
    return tuple(sorted(cells, key=lambda s: (len(s), s)))


class SimplicialComplex:
    """Immutable embedded simplicial complex.

    Use :func:`build_complex` for validated construction from user input; the
    constructor trusts that ``cells`` is face-closed and geometrically sound.
    """

    def __init__(self, points, cells: Iterable[Simplex]):
        pts = np.array(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(0, 1) if pts.size == 0 else pts.reshape(-1, 1)
        pts.setflags(write=False)
        self.points = pts
        self.simplices: tuple[Simplex, ...] = _canonical_order(set(cells))
        self.index = {s: i for i, s in enumerate(self.simplices)}
        self.dims = np.array([len(s) - 1 for s in self.simplices], dtype=int)

    def __len__(self):
        return len(self.simplices)

    def __contains__(self, simplex):
        return tuple(simplex) in self.index

    def __eq__(self, other):
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return (
            self.simplices == other.simplices
            and self.points.shape == other.points.shape
            and bool(np.array_equal(self.points, other.points))
        )

    def __hash__(self):
        return hash(self.simplices)

    def __repr__(self):
        return (
            f"SimplicialComplex(n={self.ambient_dim}, d={self.dim}, "
            f"f-vector={self.f_vector})"
        )

    @property
    def ambient_dim(self) -> int:
        return int(self.points.shape[1])

    @property
    def dim(self) -> int:
        return int(self.dims.max()) if len(self.dims) else -1

    @property
    def f_vector(self) -> tuple[int, ...]:
        return tuple(int(np.sum(self.dims == k)) for k in range(self.dim + 1))

    @cached_property
    def vertices(self) -> tuple[int, ...]:
        return tuple(s[0] for s in self.simplices if len(s) == 1)

    @cached_property
    def edges(self) -> tuple[Simplex, ...]:
        return tuple(s for s in self.simplices if len(s) == 2)

    @cached_property
    def maximal_simplices(self) -> tuple[Simplex, ...]:
        covered: set[Simplex] = set()
        for s in self.simplices:
            if len(s) > 1:
                covered.update(combinations(s, len(s) - 1))
        return tuple(s for s in self.simplices if s not in covered)

    @cached_property
    def vertex_table(self) -> np.ndarray:
        """``(len(X), dim + 1)`` vertex ids per cell, padded by repeating the first."""
        width = max(self.dim + 1, 1)
        t = np.array([s + (s[0],) * (width - len(s)) for s in self.simplices], dtype=int)
        return t.reshape(len(self.simplices), width)

    def level_signs(self, h: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
        """Per-cell min and max of the vertex signs of ``h`` (0 within ``tol``)."""
        sign = np.where(np.abs(h) <= tol, 0, np.sign(h)).astype(int)
        if len(self.simplices) == 0:
            return np.zeros(0, dtype=int), np.zeros(0, dtype=int)
        sg = sign[self.vertex_table]
        return sg.min(axis=1), sg.max(axis=1)

    @cached_property
    def diameter(self) -> float:
        if len(self.vertices) < 2:
            return 0.0
        p = self.points[list(self.vertices)]
        lo, hi = p.min(axis=0), p.max(axis=0)
        return float(np.linalg.norm(hi - lo))

    @property
    def eps_tie(self) -> float:
        """Default tie tolerance: ``1e-9`` scaled by the coordinate diameter."""
        return EPS_TIE * max(self.diameter, 1.0)

    @cached_property
    def _star(self) -> dict[int, list[Simplex]]:
        star: dict[int, list[Simplex]] = {v: [] for v in self.vertices}
        for s in self.simplices:
            for v in s:
                star[v].append(s)
        return star

    def cofaces(self, simplex: Simplex) -> list[Simplex]:
        """Simplices containing ``simplex`` (itself included)."""
        simplex = tuple(simplex)
        if simplex not in self.index:
            raise UnknownVertex(f"{simplex} is not a simplex of the complex")
        sset = set(simplex)
        return [t for t in self._star[simplex[0]] if sset.issubset(t)]

    def mask(self, cells: Iterable[Simplex] = ()) -> np.ndarray:
        """Boolean selection mask for the given open cells."""
        m = np.zeros(len(self), dtype=bool)
        for s in cells:
            key = tuple(sorted(s))
            if key not in self.index:
                raise UnknownVertex(f"{key} is not a simplex of the complex")
            m[self.index[key]] = True
        return m

    def full_mask(self) -> np.ndarray:
        return np.ones(len(self), dtype=bool)

    def selected(self, mask) -> list[Simplex]:
        return [s for s, keep in zip(self.simplices, mask) if keep]


# --- construction --------------------------------------------------------


def _check_affine(points: np.ndarray, simplex: Simplex, tol: float = AFFINE_TOL):
    if len(simplex) == 1:
        return
    p = points[list(simplex)]
    edges = p[1:] - p[0]
    scale = max(float(np.abs(edges).max()), 1e-300)
    gram = edges @ edges.T / scale**2
    rank = np.linalg.matrix_rank(gram, tol=tol)
    if rank < len(simplex) - 1:
        raise DegenerateSimplex(f"simplex {simplex} has affinely dependent vertices")


def build_complex(
    vertices: Sequence[Sequence[float]],
    maximal_simplices: Iterable[Sequence[int]],
) -> SimplicialComplex:
    """Validated complex from coordinates and (maximal) simplices.

    Faces are generated automatically and duplicate simplices merge silently.

    Raises:
        DuplicateVertex: two coordinate rows coincide.
        DegenerateSimplex: a simplex has repeated or affinely dependent vertices.
        UnsupportedDimension: a simplex of dimension above 3.
        UnknownVertex: a simplex references a missing vertex.
    """
    pts = np.asarray(vertices, dtype=float)
    if pts.size == 0:
        pts = pts.reshape(0, pts.shape[-1] if pts.ndim == 2 and pts.shape[-1] else 1)
    if pts.ndim != 2 or pts.shape[1] < 1:
        raise ValidationError("vertices must be a list of coordinate sequences")
    if not np.all(np.isfinite(pts)):
        raise ValidationError("vertex coordinates must be finite")
    if len(pts) > 1:
        uniq = np.unique(pts, axis=0)
        if len(uniq) < len(pts):
            raise DuplicateVertex("two vertices share the same coordinates")
    cells = []
    for raw in maximal_simplices:
        s = tuple(int(i) for i in raw)
        if not s:
            continue
        for i in s:
            if not 0 <= i < len(pts):
                raise UnknownVertex(f"vertex id {i} out of range")
        if len(set(s)) != len(s):
            raise DegenerateSimplex(f"simplex {s} repeats a vertex")
        if len(s) - 1 > MAX_DIM:
            raise UnsupportedDimension(f"simplex {s} has dimension {len(s) - 1} > {MAX_DIM}")
        s = tuple(sorted(s))
        _check_affine(pts, s)
        cells.append(s)
    return SimplicialComplex(pts, face_closure(cells))


def point_complex(coords: Sequence[float]) -> SimplicialComplex:
    return build_complex([coords], [[0]])


def is_face_closed(X: SimplicialComplex, mask) -> bool:
    mask = np.asarray(mask, dtype=bool)
    for s, keep in zip(X.simplices, mask):
        if keep and len(s) > 1:
            for f in combinations(s, len(s) - 1):
                if not mask[X.index[f]]:
                    return False
    return True


def closure_mask(X: SimplicialComplex, mask) -> np.ndarray:
    return X.mask(face_closure(X.selected(mask)))


def subcomplex(X: SimplicialComplex, mask) -> SimplicialComplex:
    """The face-closed selection ``mask`` as a complex on the same coordinates."""
    mask = np.asarray(mask, dtype=bool)
    if not is_face_closed(X, mask):
        raise NotFaceClosed("selection is not closed under taking faces")
    return SimplicialComplex(X.points, X.selected(mask))


def full_subcomplex_mask(X: SimplicialComplex, vertex_ids: Iterable[int]) -> np.ndarray:
    keep = set(int(v) for v in vertex_ids)
    return np.array([keep.issuperset(s) for s in X.simplices], dtype=bool)


def full_subcomplex(X: SimplicialComplex, vertex_ids: Iterable[int]) -> SimplicialComplex:
    return SimplicialComplex(X.points, X.selected(full_subcomplex_mask(X, vertex_ids)))


# --- local structure -----------------------------------------------------


def _as_simplex(X: SimplicialComplex, v) -> Simplex:
    s = (int(v),) if np.isscalar(v) else tuple(sorted(int(i) for i in v))
    if s not in X.index:
        raise UnknownVertex(f"{s} is not a simplex of the complex")
    return s


def link(X: SimplicialComplex, v) -> SimplicialComplex:
    """Link of a vertex (or of a simplex): all ``rho`` disjoint from ``v`` with
    ``rho | v`` in ``X``.  Vertex ids and coordinates are inherited."""
    sigma = _as_simplex(X, v)
    sset = set(sigma)
    cells = [tuple(i for i in t if i not in sset) for t in X.cofaces(sigma) if len(t) > len(sigma)]
    return SimplicialComplex(X.points, cells)


def as_covector(xi, n: int) -> np.ndarray:
    arr = np.asarray(xi, dtype=float).reshape(-1)
    if arr.shape != (n,):
        raise ValidationError(f"covector must have {n} coordinates, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)) or not np.any(arr):
        raise ValidationError("covector must be finite and nonzero")
    return arr


def vertex_levels(X: SimplicialComplex, xi) -> np.ndarray:
    """Values of the linear functional at every coordinate row."""
    xi = as_covector(xi, X.ambient_dim)
    return X.points @ xi


def _tie_tol(X: SimplicialComplex, xi: np.ndarray, eps: float | None) -> float:
    return (X.eps_tie if eps is None else eps) * float(np.linalg.norm(xi))


def upper_link(X: SimplicialComplex, v, xi, eps: float | None = None) -> SimplicialComplex:
    """Full subcomplex of ``link(X, v)`` on the vertices strictly above ``v``.

    ``v`` may also be a simplex; then ``xi`` is expected to be constant on it.

    Raises:
        NonGenericCovector: a link vertex ties with ``v`` within the tolerance.
    """
    sigma = _as_simplex(X, v)
    xi = as_covector(xi, X.ambient_dim)
    lk = link(X, sigma)
    base = float(X.points[sigma[0]] @ xi)
    tol = _tie_tol(X, xi, eps)
    above = set()
    for w in lk.vertices:
        gap = float(X.points[w] @ xi) - base
        if abs(gap) <= tol:
            raise NonGenericCovector(f"link vertex {w} ties with {sigma} (gap {gap:.3g})")
        if gap > 0:
            above.add(w)
    return full_subcomplex(lk, above)


def is_generic(X: SimplicialComplex, xi, eps: float | None = None) -> bool:
    xi = as_covector(xi, X.ambient_dim)
    levels = np.sort(X.points[list(X.vertices)] @ xi)
    if len(levels) < 2:
        return True
    return bool(np.min(np.diff(levels)) > _tie_tol(X, xi, eps))


def require_generic(X: SimplicialComplex, xi, eps: float | None = None):
    if not is_generic(X, xi, eps):
        raise NonGenericCovector("two vertices share a level; re-sample the covector")


def sample_generic_covector(
    X: SimplicialComplex,
    seed=None,
    eps: float | None = None,
    max_tries: int = 10_000,
    others: Sequence[SimplicialComplex] = (),
) -> np.ndarray:
    """Unit covector separating all vertex levels by more than the tie tolerance.

    Rejection sampling from the uniform distribution on the sphere; the result
    is a deterministic function of ``seed``.  ``others`` lists further
    complexes (same ambient space) the covector must also be generic for.
    """
    if len(X.vertices) == 0:
        raise ValidationError("cannot sample a covector for an empty complex")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        g = rng.standard_normal(X.ambient_dim)
        norm = np.linalg.norm(g)
        if norm == 0:
            continue
        xi = g / norm
        if is_generic(X, xi, eps) and all(is_generic(Y, xi, eps) for Y in others):
            return xi
    raise GenericityFailure(f"no generic covector after {max_tries} draws")


# --- hyperplane subdivision ----------------------------------------------


class _LevelCut:
    """Pulling triangulation of the pieces of each simplex cut by one level set.

    Labels are ``(0, v, -1)`` for original vertices and ``(1, a, b)`` for the
    crossing point on edge ``(a, b)``; the lexicographic label order is the
    global pulling order, which keeps triangulations of shared faces equal.
    """

    def __init__(self, sign: dict[int, int]):
        self.sign = sign
        self._memo: dict = {}

    def labels(self, tau, side):
        sg = self.sign
        keep = [(0, v, -1) for v in tau if (sg[v] == side or sg[v] == 0) and (side != 0 or sg[v] == 0)]
        cuts = [(1, a, b) for a, b in combinations(tau, 2) if sg[a] * sg[b] < 0]
        return sorted(keep + cuts)

    def dim(self, tau, side):
        sg = self.sign
        pos = any(sg[v] > 0 for v in tau)
        neg = any(sg[v] < 0 for v in tau)
        nzero = sum(1 for v in tau if sg[v] == 0)
        if side > 0:
            return len(tau) - 1 if pos else nzero - 1
        if side < 0:
            return len(tau) - 1 if neg else nzero - 1
        return len(tau) - 2 if (pos and neg) else nzero - 1

    def triangulate(self, tau, side):
        key = (tau, side)
        if key in self._memo:
            return self._memo[key]
        d = self.dim(tau, side)
        labels = self.labels(tau, side)
        if d < 0:
            out = []
        elif d == 0:
            out = [(labels[0],)]
        else:
            p = labels[0]
            cands = [(f, side) for f in combinations(tau, len(tau) - 1)]
            if side != 0:
                cands.append((tau, 0))
            seen = set()
            out = []
            for f in cands:
                if self.dim(*f) != d - 1:
                    continue
                lab = frozenset(self.labels(*f))
                if p in lab or lab in seen:
                    continue
                seen.add(lab)
                out.extend((p,) + t for t in self.triangulate(*f))
        self._memo[key] = out
        return out


def subdivide_by_level(
    X: SimplicialComplex,
    xi,
    t: float,
    eps: float | None = None,
    return_parents: bool = False,
):
    """Refine ``X`` so every open cell lies in one of ``{xi<t}``, ``{xi=t}``, ``{xi>t}``.

    Original vertex ids are kept; crossing points are appended after the
    existing coordinate rows.  With ``return_parents`` the second return value
    gives, per output cell, the index of the open cell of ``X`` containing it.
    """
    if X.dim > MAX_DIM:
        raise UnsupportedDimension(f"intrinsic dimension {X.dim} > {MAX_DIM}")
    xi = as_covector(xi, X.ambient_dim)
    h = X.points @ xi - float(t)
    tol = _tie_tol(X, xi, eps)
    sign = {v: (0 if abs(h[v]) <= tol else (1 if h[v] > 0 else -1)) for v in X.vertices}
    cut = _LevelCut(sign)

    label_cells = []
    for s in X.maximal_simplices:
        sg = [sign[v] for v in s]
        if not (max(sg) > 0 and min(sg) < 0):
            label_cells.append(tuple((0, v, -1) for v in s))
            continue
        label_cells.extend(cut.triangulate(s, 1))
        label_cells.extend(cut.triangulate(s, -1))

    cut_labels = sorted({lab for c in label_cells for lab in c if lab[0] == 1})
    n0 = len(X.points)
    new_id = {lab: n0 + i for i, lab in enumerate(cut_labels)}
    extra = []
    for (_, a, b) in cut_labels:
        pa, pb = X.points[a], X.points[b]
        lam = h[a] / (h[a] - h[b])
        extra.append(pa + lam * (pb - pa))
    points = np.vstack([X.points] + ([np.array(extra)] if extra else []))

    def vid(lab):
        return lab[1] if lab[0] == 0 else new_id[lab]

    cells = [tuple(sorted(vid(lab) for lab in c)) for c in label_cells]
    Y = SimplicialComplex(points, face_closure(cells))
    if not return_parents:
        return Y
    origin = {}
    for lab in cut_labels:
        origin[new_id[lab]] = (lab[1], lab[2])
    parents = np.empty(len(Y), dtype=int)
    for i, s in enumerate(Y.simplices):
        carrier = set()
        for v in s:
            carrier.update(origin.get(v, (v,)))
        parents[i] = X.index[tuple(sorted(carrier))]
    return Y, parents


def level_masks(Y: SimplicialComplex, xi, t: float, eps: float | None = None):
    """Masks of the open cells of a level-subdivided complex lying in
    ``{xi<t}``, ``{xi=t}`` and ``{xi>t}``."""
    xi = as_covector(xi, Y.ambient_dim)
    h = Y.points @ xi - float(t)
    tol = _tie_tol(Y, xi, eps)
    lo, hi = Y.level_signs(h, tol)
    cross = (lo < 0) & (hi > 0)
    if cross.any():
        s = Y.simplices[int(np.argmax(cross))]
        raise ValidationError(f"cell {s} straddles the level; subdivide first")
    above = hi > 0
    below = lo < 0
    return below, ~(above | below), above
