"""Arrangements of great subspheres on low-dimensional unit spheres.

A carrier is the unit sphere of a linear subspace, given by an orthonormal
basis (columns of an ``n x (c+1)`` matrix).  Cutting normals are ambient
vectors ``a``; the cut is ``{xi in carrier : a . xi = 0}``.  Only the open
top-dimensional cells are produced.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MERGE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SphericalCell:
    """Open top-dimensional cell of an arrangement on a carrier sphere.

    ``kind`` is ``"point"`` (carrier of dimension 0), ``"arc"`` or
    ``"polygon"``.  ``vertices`` holds the point, the arc's start and end
    (counterclockwise in the carrier basis; empty for a full circle) or the
    polygon's corners in boundary order (empty for a full sphere or a
    hemisphere).  ``constraints`` rows ``c`` satisfy ``c . xi > 0`` on the cell.
    """

    kind: str
    basis: np.ndarray
    vertices: np.ndarray
    sample: np.ndarray
    constraints: np.ndarray
    measure: float

    def __eq__(self, other):
        if not isinstance(other, SphericalCell):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.measure == other.measure
            and all(
                a.shape == b.shape and bool(np.array_equal(a, b))
                for a, b in (
                    (self.basis, other.basis),
                    (self.vertices, other.vertices),
                    (self.sample, other.sample),
                    (self.constraints, other.constraints),
                )
            )
        )

    @property
    def carrier_dim(self) -> int:
        return self.basis.shape[1] - 1

    def in_carrier(self, xi, tol: float = MERGE_TOL) -> bool:
        xi = np.asarray(xi, dtype=float)
        resid = xi - self.basis @ (self.basis.T @ xi)
        return float(np.linalg.norm(resid)) <= tol * max(1.0, float(np.linalg.norm(xi)))

    def margin(self, xi) -> float:
        """Smallest constraint value at ``xi`` (``inf`` without constraints)."""
        if self.kind == "point":
            return np.inf
        if len(self.constraints) == 0:
            return np.inf
        return float(np.min(self.constraints @ np.asarray(xi, dtype=float)))

    def contains(self, xi, tol: float = MERGE_TOL) -> bool:
        xi = np.asarray(xi, dtype=float)
        norm = float(np.linalg.norm(xi))
        if norm == 0:
            return False
        u = xi / norm
        if self.kind == "point":
            return float(np.linalg.norm(u - self.vertices[0])) <= tol
        return self.in_carrier(u, tol) and self.margin(u) > tol


def _unit(v):
    return v / np.linalg.norm(v)


def _empty(n):
    return np.zeros((0, n))


def point_cells(basis: np.ndarray) -> list[SphericalCell]:
    n = basis.shape[0]
    u = basis[:, 0]
    return [
        SphericalCell("point", basis, s * u[None, :], s * u, _empty(n), 1.0)
        for s in (1.0, -1.0)
    ]


def circle_cells(basis: np.ndarray, normals: np.ndarray) -> list[SphericalCell]:
    n = basis.shape[0]
    b = np.asarray(normals, dtype=float).reshape(-1, n) @ basis
    angles = []
    for bx, by in b:
        if np.hypot(bx, by) <= MERGE_TOL:
            continue
        base = np.arctan2(by, bx) + np.pi / 2
        angles += [base % (2 * np.pi), (base + np.pi) % (2 * np.pi)]
    angles.sort()
    cuts = []
    for a in angles:
        if not cuts or a - cuts[-1] > MERGE_TOL:
            cuts.append(a)
    if len(cuts) > 1 and cuts[0] + 2 * np.pi - cuts[-1] <= MERGE_TOL:
        cuts.pop()

    def emb(theta):
        return basis @ np.array([np.cos(theta), np.sin(theta)])

    if not cuts:
        return [SphericalCell("arc", basis, _empty(n), basis[:, 0].copy(), _empty(n), 2 * np.pi)]
    cells = []
    amb = np.asarray(normals, dtype=float).reshape(-1, n)
    for i, a0 in enumerate(cuts):
        a1 = cuts[i + 1] if i + 1 < len(cuts) else cuts[0] + 2 * np.pi
        mid = emb(0.5 * (a0 + a1))
        vals = amb @ mid
        cons = np.array([np.sign(v) * a for v, a in zip(vals, amb) if abs(v) > MERGE_TOL]).reshape(-1, n)
        cells.append(
            SphericalCell("arc", basis, np.vstack([emb(a0), emb(a1)]), mid, cons, float(a1 - a0))
        )
    return cells


def _dedupe_planes(b: np.ndarray) -> np.ndarray:
    out: list[np.ndarray] = []
    for v in b:
        nv = np.linalg.norm(v)
        if nv <= MERGE_TOL:
            continue
        v = v / nv
        if any(np.linalg.norm(np.cross(v, w)) <= MERGE_TOL for w in out):
            continue
        out.append(v)
    return np.array(out).reshape(-1, 3)


def _dedupe_points(pts) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for p in pts:
        if all(np.linalg.norm(p - q) > MERGE_TOL for q in out):
            out.append(p)
    return out


def sphere_cells(basis: np.ndarray, normals: np.ndarray) -> list[SphericalCell]:
    """Cells of a great-circle arrangement on a 2-sphere.

    Corners are found at the arrangement vertices: around each vertex the
    circles through it cut the tangent directions into sectors, and each
    sector is the corner of exactly one cell.  A point nudged into the sector
    identifies the cell by its sign vector; the area follows from Girard's
    theorem, ``sum of corner angles - (k - 2) pi``.
    """
    n = basis.shape[0]
    amb = np.asarray(normals, dtype=float).reshape(-1, n)
    planes = _dedupe_planes(amb @ basis)

    def lift(v):
        return basis @ v

    if len(planes) == 0:
        e = np.array([0.0, 0.0, 1.0])
        return [SphericalCell("polygon", basis, _empty(n), lift(e), _empty(n), 4 * np.pi)]
    if len(planes) == 1:
        p = planes[0]
        return [
            SphericalCell("polygon", basis, _empty(n), lift(s * p), lift(s * p)[None, :], 2 * np.pi)
            for s in (1.0, -1.0)
        ]

    verts = []
    for i in range(len(planes)):
        for j in range(i + 1, len(planes)):
            c = np.cross(planes[i], planes[j])
            if np.linalg.norm(c) > MERGE_TOL:
                c = _unit(c)
                verts += [c, -c]
    verts = _dedupe_points(verts)

    corners: dict[tuple, list] = {}
    for p in verts:
        through = [q for q in planes if abs(q @ p) <= 1e-7]
        u = _unit(np.cross(p, through[0]))
        w = np.cross(p, u)
        dirs = []
        for q in through:
            d = _unit(np.cross(q, p))
            for s in (1.0, -1.0):
                dirs.append(np.arctan2((s * d) @ w, (s * d) @ u) % (2 * np.pi))
        dirs = sorted(dirs)
        others = [q for q in planes if abs(q @ p) > 1e-7]
        for k, a0 in enumerate(dirs):
            a1 = dirs[k + 1] if k + 1 < len(dirs) else dirs[0] + 2 * np.pi
            width = a1 - a0
            if width <= MERGE_TOL:
                continue
            mid = 0.5 * (a0 + a1)
            d = np.cos(mid) * u + np.sin(mid) * w
            step = np.pi / 2
            for q in others:
                # first t in (0, pi) with q . (cos t p + sin t d) = 0
                t = np.arctan2(-(q @ p), q @ d) % np.pi
                if t > 0:
                    step = min(step, t)
            x = np.cos(0.5 * step) * p + np.sin(0.5 * step) * d
            key = tuple(int(s) for s in np.sign(planes @ x))
            corners.setdefault(key, []).append((p, width, x))

    cells = []
    for key in sorted(corners):
        items = corners[key]
        sample = _unit(np.sum([x for _, _, x in items], axis=0))
        k = len(items)
        area = float(sum(wd for _, wd, _ in items) - (k - 2) * np.pi)
        # order corners around the sample
        u = _unit(np.cross(sample, planes[0]) if np.linalg.norm(np.cross(sample, planes[0])) > 1e-6 else np.cross(sample, planes[1]))
        w = np.cross(sample, u)
        pts = sorted((p for p, _, _ in items), key=lambda p: np.arctan2(p @ w, p @ u))
        cons = np.array([s * q for s, q in zip(key, planes)])
        cells.append(
            SphericalCell(
                "polygon",
                basis,
                np.array([lift(p) for p in pts]),
                lift(sample),
                np.array([lift(c) for c in cons]),
                area,
            )
        )
    return cells


def arrangement_cells(basis: np.ndarray, normals) -> list[SphericalCell]:
    """Open cells cut out of the carrier sphere of ``basis`` by ``normals``."""
    c = basis.shape[1] - 1
    n = basis.shape[0]
    normals = np.asarray(normals, dtype=float).reshape(-1, n)
    if c < 0:
        return []
    if c == 0:
        return point_cells(basis)
    if c == 1:
        return circle_cells(basis, normals)
    if c == 2:
        return sphere_cells(basis, normals)
    raise ValueError(f"carrier spheres of dimension {c} are not supported")


def sphere_measure(c: int) -> float:
    """Total measure of the unit ``c``-sphere (counting measure for ``c = 0``)."""
    return {0: 2.0, 1: 2 * np.pi, 2: 4 * np.pi}[c]
