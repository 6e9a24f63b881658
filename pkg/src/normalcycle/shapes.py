"""Standard complexes used by the tests, the acceptance suite and the CLI."""

from __future__ import annotations

import numpy as np

from .complex import SimplicialComplex, build_complex


def point(n: int = 2) -> SimplicialComplex:
    return build_complex([[0.0] * n], [[0]])


def segment(n: int = 2, length: float = 1.0, pieces: int = 1) -> SimplicialComplex:
    pts = np.zeros((pieces + 1, n))
    pts[:, 0] = np.linspace(0.0, length, pieces + 1)
    return build_complex(pts, [[i, i + 1] for i in range(pieces)])


def polygon_boundary(pts) -> SimplicialComplex:
    k = len(pts)
    return build_complex(pts, [[i, (i + 1) % k] for i in range(k)])


def regular_polygon_points(k: int, radius: float = 1.0, phase: float = 0.0) -> np.ndarray:
    a = phase + 2 * np.pi * np.arange(k) / k
    return radius * np.column_stack([np.cos(a), np.sin(a)])


def circle(k: int = 64, radius: float = 1.0) -> SimplicialComplex:
    """Inscribed regular ``k``-gon as a closed PL curve."""
    return polygon_boundary(regular_polygon_points(k, radius))


def filled_polygon(pts) -> SimplicialComplex:
    """Fan triangulation of a star-shaped polygon from its vertex centroid."""
    pts = np.asarray(pts, dtype=float)
    k = len(pts)
    c = pts.mean(axis=0)
    return build_complex(
        np.vstack([pts, c]), [[i, (i + 1) % k, k] for i in range(k)]
    )


def convex_polygon(pts) -> SimplicialComplex:
    """Fan triangulation of a convex polygon from its first vertex."""
    k = len(pts)
    return build_complex(pts, [[0, i, i + 1] for i in range(1, k - 1)])


def triangle() -> SimplicialComplex:
    return build_complex([[0.0, 0.0], [1.0, 0.0], [0.2, 0.9]], [[0, 1, 2]])


def pentagon() -> SimplicialComplex:
    return convex_polygon(regular_polygon_points(5, 1.0, phase=0.1))


def l_polygon() -> SimplicialComplex:
    """Non-convex L-shaped region, triangulated."""
    pts = [[0, 0], [2, 0], [2, 1], [1, 1], [1, 2], [0, 2], [1, 0], [0, 1]]
    tris = [[0, 6, 3], [0, 3, 7], [6, 1, 2], [6, 2, 3], [7, 3, 4], [7, 4, 5]]
    return build_complex(np.array(pts, dtype=float), tris)


def unit_square(subdiv: int = 1) -> SimplicialComplex:
    k = subdiv + 1
    g = np.linspace(0.0, 1.0, k)
    pts = np.array([[x, y] for y in g for x in g])
    tris = []
    for j in range(subdiv):
        for i in range(subdiv):
            a = j * k + i
            tris += [[a, a + 1, a + k + 1], [a, a + k + 1, a + k]]
    return build_complex(pts, tris)


def disk(k: int = 12, rings: int = 2, radius: float = 1.0) -> SimplicialComplex:
    """Triangulated disk: center plus concentric rings of ``k`` vertices."""
    pts = [[0.0, 0.0]]
    for r in range(1, rings + 1):
        pts.extend(regular_polygon_points(k, radius * r / rings, phase=0.13 * r))
    tris = [[0, 1 + i, 1 + (i + 1) % k] for i in range(k)]
    for r in range(1, rings):
        a, b = 1 + (r - 1) * k, 1 + r * k
        for i in range(k):
            j = (i + 1) % k
            tris += [[a + i, b + i, b + j], [a + i, b + j, a + j]]
    return build_complex(np.array(pts), tris)


def annulus(k: int, inner: float, outer: float) -> SimplicialComplex:
    """Two concentric aligned ``k``-gons joined by a strip of triangles."""
    pts = np.vstack([regular_polygon_points(k, inner), regular_polygon_points(k, outer)])
    tris = []
    for i in range(k):
        j = (i + 1) % k
        tris += [[i, k + i, k + j], [i, k + j, j]]
    return build_complex(pts, tris)


def tetrahedron_points() -> np.ndarray:
    return np.array(
        [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.3, 0.9, 0.0], [0.35, 0.3, 0.8]]
    )


def tetrahedron() -> SimplicialComplex:
    return build_complex(tetrahedron_points(), [[0, 1, 2, 3]])


def tetrahedron_boundary() -> SimplicialComplex:
    return build_complex(
        tetrahedron_points(), [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]
    )


def octahedron_boundary() -> SimplicialComplex:
    pts = [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]]
    tris = [
        [a, b, c]
        for a in (0, 1)
        for b in (2, 3)
        for c in (4, 5)
    ]
    return build_complex(np.array(pts, dtype=float), tris)


def torus(a: int = 8, b: int = 6, R: float = 2.0, r: float = 0.8) -> SimplicialComplex:
    """Grid triangulation of a torus of revolution (``a, b >= 3``)."""
    pts = []
    for i in range(a):
        u = 2 * np.pi * i / a
        for j in range(b):
            v = 2 * np.pi * j / b
            pts.append([(R + r * np.cos(v)) * np.cos(u), (R + r * np.cos(v)) * np.sin(u), r * np.sin(v)])
    tris = []
    for i in range(a):
        for j in range(b):
            p = i * b + j
            q = ((i + 1) % a) * b + j
            p1 = i * b + (j + 1) % b
            q1 = ((i + 1) % a) * b + (j + 1) % b
            tris += [[p, q, q1], [p, q1, p1]]
    return build_complex(np.array(pts), tris)


def wedge_of_circles() -> SimplicialComplex:
    """Two triangle boundaries sharing one vertex (a PL figure eight)."""
    pts = [[0.0, 0.0], [1.0, 0.4], [1.1, -0.6], [-1.0, 0.5], [-0.9, -0.7]]
    return build_complex(pts, [[0, 1], [1, 2], [2, 0], [0, 3], [3, 4], [4, 0]])


def unit_cube() -> SimplicialComplex:
    """Unit cube split into six tetrahedra around the main diagonal."""
    pts = np.array([[x, y, z] for z in (0, 1) for y in (0, 1) for x in (0, 1)], dtype=float)
    # vertex id = x + 2y + 4z; each monotone lattice path 0 -> 7 is one tetrahedron
    tets = []
    for perm in ((1, 2, 4), (1, 4, 2), (2, 1, 4), (2, 4, 1), (4, 1, 2), (4, 2, 1)):
        path = [0]
        for step in perm:
            path.append(path[-1] + step)
        tets.append(path)
    return build_complex(pts, tets)


def quadric_graph(s1: int, s2: int, k: int = 8, rings: int = 3, radius: float = 1.0) -> SimplicialComplex:
    """PL graph of ``z = s1 x**2 + s2 y**2`` over a polar grid.

    The center is vertex 0.  Angular samples are offset by half a step, so no
    grid vertex lies on the zero set of an indefinite form.
    """
    xy = [[0.0, 0.0]]
    for r in range(1, rings + 1):
        xy.extend(regular_polygon_points(k, radius * r / rings, phase=np.pi / k))
    xy = np.array(xy)
    z = s1 * xy[:, 0] ** 2 + s2 * xy[:, 1] ** 2
    pts = np.column_stack([xy, z])
    tris = [[0, 1 + i, 1 + (i + 1) % k] for i in range(k)]
    for r in range(1, rings):
        a, b = 1 + (r - 1) * k, 1 + r * k
        for i in range(k):
            j = (i + 1) % k
            tris += [[a + i, b + i, b + j], [a + i, b + j, a + j]]
    return build_complex(pts, tris)


def random_planar_mesh(n_triangles: int = 200, seed: int = 0) -> SimplicialComplex:
    """Jittered grid triangulation of a rectangle with ``n_triangles`` triangles
    (``n_triangles`` must be twice a product of two integers)."""
    cols = int(np.sqrt(n_triangles / 2))
    while (n_triangles // 2) % cols:
        cols -= 1
    rows = n_triangles // 2 // cols
    rng = np.random.default_rng(seed)
    pts = []
    for j in range(rows + 1):
        for i in range(cols + 1):
            jit = rng.uniform(-0.2, 0.2, size=2) if 0 < i < cols and 0 < j < rows else 0.0
            pts.append(np.array([i, j], dtype=float) + jit)
    tris = []
    w = cols + 1
    for j in range(rows):
        for i in range(cols):
            a = j * w + i
            if (i + j) % 2:
                tris += [[a, a + 1, a + w + 1], [a, a + w + 1, a + w]]
            else:
                tris += [[a, a + 1, a + w], [a + 1, a + w + 1, a + w]]
    return build_complex(np.array(pts), tris)
