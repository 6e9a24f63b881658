from dataclasses import replace

import numpy as np
import pytest

from normalcycle import shapes
from normalcycle.complex import build_complex, closure_mask, sample_generic_covector, subcomplex
from normalcycle.errors import NonGenericCovector, UnsupportedDimension
from normalcycle.morse import morse_slice
from normalcycle.normal_cycle import (
    NormalCycle,
    build_normal_cycle,
    check_cycle_2d,
    check_legendrian,
    check_slices,
    cone_extend,
    multiplicity,
    same_multiplicities,
    slice_at,
)
from normalcycle.spherical import arrangement_cells, sphere_measure


def outward_normals(pts):
    """Outward unit normals of the edges of a counterclockwise convex polygon."""
    pts = np.asarray(pts, dtype=float)
    e = np.roll(pts, -1, axis=0) - pts
    n = np.column_stack([e[:, 1], -e[:, 0]])
    return n / np.linalg.norm(n, axis=1)[:, None]


@pytest.mark.parametrize("k", [3, 5, 8])
def test_convex_polygon_matches_normal_fan(k):
    pts = shapes.regular_polygon_points(k, 1.3, phase=0.2)
    X = shapes.convex_polygon(pts)
    N = build_normal_cycle(X)
    nrm = outward_normals(pts)
    for i in range(k):
        arcs = N.pieces_at((i,))
        assert len(arcs) == 1 and arcs[0].multiplicity == 1
        a = arcs[0].cell
        # the arc runs from the normal of the incoming edge to that of the outgoing one
        assert np.allclose(a.vertices[0], nrm[i - 1])
        assert np.allclose(a.vertices[1], nrm[i])
        assert a.measure == pytest.approx(2 * np.pi / k)
        e = N.pieces_at(tuple(sorted((i, (i + 1) % k))))
        assert len(e) == 1 and np.allclose(e[0].cell.vertices[0], nrm[i])
    # fan diagonals carry nothing
    for s in X.edges:
        if (s[1] - s[0]) % k not in (1, k - 1):
            assert N.pieces_at(s) == []
    assert not any(len(p.simplex) == 3 for p in N.pieces)


def test_point_pieces():
    N = build_normal_cycle(shapes.point(2))
    assert len(N.pieces) == 1
    assert N.pieces[0].cell.measure == pytest.approx(2 * np.pi)
    N3 = build_normal_cycle(shapes.point(3))
    assert N3.pieces[0].cell.measure == pytest.approx(4 * np.pi)


def test_segment_pieces():
    N = build_normal_cycle(shapes.segment())
    assert [p.cell.measure for p in N.pieces_at((0,))] == pytest.approx([np.pi])
    assert [p.cell.measure for p in N.pieces_at((1,))] == pytest.approx([np.pi])
    normals = sorted(p.cell.vertices[0][1] for p in N.pieces_at((0, 1)))
    assert normals == pytest.approx([-1.0, 1.0])


def test_open_selection_gets_negative_multiplicity():
    X = shapes.segment()
    N = build_normal_cycle(X)
    # the closed segment and its endpoints differ by the open edge
    ends = build_normal_cycle(subcomplex(X, X.mask([(0,), (1,)])))
    assert multiplicity(N, (0,), [-1.0, 0.0]) == 1
    assert multiplicity(ends, (0,), [1.0, 0.0]) == 1
    assert multiplicity(N, (0,), [1.0, 0.0]) == 0


R2 = ["point", "segment", "triangle", "pentagon", "l_polygon", "disk", "wedge_of_circles"]


@pytest.mark.parametrize("name", R2)
def test_planar_cycle_and_legendrian(name):
    N = build_normal_cycle(getattr(shapes, name)())
    assert check_legendrian(N).passed
    assert check_cycle_2d(N).passed


@pytest.mark.parametrize("name", R2 + ["tetrahedron", "torus", "unit_cube"])
def test_slices_agree_with_direct_indices(name):
    X = getattr(shapes, name)()
    rep = check_slices(build_normal_cycle(X), samples=30, seed=1)
    assert rep.passed, rep.details[:3]


def test_corrupted_multiplicity_breaks_cycle():
    N = build_normal_cycle(shapes.pentagon())
    bad = list(N.pieces)
    bad[0] = replace(bad[0], multiplicity=2)
    rep = check_cycle_2d(NormalCycle(N.complex, tuple(bad)))
    assert not rep.passed and rep.details


def test_corrupted_covector_breaks_legendrian():
    N = build_normal_cycle(shapes.pentagon())
    bad = list(N.pieces)
    k = next(i for i, p in enumerate(bad) if len(p.simplex) == 2)
    cell = bad[k].cell
    tilted = cell.vertices[0] + np.array([0.3, -0.2])
    bad[k] = replace(bad[k], cell=replace(cell, vertices=tilted[None, :], sample=tilted))
    assert not check_legendrian(NormalCycle(N.complex, tuple(bad))).passed


def test_cycle_check_needs_plane():
    with pytest.raises(UnsupportedDimension):
        check_cycle_2d(build_normal_cycle(shapes.segment(3)))


def test_slice_at_boundary_raises():
    N = build_normal_cycle(shapes.unit_square())
    with pytest.raises(NonGenericCovector):
        slice_at(N, [1.0, 0.0])


def two_triangles():
    pts = [[0, 0], [1, 0], [0.3, 1], [1.2, 0.9], [3, 0], [4, 0], [3.5, 1]]
    return build_complex(pts, [[0, 1, 2], [1, 2, 3], [4, 5, 6]])


def closed(X, cells):
    return subcomplex(X, closure_mask(X, X.mask(cells)))


def test_disjoint_union_adds():
    X = two_triangles()
    left = closed(X, [(0, 1, 2), (1, 2, 3)])
    right = closed(X, [(4, 5, 6)])
    assert same_multiplicities([build_normal_cycle(X)], [build_normal_cycle(left), build_normal_cycle(right)])


def test_inclusion_exclusion_on_shared_edge():
    X = two_triangles()
    A = closed(X, [(0, 1, 2)])
    B = closed(X, [(1, 2, 3)])
    U = closed(X, [(0, 1, 2), (1, 2, 3)])
    I = closed(X, [(1, 2)])
    NA, NB, NU, NI = (build_normal_cycle(Y) for Y in (A, B, U, I))
    assert same_multiplicities([NU, NI], [NA, NB])
    assert not same_multiplicities([NU], [NA, NB])


def test_cone_slices_are_scale_invariant():
    X = shapes.l_polygon()
    C = cone_extend(build_normal_cycle(X))
    xi = sample_generic_covector(X, 4)
    assert C.slice(3.5 * xi).atoms == morse_slice(X, xi).atoms
    assert C.body.all()


def test_arrangement_measures_sum_to_sphere():
    rng = np.random.default_rng(0)
    normals = rng.standard_normal((5, 3))
    cells = arrangement_cells(np.eye(3), normals)
    assert sum(c.measure for c in cells) == pytest.approx(sphere_measure(2))
    # n great circles in general position leave n(n-1) + 2 cells
    assert len(cells) == 5 * 4 + 2
    for c in cells:
        assert np.all(c.constraints @ c.sample > 0)


def test_circle_arrangement():
    cells = arrangement_cells(np.eye(2), [[1.0, 0.0], [1.0, 1.0]])
    assert len(cells) == 4
    assert sum(c.measure for c in cells) == pytest.approx(2 * np.pi)
