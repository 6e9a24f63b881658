import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from normalcycle import shapes
from normalcycle.complex import (
    full_subcomplex_mask,
    sample_generic_covector,
    subcomplex,
    subdivide_by_level,
)
from normalcycle.errors import NonGenericCovector, UnknownVertex
from normalcycle.euler import ConstructibleFunction, chi_o
from normalcycle.morse import (
    JumpMeasure,
    bl_distance,
    convergence_harness,
    fiber_integral,
    index_sum_check,
    jump_identity_check,
    jump_measure,
    level_integrals,
    morse_index,
    morse_slice,
    superlevel_chi,
    superlevel_integral,
)
from normalcycle.normal_cycle import build_normal_cycle, multiplicity

SUITE = ["point", "segment", "disk", "octahedron_boundary", "torus", "wedge_of_circles",
         "l_polygon", "tetrahedron", "unit_cube"]


def test_index_of_segment_endpoints():
    X = shapes.segment()
    assert morse_index(X, [1.0, 0.0], 0) == 0
    assert morse_index(X, [1.0, 0.0], 1) == 1
    assert morse_slice(X, [1.0, 0.3]).total == 1


def test_index_of_point_and_missing_vertex():
    assert morse_index(shapes.point(), [0.2, 0.7], 0) == 1
    X = subcomplex(shapes.segment(), shapes.segment().mask([(0,)]))
    assert morse_index(X, [1.0, 0.0], 1) == 0
    with pytest.raises(UnknownVertex):
        morse_index(X, [1.0, 0.0], 5)


def test_vertices_inside_edges_are_regular():
    X = shapes.triangle()
    Y = subdivide_by_level(X, [1.0, 0.0], 0.5)
    xi = sample_generic_covector(Y, 4)
    new = [v for v in Y.vertices if v >= len(X.points)]
    assert all(morse_index(Y, xi, v) == 0 for v in new)


def test_slice_rejects_ties():
    with pytest.raises(NonGenericCovector):
        morse_slice(shapes.unit_square(), [1.0, 0.0])


@pytest.mark.parametrize("s1", [1, -1])
@pytest.mark.parametrize("s2", [1, -1])
@pytest.mark.parametrize("sign", [1, -1])
def test_quadric_center_index(s1, s2, sign):
    X = shapes.quadric_graph(s1, s2)
    nu_plus = (s1 > 0) + (s2 > 0)
    assert morse_index(X, [0, 0, sign], 0) == (-1) ** nu_plus


@pytest.mark.parametrize("s1,s2", [(1, 1), (1, -1), (-1, -1)])
def test_quadric_center_multiplicity_on_normal_cycle(s1, s2):
    X = shapes.quadric_graph(s1, s2)
    N = build_normal_cycle(X)
    xi = np.array([0.0, 0.0, 1.0])
    assert multiplicity(N, (0,), xi) == morse_index(X, xi, 0)


@pytest.mark.parametrize("name", SUITE)
def test_gauss_bonnet(name):
    X = getattr(shapes, name)()
    for seed in range(10):
        xi = sample_generic_covector(X, seed)
        assert morse_slice(X, xi).total == chi_o(X)


@pytest.mark.parametrize("name", SUITE)
def test_fiber_and_superlevel_against_cell_count(name):
    X = getattr(shapes, name)()
    w = np.ones(len(X), dtype=int)
    xi = sample_generic_covector(X, 7)
    h = np.unique(X.points @ xi)
    probes = np.concatenate([h, 0.5 * (h[1:] + h[:-1]), [h[0] - 1, h[-1] + 1]])
    for s in probes:
        assert fiber_integral(X, xi, s) == oracles.fiber_chi(X, w, xi, s)
        assert superlevel_chi(X, xi, s) == oracles.superlevel_chi(X, w, xi, s)
        assert superlevel_chi(X, xi, s, closed=False) == oracles.superlevel_chi(X, w, xi, s, False)


def test_weighted_jump_against_cell_count():
    X = shapes.torus()
    rng = np.random.default_rng(3)
    f = ConstructibleFunction(X, rng.integers(-2, 3, len(X)))
    xi = sample_generic_covector(X, 1)
    assert list(jump_measure(f, xi).atoms) == oracles.jump_atoms(X, f.weights, xi)
    for c in np.unique(X.points @ xi)[::5]:
        assert superlevel_integral(f, xi, c) == oracles.superlevel_chi(X, f.weights, xi, c)


def test_segment_jump_sits_at_top_endpoint():
    J = jump_measure(shapes.segment(), [1.0, 0.0])
    assert J.atoms == ((1.0, 1),)


@pytest.mark.parametrize("name", SUITE)
def test_jump_is_pushforward_of_slice(name):
    X = getattr(shapes, name)()
    for seed in range(5):
        xi = sample_generic_covector(X, seed)
        assert jump_measure(X, xi) == morse_slice(X, xi).pushforward()


@pytest.mark.parametrize("name", SUITE)
def test_level_identities(name):
    X = getattr(shapes, name)()
    xi = sample_generic_covector(X, 2)
    for t in np.unique(X.points @ xi):
        a, b = index_sum_check(X, xi, t)
        assert a == b
        c, d = jump_identity_check(X, xi, t)
        assert c == d


@pytest.mark.parametrize("name", ["disk", "torus", "tetrahedron", "l_polygon"])
def test_indices_survive_subdivision(name):
    X = getattr(shapes, name)()
    xi0 = sample_generic_covector(X, 0)
    h = X.points @ xi0
    Y = subdivide_by_level(X, xi0, 0.5 * (h.min() + h.max()) + 1e-3)
    xi = sample_generic_covector(Y, 9)
    for v in X.vertices:
        assert morse_index(Y, xi, v) == morse_index(X, xi, v)
    for v in Y.vertices:
        if v >= len(X.points):
            assert morse_index(Y, xi, v) == 0


def test_inclusion_exclusion_on_mesh():
    M = shapes.random_planar_mesh(200, seed=1)
    rng = np.random.default_rng(5)
    verts = np.array(M.vertices)
    for _ in range(5):
        a = full_subcomplex_mask(M, verts[rng.random(len(verts)) < 0.6])
        b = full_subcomplex_mask(M, verts[rng.random(len(verts)) < 0.6])
        U, I = subcomplex(M, a | b), subcomplex(M, a & b)
        A, B = subcomplex(M, a), subcomplex(M, b)
        xi = sample_generic_covector(M, int(rng.integers(1 << 30)))
        for v in M.vertices:
            lhs = morse_index(U, xi, v) + morse_index(I, xi, v)
            assert lhs == morse_index(A, xi, v) + morse_index(B, xi, v)


# --- bounded-Lipschitz distance ------------------------------------------------


def test_bl_hand_values():
    d0 = JumpMeasure(((0.0, 1),))
    assert bl_distance(d0, JumpMeasure()) == pytest.approx(1.0)
    for eps in (0.1, 0.5, 1.5, 2.0, 3.0):
        assert bl_distance(d0, JumpMeasure(((eps, 1),))) == pytest.approx(min(eps, 2.0))
    assert bl_distance(JumpMeasure(((0.0, 3),)), JumpMeasure(((0.0, -2),))) == pytest.approx(5.0)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.tuples(st.integers(-8, 8), st.integers(-3, 3)), max_size=5),
    st.lists(st.tuples(st.integers(-8, 8), st.integers(-3, 3)), max_size=5),
)
def test_bl_matches_grid_search(a, b):
    A = JumpMeasure.from_pairs((0.25 * t, m) for t, m in a)
    B = JumpMeasure.from_pairs((0.25 * t, m) for t, m in b)
    want = oracles.bl_grid(A.atoms, B.atoms, 0.25)
    assert bl_distance(A, B) == pytest.approx(want, abs=1e-7)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.tuples(st.floats(-3, 3), st.integers(-3, 3)), max_size=4),
    st.lists(st.tuples(st.floats(-3, 3), st.integers(-3, 3)), max_size=4),
    st.lists(st.tuples(st.floats(-3, 3), st.integers(-3, 3)), max_size=4),
)
def test_bl_is_a_metric(a, b, c):
    A, B, C = (JumpMeasure.from_pairs(x) for x in (a, b, c))
    assert bl_distance(A, A) == pytest.approx(0.0, abs=1e-9)
    assert bl_distance(A, B) == pytest.approx(bl_distance(B, A), abs=1e-7)
    assert bl_distance(A, C) <= bl_distance(A, B) + bl_distance(B, C) + 1e-7


# --- convergence harness ------------------------------------------------------------


def test_harness_constant_sequence():
    X = shapes.circle(16)
    rep = convergence_harness([X, X, X], X, xi_samples=4)
    assert np.all(rep.distances == 0)
    assert rep.condition_c.all()
    assert rep.converged


def test_harness_refinement_sequence():
    target = shapes.segment()
    seq = [shapes.segment(pieces=p) for p in (2, 4, 8)]
    rep = convergence_harness(seq, target, xi_samples=5, seed=3)
    assert np.allclose(rep.distances, 0)
    assert rep.condition_c.all()
    assert rep.mass_bound == 1


def test_harness_is_deterministic():
    seq = [shapes.annulus(32, 1.0, 1.5), shapes.annulus(32, 1.0, 1.25)]
    a = convergence_harness(seq, shapes.circle(32), xi_samples=3, seed=1)
    b = convergence_harness(seq, shapes.circle(32), xi_samples=3, seed=1)
    assert np.array_equal(a.distances, b.distances)
    assert np.array_equal(a.covectors, b.covectors)


@pytest.mark.parametrize("name", ["torus", "unit_cube", "l_polygon", "wedge_of_circles"])
def test_closed_form_level_counts_match_subdivision(name):
    X = getattr(shapes, name)()
    rng = np.random.default_rng(1)
    f = ConstructibleFunction(X, rng.integers(-3, 4, len(X)))
    xi = sample_generic_covector(X, 6)
    h = np.unique(X.points @ xi)
    for t in np.concatenate([h, 0.5 * (h[1:] + h[:-1])]):
        assert level_integrals(f, xi, t) == level_integrals(f, xi, t, method="subdivide")


def test_negated_function_negates_jumps():
    X = shapes.disk()
    f = ConstructibleFunction(X, np.ones(len(X), dtype=int))
    xi = sample_generic_covector(X, 2)
    assert jump_measure(-f, xi) == -jump_measure(f, xi)
