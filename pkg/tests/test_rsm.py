"""RSM construction against independent oracles, axiom validation, serialization."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rsmc import (
    AllZeroProfileError,
    DimensionMismatchError,
    DirectedInputError,
    Graph,
    NumericalError,
    ParseError,
    RsmMatrix,
    SingularityError,
    SpeedProfile,
    check_scaling,
    connected_components,
    erf_matrix,
    laplacian,
    laplacian_pseudoinverse,
    rsm_from_csv,
    rsm_from_json,
    rsm_to_csv,
    rsm_to_json,
    scale_weights,
    sdf_matrix,
    speed_profile_stats,
    validate_rsm,
)

from graphgen import (
    barbell,
    complete_graph,
    cycle_graph,
    path_graph,
    random_connected_graph,
    random_graph,
    random_tree,
)
from oracles import floyd_warshall_distances, resistance_matrix_oracle


def assert_matrices_match(actual, expected, tol=1e-9):
    assert actual.shape == expected.shape
    assert (np.isinf(actual) == np.isinf(expected)).all()
    finite = np.isfinite(expected)
    np.testing.assert_allclose(actual[finite], expected[finite], rtol=tol, atol=tol)


# ---------------------------------------------------------------------------
# Shortest-path distances
# ---------------------------------------------------------------------------

@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10_000), st.booleans())
def test_sdf_matches_floyd_warshall(seed, directed):
    rng = np.random.RandomState(seed)
    g = random_graph(rng, n_max=12, directed=directed)
    assert_matrices_match(sdf_matrix(g).values, floyd_warshall_distances(g))


def test_sdf_tag_and_basic_shape():
    m = sdf_matrix(path_graph(3))
    assert m.source_rsm == "sdf"
    assert m.values[0, 2] == 2.0
    assert m.values[2, 0] == 2.0


def test_sdf_directed_asymmetry():
    g = Graph(2, ((0, 1, 3.0),), directed=True)
    m = sdf_matrix(g)
    assert m.values[0, 1] == 3.0
    assert math.isinf(m.values[1, 0])


# ---------------------------------------------------------------------------
# Effective resistance
# ---------------------------------------------------------------------------

@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10_000))
def test_erf_matches_eigendecomposition_oracle(seed):
    rng = np.random.RandomState(seed)
    g = random_graph(rng, n_max=12)
    assert_matrices_match(erf_matrix(g).values, resistance_matrix_oracle(g))


def test_erf_closed_forms():
    for n in (2, 3, 5, 10, 50):
        m = erf_matrix(path_graph(n))
        assert m.values[0, n - 1] == pytest.approx(n - 1, abs=1e-9)
    tri = erf_matrix(complete_graph(3))
    assert tri.values[0, 1] == pytest.approx(2 / 3, abs=1e-9)
    k4 = erf_matrix(complete_graph(4))
    assert k4.values[0, 1] == pytest.approx(0.5, abs=1e-9)


def test_erf_rejects_directed():
    g = Graph(2, ((0, 1, 1.0),), directed=True)
    with pytest.raises(DirectedInputError):
        erf_matrix(g)
    with pytest.raises(DirectedInputError):
        laplacian(g)
    with pytest.raises(DirectedInputError):
        laplacian_pseudoinverse(g)


def test_erf_cross_component_is_inf():
    g = Graph(4, ((0, 1, 1.0), (2, 3, 1.0)), directed=False)
    m = erf_matrix(g)
    assert math.isinf(m.values[0, 2])
    assert m.values[0, 1] == pytest.approx(1.0, abs=1e-12)


def test_pseudoinverse_requires_connected():
    with pytest.raises(SingularityError):
        laplacian_pseudoinverse(Graph(3, ((0, 1, 1.0),), directed=False))


def test_pseudoinverse_residual_reported():
    # conductances spread over ~24 orders of magnitude wreck the inversion
    g = Graph(
        5,
        tuple((i, i + 1, 1e12 if i % 2 == 0 else 1e-12) for i in range(4)),
        directed=False,
    )
    with pytest.raises(NumericalError):
        erf_matrix(g)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_pseudoinverse_residual_small_on_sane_graphs(seed):
    rng = np.random.RandomState(seed)
    g = random_connected_graph(rng, n_max=12)
    lap = laplacian(g)
    pinv = laplacian_pseudoinverse(g)
    assert np.abs(lap @ pinv @ lap - lap).max() <= 1e-9
    assert np.abs(pinv - pinv.T).max() == 0.0


def test_single_vertex_graphs():
    g = Graph(1, (), directed=False)
    assert sdf_matrix(g).values.tolist() == [[0.0]]
    assert erf_matrix(g).values.tolist() == [[0.0]]
    assert laplacian_pseudoinverse(g).tolist() == [[0.0]]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_erf_dominated_by_sdf_on_unit_graphs(seed):
    rng = np.random.RandomState(seed)
    g = random_connected_graph(rng, n_max=12, unit_weights=True)
    r = erf_matrix(g).values
    d = sdf_matrix(g).values
    assert (r <= d + 1e-9).all()


def test_erf_deterministic_across_thread_caps(monkeypatch):
    rng = np.random.RandomState(7)
    parts = [random_connected_graph(rng, n_max=6) for _ in range(4)]
    edges = []
    offset = 0
    for part in parts:
        edges.extend((s + offset, d + offset, w) for s, d, w in part.edges)
        offset += part.vertex_count
    g = Graph(offset, tuple(edges), directed=False)

    monkeypatch.setenv("RSMC_THREADS", "1")
    serial = erf_matrix(g).values
    monkeypatch.setenv("RSMC_THREADS", "4")
    threaded = erf_matrix(g).values
    assert (serial == threaded).all()


# ---------------------------------------------------------------------------
# Axiom validation
# ---------------------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_generated_matrices_pass_validation(seed):
    rng = np.random.RandomState(seed)
    g = random_graph(rng, n_max=12)
    for m in (sdf_matrix(g), erf_matrix(g)):
        report = validate_rsm(m, g, tol=1e-8)
        assert report.all_passed, report.summary_lines()
        assert report.violations == ()


def test_validation_flags_negative_entry():
    vals = sdf_matrix(path_graph(3)).values.copy()
    vals[0, 1] = -0.1
    report = validate_rsm(RsmMatrix(vals, "external"), path_graph(3))
    assert not report.nonnegativity
    assert any(v.kind == "negative" and v.where == (0, 1) for v in report.violations)
    assert not report.all_passed


def test_validation_flags_nonzero_diagonal():
    vals = sdf_matrix(path_graph(5)).values.copy()
    vals[3, 3] = 0.5
    report = validate_rsm(RsmMatrix(vals, "external"), path_graph(5))
    assert not report.coincidence
    assert any(v.kind == "diagonal-nonzero" and v.where == (3,) for v in report.violations)


def test_validation_flags_offdiagonal_zero():
    vals = np.array([[0.0, 0.0], [0.0, 0.0]])
    report = validate_rsm(RsmMatrix(vals, "external"))
    assert not report.coincidence


def test_validation_flags_wrong_infinity_pattern():
    g = path_graph(3)
    vals = sdf_matrix(g).values.copy()
    vals[0, 2] = vals[2, 0] = np.inf
    report = validate_rsm(RsmMatrix(vals, "external"), g)
    assert report.connectivity is False
    finite_where_disconnected = np.full((2, 2), 1.0)
    np.fill_diagonal(finite_where_disconnected, 0.0)
    report2 = validate_rsm(
        RsmMatrix(finite_where_disconnected, "external"), Graph(2, (), directed=False)
    )
    assert report2.connectivity is False


def test_validation_flags_triangle_violation():
    vals = np.array([
        [0.0, 1.0, 5.0],
        [1.0, 0.0, 1.0],
        [5.0, 1.0, 0.0],
    ])
    report = validate_rsm(RsmMatrix(vals, "external"))
    assert not report.triangle
    assert any(v.kind == "triangle" for v in report.violations)


def test_validation_flags_asymmetry_on_undirected():
    g = path_graph(2)
    vals = np.array([[0.0, 1.0], [2.0, 0.0]])
    report = validate_rsm(RsmMatrix(vals, "external"), g)
    assert report.symmetry is False
    assert any(v.kind == "asymmetry" for v in report.violations)


def test_validation_skips_checks_without_graph_and_on_directed():
    m = sdf_matrix(path_graph(3))
    no_graph = validate_rsm(m)
    assert no_graph.connectivity is None
    assert no_graph.symmetry is True
    directed = Graph(2, ((0, 1, 1.0),), directed=True)
    report = validate_rsm(sdf_matrix(directed), directed)
    assert report.symmetry is None


def test_validation_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        validate_rsm(sdf_matrix(path_graph(3)), path_graph(4))


def test_validation_rejects_bad_tol():
    m = sdf_matrix(path_graph(2))
    with pytest.raises(ValueError):
        validate_rsm(m, tol=0.0)
    with pytest.raises(ValueError):
        validate_rsm(m, tol=-1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_sdf_cut_node_equality_on_trees(seed):
    # every internal tree vertex cuts the graph, so d(u,v) = d(u,w) + d(w,v)
    rng = np.random.RandomState(seed)
    g = random_tree(rng, n_max=10)
    report = validate_rsm(sdf_matrix(g), g, tol=1e-8)
    assert report.triangle, report.summary_lines()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_erf_cut_node_additivity_on_barbells(seed):
    rng = np.random.RandomState(seed)
    g, cut, left, right = barbell(rng)
    r = erf_matrix(g).values
    for a in left:
        for b in right:
            assert r[a, b] == pytest.approx(r[a, cut] + r[cut, b], abs=1e-8)
    report = validate_rsm(erf_matrix(g), g, tol=1e-8)
    assert report.all_passed, report.summary_lines()


def test_cut_additivity_violation_detected():
    # path 0-1-2 distances tampered so d(0,2) != d(0,1) + d(1,2)
    vals = np.array([
        [0.0, 1.0, 1.5],
        [1.0, 0.0, 1.0],
        [1.5, 1.0, 0.0],
    ])
    report = validate_rsm(RsmMatrix(vals, "external"), path_graph(3))
    assert any(v.kind == "cut-additivity" for v in report.violations)
    assert not report.triangle


# ---------------------------------------------------------------------------
# Scaling
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("alpha", [0.5, 2.0, 10.0])
@pytest.mark.parametrize("builder", [sdf_matrix, erf_matrix])
def test_check_scaling_holds(builder, alpha):
    for seed in range(30):
        rng = np.random.RandomState(seed)
        g = random_graph(rng, n_max=10)
        assert check_scaling(builder(g), builder(scale_weights(g, alpha)), alpha)


def test_check_scaling_false_for_wrong_alpha():
    g = path_graph(4)
    m = sdf_matrix(g)
    m2 = sdf_matrix(scale_weights(g, 2.0))
    assert not check_scaling(m, m2, 1.0)


def test_check_scaling_validates_inputs():
    m = sdf_matrix(path_graph(3))
    with pytest.raises(ValueError):
        check_scaling(m, m, 0.0)
    with pytest.raises(DimensionMismatchError):
        check_scaling(m, sdf_matrix(path_graph(4)), 2.0)


# ---------------------------------------------------------------------------
# Matrix type and serialization
# ---------------------------------------------------------------------------

def test_matrix_construction_errors():
    with pytest.raises(DimensionMismatchError):
        RsmMatrix(np.zeros((2, 3)), "external")
    with pytest.raises(DimensionMismatchError):
        RsmMatrix(np.zeros((0, 0)), "external")
    with pytest.raises(ValueError):
        RsmMatrix(np.array([[0.0, np.nan], [1.0, 0.0]]), "external")
    with pytest.raises(ValueError):
        RsmMatrix(np.array([[0.0, -np.inf], [1.0, 0.0]]), "external")


def test_matrix_is_frozen():
    m = sdf_matrix(path_graph(3))
    with pytest.raises(ValueError):
        m.values[0, 1] = 7.0


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_csv_and_json_round_trip(seed):
    rng = np.random.RandomState(seed)
    g = random_graph(rng, n_max=8)
    m = sdf_matrix(g)
    via_csv = rsm_from_csv(rsm_to_csv(m), source_rsm=m.source_rsm)
    via_json = rsm_from_json(rsm_to_json(m))
    assert (via_csv.values == m.values).all()
    assert (via_json.values == m.values).all()
    assert via_json.source_rsm == "sdf"


def test_csv_parsing_errors():
    with pytest.raises(ParseError):
        rsm_from_csv("0,abc\n1,0\n")
    with pytest.raises(ParseError):
        rsm_from_csv("0,nan\n1,0\n")
    with pytest.raises(ParseError):
        rsm_from_csv("")
    with pytest.raises(DimensionMismatchError):
        rsm_from_csv("0,1,2\n1,0\n")
    m = rsm_from_csv("0,inf\ninf,0\n")
    assert math.isinf(m.values[0, 1])
    assert m.source_rsm == "external"


def test_json_parsing_errors():
    with pytest.raises(ParseError):
        rsm_from_json("{not json")
    with pytest.raises(ParseError):
        rsm_from_json('{"values": "nope"}')
    with pytest.raises(ParseError):
        rsm_from_json('{"values": [[0, "huge"], [1, 0]]}')
    with pytest.raises(ParseError):
        rsm_from_json('{"values": [[0, true], [1, 0]]}')
    with pytest.raises(DimensionMismatchError):
        rsm_from_json('{"values": [[0, 1, 2], [1, 0]]}')
    m = rsm_from_json('{"rsm": "erf", "values": [[0, "inf"], ["inf", 0]]}')
    assert m.source_rsm == "erf"
    assert math.isinf(m.values[1, 0])


# ---------------------------------------------------------------------------
# Speed profiles
# ---------------------------------------------------------------------------

def test_speed_profile_stats_examples():
    p = SpeedProfile(((0, 0), (3, 0.5), (5, 2.0)))
    stats = speed_profile_stats(p, 1.5)
    assert stats.stt == 3
    assert stats.cm == 5

    with pytest.raises(AllZeroProfileError):
        speed_profile_stats(SpeedProfile(((0, 0), (1, 0))), 1.0)

    stats = speed_profile_stats(SpeedProfile(((0, 0), (2, 0.9))), 1.0)
    assert stats.stt == 2
    assert stats.cm is None


def test_speed_profile_validation():
    with pytest.raises(ValueError):
        SpeedProfile(((1, 0.5), (1, 0.7)))
    with pytest.raises(ValueError):
        SpeedProfile(((2, 0.5), (1, 0.7)))
    with pytest.raises(ValueError):
        SpeedProfile(((-1, 0.5),))
    with pytest.raises(ValueError):
        SpeedProfile(((0, -0.5),))
    with pytest.raises(AllZeroProfileError):
        speed_profile_stats(SpeedProfile(()), 1.0)
    with pytest.raises(ValueError):
        speed_profile_stats(SpeedProfile(((0, 1.0),)), 0.0)


def test_speed_profile_threshold_is_inclusive():
    stats = speed_profile_stats(SpeedProfile(((0, 0), (4, 1.0))), 1.0)
    assert stats.cm == 4


# ---------------------------------------------------------------------------
# Connectivity pattern of generated matrices
# ---------------------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_infinity_exactly_on_cross_component_pairs(seed):
    rng = np.random.RandomState(seed)
    g = random_graph(rng, n_max=10)
    part = connected_components(g)
    for m in (sdf_matrix(g), erf_matrix(g)):
        for i in range(g.vertex_count):
            for j in range(g.vertex_count):
                assert math.isinf(m.values[i, j]) == (not part.same_component(i, j))
