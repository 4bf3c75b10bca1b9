import itertools

import numpy as np
import pytest

from qteich.common import AmbiguousEigenline, InputError
from qteich.fixtures import load_fixture
from qteich.holonomy import (
    DualPath,
    IdealTriple,
    Moebius,
    cross_ratio,
    develop,
    dual_path_from_edges,
    dual_tree,
    eigenvalue_on,
    flipped_weights,
    fourth_vertex,
    generator_loops,
    holonomy,
    holonomy_traces,
    lifted_holonomy,
    peripheral_loop,
    puncture_eigenvalue,
    roundtrip_weights,
    to_point,
    total_load_check,
)
from qteich.surface import flip_move, punctures
from qteich.transport import EdgeWeights, flip_weights


def complex_weights(n, seed):
    rng = np.random.default_rng(seed)
    return EdgeWeights.of(rng.uniform(0.5, 2, n) * np.exp(1j * rng.uniform(-1.5, 1.5, n)))


def positive_weights(n, seed):
    return EdgeWeights.of(np.random.default_rng(seed).uniform(0.3, 3, n))


def test_fourth_vertex_cross_ratio():
    rng = np.random.default_rng(0)
    for _ in range(10):
        a, b, c = (to_point(complex(*rng.normal(size=2))) for _ in range(3))
        x = complex(*rng.normal(size=2))
        z = fourth_vertex(a, b, c, x)
        assert cross_ratio(a, b, c, z) == pytest.approx(-x)


def test_develop_start():
    triple = develop(load_fixture("torus"), EdgeWeights.of([1, 1, 1]), DualPath(0, ()))
    z0, z1, z2 = triple.as_complex()
    assert (z0, z1) == (0, 1)
    assert np.isinf(z2)


def test_develop_one_crossing():
    triple = develop(load_fixture("torus"), EdgeWeights.of([1, 1, 1]), DualPath(0, (2,)))
    z0, z1, z2 = triple.as_complex()
    assert np.isinf(z0)
    assert z1 == pytest.approx(-1)
    assert z2 == pytest.approx(0)


@pytest.mark.parametrize("x", [1, 2.5, 0.3 + 0.4j])
def test_develop_crossing_weight(x):
    triple = develop(load_fixture("torus"), EdgeWeights.of([1, 1, x]), DualPath(0, (2,)))
    assert triple.as_complex()[1] == pytest.approx(-x)


def test_crossing_back_is_trivial():
    t = load_fixture("torus")
    x = complex_weights(3, 1)
    loop = DualPath(0, (2, 2))
    assert develop(t, x, loop).close_to(IdealTriple.standard())
    assert holonomy(t, x, loop).is_identity()


def test_holonomy_needs_closed_path():
    with pytest.raises(InputError):
        holonomy(load_fixture("torus"), EdgeWeights.of([1, 1, 1]), DualPath(0, (2,)))


def test_dual_path_from_edges():
    t = load_fixture("torus")
    assert dual_path_from_edges(t, 0, [2, 2]) == DualPath(0, (2, 2))
    with pytest.raises(InputError):
        dual_path_from_edges(load_fixture("square"), 0, [1])
    with pytest.raises(InputError):
        dual_path_from_edges(load_fixture("square"), 0, [2])


def test_moebius():
    target = IdealTriple.of([2, 1j, -1])
    M = Moebius.from_standard(target)
    assert M.apply_triple(IdealTriple.standard()).close_to(target)
    assert (M @ M.inverse()).is_identity()
    assert M.projectively_equal(Moebius(-3 * M.matrix))
    assert abs(np.linalg.det(M.sl2())) == pytest.approx(1)


def test_eigenvalue_on():
    m = np.array([[2, 1], [0, 0.5]], dtype=complex)
    assert eigenvalue_on(m, to_point(None)) == pytest.approx(2)
    with pytest.raises(AmbiguousEigenline):
        eigenvalue_on(m, to_point(1))


def test_torus_tree_and_generators():
    t = load_fixture("torus")
    tree = dual_tree(t)
    assert tree.tree_edges == frozenset({0})
    assert tree.generators == (1, 2)
    loops = generator_loops(t)
    assert loops[1] == DualPath(0, (1, 0))


def test_modular_torus_traces():
    t = load_fixture("torus")
    traces = holonomy_traces(t, EdgeWeights.of([1, 1, 1]), generator_loops(t).values())
    for trace in traces:
        assert abs(trace) == pytest.approx(3)


@pytest.mark.parametrize("name", ["torus", "sphere4"])
def test_positive_weights_give_real_traces(name):
    t = load_fixture(name)
    traces = holonomy_traces(t, positive_weights(t.edge_count, 2), generator_loops(t).values())
    for trace in traces:
        assert abs(trace.imag) < 1e-8 * max(1, abs(trace))
        assert abs(trace.real) >= 2 - 1e-8


def test_holonomy_is_a_homomorphism():
    t = load_fixture("sphere4")
    x = complex_weights(t.edge_count, 3)
    loops = list(generator_loops(t).values())
    for l1, l2 in itertools.product(loops, repeat=2):
        assert holonomy(t, x, l1 + l2).projectively_equal(holonomy(t, x, l1) @ holonomy(t, x, l2))


@pytest.mark.parametrize(
    "x,a_sq", [((1, 1, 1), 1), ((2, 1, 1), 0.25), ((0.5, 3, 1.5 + 1j), None)]
)
def test_torus_puncture_eigenvalue(x, a_sq):
    t = load_fixture("torus")
    (puncture,) = punctures(t)
    result = puncture_eigenvalue(t, EdgeWeights.of(x), puncture)
    assert result.residual < 1e-8
    assert result.derivative == pytest.approx(1 / result.a_sq)
    if a_sq is not None:
        assert result.a_sq == pytest.approx(a_sq)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_sphere_puncture_eigenvalues(seed):
    t = load_fixture("sphere4")
    x = complex_weights(t.edge_count, seed)
    for puncture in punctures(t):
        assert puncture_eigenvalue(t, x, puncture).residual < 1e-8


def test_peripheral_loop():
    t = load_fixture("torus")
    (puncture,) = punctures(t)
    loop = peripheral_loop(t, puncture)
    assert len(loop.slots) == 6
    with pytest.raises(InputError):
        peripheral_loop(load_fixture("square"), punctures(load_fixture("square"))[0])


def test_torus_total_load_unit_weights():
    t = load_fixture("torus")
    x = EdgeWeights.of([1, 1, 1])
    for s1, s2 in itertools.product([1, -1], repeat=2):
        report = total_load_check(t, x, {1: s1, 2: s2})
        assert report.p == 1
        assert report.eigenvalues[0] == pytest.approx(-1)
        assert report.residual < 1e-9


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_torus_total_load(seed):
    t = load_fixture("torus")
    x = positive_weights(3, seed)
    report = total_load_check(t, x)
    assert report.eigenvalues[0] == pytest.approx(-1 / np.prod(x.as_array()))
    assert report.residual < 1e-8


@pytest.mark.parametrize("seed", [0, 1])
def test_sphere_total_load_squared(seed):
    t = load_fixture("sphere4")
    report = total_load_check(t, complex_weights(t.edge_count, seed))
    assert report.p == 4
    assert report.squared_residual < 1e-8


def test_total_load_needs_closed_surface():
    with pytest.raises(InputError):
        total_load_check(load_fixture("square"), EdgeWeights.of([1] * 5))


def test_lifted_holonomy_unimodular():
    t = load_fixture("sphere4")
    x = complex_weights(t.edge_count, 4)
    for loop in generator_loops(t).values():
        assert np.linalg.det(lifted_holonomy(t, x, loop)) == pytest.approx(1)


@pytest.mark.parametrize("name", ["square", "pentagon", "torus", "sphere4"])
def test_roundtrip_weights(name):
    t = load_fixture(name)
    x = complex_weights(t.edge_count, 6)
    np.testing.assert_allclose(roundtrip_weights(t, x).as_array(), x.as_array(), rtol=1e-8)


@pytest.mark.parametrize("name", ["square", "pentagon", "torus", "sphere4"])
def test_geometric_flip(name):
    t = load_fixture(name)
    x = complex_weights(t.edge_count, 7)
    interior = [e for e in range(t.edge_count) if t.is_interior(e)]
    for edge in interior:
        np.testing.assert_allclose(
            flipped_weights(t, x, edge).as_array()[interior],
            flip_weights(x, flip_move(t, edge)).as_array()[interior],
            rtol=1e-8,
        )


def test_square_geometric_flip_example():
    t = load_fixture("square")
    got = flipped_weights(t, EdgeWeights.of([4, 1, 1, 1, 1]), 0)
    np.testing.assert_allclose(got.as_array()[0], 0.25)
