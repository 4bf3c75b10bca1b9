import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qteich.common import InputError, SingularWeightError
from qteich.fixtures import load_fixture
from qteich.surface import canonical_key, flip_move, punctures
from qteich.transport import (
    EdgeWeights,
    check_generic,
    flip_weights,
    flip_weights_sigma,
    peripheral_load,
    puncture_eigenvalue_sq,
    transport,
)


def random_weights(n, seed):
    rng = np.random.default_rng(seed)
    return EdgeWeights.of(rng.uniform(0.5, 2, n) * np.exp(1j * rng.uniform(-3, 3, n)))


def test_square_flip():
    t = load_fixture("square")
    result = transport(t, EdgeWeights.of([4, 1, 1, 1, 1]), [0])
    np.testing.assert_allclose(result.weights.as_array(), [0.25, 5, 0.8, 5, 0.8])
    assert result.triangulation.faces == ((0, 1, 2), (0, 3, 4))
    assert result.steps[0].edge == 0
    assert result.steps[0].distance == pytest.approx(5)
    assert result.steps[0].generic


def test_nearly_singular_step_is_flagged():
    t = load_fixture("square")
    result = transport(t, EdgeWeights.of([-1 + 1e-8, 1, 1, 1, 1]), [0, 0])
    assert [s.generic for s in result.steps] == [False, False]
    assert result.steps[0].distance == pytest.approx(1e-8)


def test_torus_flip():
    x1, x2, x3 = 2.0, 0.5, 3.0
    t = load_fixture("torus")
    result = transport(t, EdgeWeights.of([x1, x2, x3]), [0])
    expected = [1 / x1, x2 * (1 + 1 / x1) ** -2, x3 * (1 + x1) ** 2]
    np.testing.assert_allclose(result.weights.as_array(), expected)


@pytest.mark.parametrize("name", ["square", "pentagon", "torus", "sphere4"])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_flip_rules_agree(name, seed):
    t = load_fixture(name)
    x = random_weights(t.edge_count, seed)
    for edge in range(t.edge_count):
        if not t.is_interior(edge):
            continue
        np.testing.assert_allclose(
            flip_weights(x, flip_move(t, edge)).as_array(),
            flip_weights_sigma(t, x, edge).as_array(),
            rtol=1e-12,
        )


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.1, 10), min_size=5, max_size=5))
def test_flip_is_involutive(values):
    t = load_fixture("square")
    x = EdgeWeights.of(values)
    result = transport(t, x, [0, 0])
    np.testing.assert_allclose(result.weights.as_array(), x.as_array(), rtol=1e-10)
    assert canonical_key(result.triangulation) == canonical_key(t)


@pytest.mark.parametrize(
    "name,path", [("square", [0, 0, 0]), ("torus", [0, 1, 2, 0]), ("sphere4", [0, 4, 2])]
)
def test_peripheral_load_invariant(name, path):
    t = load_fixture(name)
    x = random_weights(t.edge_count, 5)
    result = transport(t, x, path)
    assert peripheral_load(result.weights) == pytest.approx(peripheral_load(x), rel=1e-10)


def test_square_peripheral_load():
    t = load_fixture("square")
    x = EdgeWeights.of([4, 1, 1, 1, 1])
    assert peripheral_load(x) == pytest.approx(4)
    assert peripheral_load(transport(t, x, [0]).weights) == pytest.approx(4)


def test_pentagon_relation():
    t = load_fixture("pentagon")
    x = random_weights(t.edge_count, 3)
    result = transport(t, x, [0, 1, 0, 1, 0])
    np.testing.assert_allclose(
        result.weights.as_array(),
        x.relabeled((1, 0, 2, 3, 4, 5, 6)).as_array(),
        rtol=1e-10,
    )


def test_distant_flips_commute():
    t = load_fixture("sphere4")
    x = random_weights(t.edge_count, 8)
    first = transport(t, x, [0, 4])
    second = transport(t, x, [4, 0])
    assert first.triangulation == second.triangulation
    np.testing.assert_allclose(
        first.weights.as_array(), second.weights.as_array(), rtol=1e-12
    )


def test_singular_first_step():
    with pytest.raises(SingularWeightError) as excinfo:
        transport(load_fixture("square"), EdgeWeights.of([-1, 1, 1, 1, 1]), [0])
    assert excinfo.value.step == 0


def test_singular_later_step():
    # the first flip multiplies x[1] by 1 + x[0] = 2
    x = EdgeWeights.of([1, -0.5, 1, 1, 1, 1, 1])
    with pytest.raises(SingularWeightError) as excinfo:
        transport(load_fixture("pentagon"), x, [0, 1])
    assert excinfo.value.step == 1


def test_check_generic():
    assert check_generic(1) == 2
    with pytest.raises(SingularWeightError):
        check_generic(-1 + 1e-14)


def test_weights_validation():
    with pytest.raises(InputError):
        EdgeWeights.of([1, 0, 2])
    with pytest.raises(InputError):
        transport(load_fixture("torus"), EdgeWeights.of([1, 1]), [0])


def test_relabeled():
    x = EdgeWeights.of([1, 2, 3])
    assert x.relabeled((1, 2, 0)).values == (3, 1, 2)


@pytest.mark.parametrize("x,a_sq", [((2, 1, 1), 0.25), ((1, 1, 1), 1), ((1, 2, 0.5), 1)])
def test_torus_puncture_eigenvalue(x, a_sq):
    (puncture,) = punctures(load_fixture("torus"))
    assert puncture_eigenvalue_sq(EdgeWeights.of(x), puncture) == pytest.approx(a_sq)
