import itertools

import numpy as np
import pytest

from qteich.common import (
    NEAR_SINGULAR_TOL,
    ClassificationMismatch,
    InputError,
    NotFixedPointError,
    NullSpaceError,
    SingularWeightError,
    is_singular_factor,
    relative_residual,
)
from qteich.fixtures import load_fixture
from qteich.intertwine import (
    closed_path_operator,
    closing_intertwiner,
    compose_path,
    distant_commutativity_check,
    intertwining_residual,
    invariant_report,
    mapping_class_invariant,
    normalize,
    null_vector,
    path_reps,
    pentagon_check,
    phi_q_on_generator,
    ratios_match,
    roundtrip_check,
    solve_flip_intertwiner,
    solve_same_intertwiner,
    square_images,
    transported_rep,
)
from qteich.qalgebra import QParams
from qteich.representation import (
    classify,
    conjugate_face,
    gauge,
    local_rep,
    random_rep,
    rep_from_weights,
    triangle_rep,
)
from qteich.surface import flip, flip_move, sigma_matrix
from qteich.transport import EdgeWeights, flip_weights


def test_null_vector_weyl_pair():
    rep = triangle_rep(QParams(3), (1, 1, 1))
    gens = list(rep.matrices)
    X, s = null_vector(gens, gens)
    assert relative_residual(normalize(X), np.eye(3)) < 1e-10
    assert s[-1] < 1e-10


def test_null_vector_not_unique():
    diagonal = np.diag([1.0, 2.0])
    with pytest.raises(NullSpaceError):
        null_vector([diagonal], [diagonal])


def test_normalize():
    L = normalize(np.array([[0, -3j], [1, 0]]))
    assert np.linalg.norm(L, 2) == pytest.approx(1)
    assert L[0, 1] == pytest.approx(1)


@pytest.mark.parametrize("N", [2, 3])
def test_same_intertwiner_gauge(N):
    t = load_fixture("torus")
    r = random_rep(t, QParams(N), np.random.default_rng(21))
    r2 = gauge(gauge(r, 0, 1.5 - 0.5j), 2, 0.2j)
    result = solve_same_intertwiner(r, r2)
    assert result.kind == "same"
    assert len(result.factors) == 2
    assert result.residual < 1e-8


def test_same_intertwiner_conjugated_face():
    t = load_fixture("square")
    rng = np.random.default_rng(8)
    r = random_rep(t, QParams(3), rng)
    P = np.eye(3) + 0.3 * rng.standard_normal((3, 3))
    r2 = conjugate_face(r, 1, P)
    result = solve_same_intertwiner(r, r2)
    assert result.residual < 1e-8
    assert relative_residual(normalize(result.factors[1]), normalize(np.linalg.inv(P))) < 1e-8


@pytest.mark.parametrize("N", [2, 3, 5])
def test_same_intertwiner_moves_load_between_faces(N):
    q = QParams(N)
    t = load_fixture("torus")
    r = local_rep(t, q, [((1, 1, 1), q.power(2)), ((1, 1, 1), 1)])
    r2 = local_rep(t, q, [((1, 1, 1), 1), ((1, 1, 1), q.power(2))])
    result = solve_same_intertwiner(r, r2)
    assert intertwining_residual(r.dense_generators(), r2.dense_generators(), result.matrix) < 1e-8


def test_same_intertwiner_mismatch():
    t = load_fixture("torus")
    q = QParams(2)
    r = random_rep(t, q, np.random.default_rng(1))
    r2 = random_rep(t, q, np.random.default_rng(2))
    with pytest.raises(ClassificationMismatch) as excinfo:
        solve_same_intertwiner(r, r2)
    assert excinfo.value.problems


@pytest.mark.parametrize("name,edge", [("square", 0), ("pentagon", 1), ("sphere4", 4)])
@pytest.mark.parametrize("N", [2, 3])
def test_transported_rep_classification(name, edge, N):
    t = load_fixture(name)
    r = random_rep(t, QParams(N), np.random.default_rng(4))
    move = flip_move(t, edge)
    r2 = transported_rep(r, move)
    x, h = classify(r)
    x2, h2 = classify(r2)
    np.testing.assert_allclose(x2, flip_weights(EdgeWeights.of(x), move).as_array(), rtol=1e-10)
    assert h2 == pytest.approx(h, rel=1e-10)
    assert r2.triangulation == flip(t, edge)[0]


@pytest.mark.parametrize("name,edge", [("square", 0), ("pentagon", 0), ("torus", 0), ("torus", 2)])
@pytest.mark.parametrize("N", [2, 3])
def test_phi_respects_relations(name, edge, N):
    t = load_fixture(name)
    r = random_rep(t, QParams(N), np.random.default_rng(6))
    move = flip_move(t, edge)
    flipped, _ = flip(t, edge)
    sigma = sigma_matrix(flipped)
    images = square_images(r, move)
    phi = [phi_q_on_generator(r, move, e, images) for e in range(flipped.edge_count)]
    for a, b in itertools.combinations(range(flipped.edge_count), 2):
        lhs = phi[a] @ phi[b]
        rhs = r.q.power(2 * sigma[a, b]) * (phi[b] @ phi[a])
        assert relative_residual(lhs, rhs) < 1e-9, (a, b)


@pytest.mark.parametrize("name,edge", [("square", 0), ("pentagon", 1), ("torus", 0), ("sphere4", 0)])
@pytest.mark.parametrize("N", [2, 3])
def test_flip_intertwiner(name, edge, N):
    t = load_fixture(name)
    r = random_rep(t, QParams(N), np.random.default_rng(12))
    move = flip_move(t, edge)
    r2 = transported_rep(r, move)
    result = solve_flip_intertwiner(r, r2, move)
    assert result.kind == "flip"
    assert result.residual < 1e-8
    assert np.linalg.norm(result.matrix, 2) == pytest.approx(1)


def test_flip_intertwiner_gauged_target():
    t = load_fixture("square")
    r = random_rep(t, QParams(3), np.random.default_rng(13))
    move = flip_move(t, 0)
    r2 = gauge(transported_rep(r, move), 0, 0.7 + 0.1j)
    assert solve_flip_intertwiner(r, r2, move).residual < 1e-8


def test_flip_intertwiner_wrong_target():
    t = load_fixture("square")
    q = QParams(2)
    r = random_rep(t, q, np.random.default_rng(13))
    move = flip_move(t, 0)
    r2 = random_rep(flip(t, 0)[0], q, np.random.default_rng(14))
    with pytest.raises(ClassificationMismatch):
        solve_flip_intertwiner(r, r2, move)


def test_square_images_singular():
    t = load_fixture("square")
    r = rep_from_weights(t, QParams(2), [-1, 1, 1, 1, 1])
    with pytest.raises(SingularWeightError):
        square_images(r, flip_move(t, 0))


def test_compose_path_completes_reps():
    t = load_fixture("pentagon")
    r = random_rep(t, QParams(2), np.random.default_rng(3))
    result = compose_path([r], [0, 1])
    assert result.kind == "path"
    assert result.target.triangulation == flip(flip(t, 0)[0], 1)[0]
    with pytest.raises(InputError):
        compose_path([r, r], [0, 1])


@pytest.mark.parametrize("N", [2, 3])
def test_pentagon(N):
    check = pentagon_check(QParams(N), np.random.default_rng(0))
    assert check.dim == N ** 3
    assert check.passed, check.residual


@pytest.mark.parametrize(
    "name,edge",
    [
        ("square", 0),
        ("pentagon", 0),
        ("pentagon", 1),
        ("torus", 0),
        ("torus", 1),
        ("torus", 2),
        ("sphere4", 0),
        ("sphere4", 3),
    ],
)
@pytest.mark.parametrize("N", [2, 3])
def test_roundtrip(name, edge, N):
    r = random_rep(load_fixture(name), QParams(N), np.random.default_rng(17))
    assert roundtrip_check(r, edge).passed


def test_distant_commutativity():
    r = random_rep(load_fixture("sphere4"), QParams(2), np.random.default_rng(5))
    check = distant_commutativity_check(r, 0, 4)
    assert check.passed
    assert check.dim == 16
    with pytest.raises(InputError):
        distant_commutativity_check(r, 0, 1)


def test_distant_commutativity_needs_two_squares():
    r = random_rep(load_fixture("torus"), QParams(2), np.random.default_rng(5))
    with pytest.raises(InputError):
        distant_commutativity_check(r, 0, 2)


def test_closed_path_identity():
    t = load_fixture("square")
    r = random_rep(t, QParams(2), np.random.default_rng(8))
    operator, reps, residual = closed_path_operator(r, [], tuple(range(t.edge_count)))
    assert len(reps) == 1
    assert relative_residual(normalize(operator), np.eye(4)) < 1e-8


def test_invariant_report_identity():
    report = invariant_report(np.eye(3))
    assert report.dim == 3
    assert report.trace_ratio == pytest.approx(3)
    assert report.trace_class == pytest.approx(3)
    np.testing.assert_allclose(report.eigenvalue_ratios, [1, 1, 1])


def test_invariant_report_is_projective():
    rng = np.random.default_rng(2)
    L = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    report = invariant_report(L)
    scaled = invariant_report((0.3 - 2j) * L)
    assert scaled.trace_ratio == pytest.approx(report.trace_ratio)
    assert scaled.trace_class == pytest.approx(report.trace_class)
    assert ratios_match(report.eigenvalue_ratios, scaled.eigenvalue_ratios)


def test_ratios_match():
    assert ratios_match([1, -1], [-2, 2])
    assert not ratios_match([1, 0.5], [1, 0.4])
    assert not ratios_match([1], [1, 1])


def test_torus_rotation_invariant():
    q = QParams(3)
    report = mapping_class_invariant(
        load_fixture("torus"), q, EdgeWeights.of([1, 1, 1]), [], (1, 2, 0)
    )
    assert report.dim == 9
    assert report.fixed_point_residual == 0
    for z in report.eigenvalue_ratios:
        assert abs(z ** 3 - 1) < 1e-6


@pytest.mark.parametrize("path,perm,x", [([0], (0, 1, 2), (1, 1, 1)), ([0], (0, 2, 1), (1, 1, 1))])
def test_not_fixed_point(path, perm, x):
    with pytest.raises(NotFixedPointError):
        mapping_class_invariant(load_fixture("torus"), QParams(2), EdgeWeights.of(x), path, perm)


@pytest.mark.parametrize("N", [2, 3])
def test_torus_flip_twice_is_scalar(N):
    t = load_fixture("torus")
    r = random_rep(t, QParams(N), np.random.default_rng(3))
    operator, reps, _ = closed_path_operator(r, [0, 0], (0, 1, 2))
    assert reps[-1].triangulation == t
    assert relative_residual(normalize(operator), np.eye(N ** 2)) < 1e-6


@pytest.mark.parametrize("N", [2, 3])
def test_mapping_class_invariant_path_independent(N):
    t = load_fixture("torus")
    x = EdgeWeights.of([1, 4, 1])
    short = mapping_class_invariant(t, QParams(N), x, [0], (0, 2, 1))
    long = mapping_class_invariant(t, QParams(N), x, [0, 0, 0], (0, 2, 1))
    assert long.trace_ratio == pytest.approx(short.trace_ratio)
    assert ratios_match(short.eigenvalue_ratios, long.eigenvalue_ratios)


def test_mapping_class_invariant_ignores_intertwiner_scaling():
    t = load_fixture("torus")
    r = rep_from_weights(t, QParams(2), [1, 4, 1])
    reps = path_reps(r, [0])
    L = compose_path(reps, [0]).matrix
    C = closing_intertwiner(r, reps[-1], (0, 2, 1), path=[0]).matrix
    base = invariant_report(L @ C)
    rescaled = invariant_report(((2 - 1j) * L) @ (0.5j * C))
    assert rescaled.trace_ratio == pytest.approx(base.trace_ratio)
    assert ratios_match(base.eigenvalue_ratios, rescaled.eigenvalue_ratios)
    report = mapping_class_invariant(t, QParams(2), EdgeWeights.of([1, 4, 1]), [0], (0, 2, 1))
    assert report.trace_ratio == pytest.approx(base.trace_ratio)


@pytest.mark.parametrize("N", [2, 3])
def test_square_intertwiner_unique_in_random_trials(N):
    t = load_fixture("square")
    move = flip_move(t, 0)
    rng = np.random.default_rng(100 + N)
    failures = []
    for _ in range(200):
        r = random_rep(t, QParams(N), rng)
        try:
            solve_flip_intertwiner(r, transported_rep(r, move), move)
        except (NullSpaceError, SingularWeightError):
            failures.append(classify(r)[0][0])
    assert len(failures) <= 2
    assert all(is_singular_factor(x, NEAR_SINGULAR_TOL) for x in failures)
