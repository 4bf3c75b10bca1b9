"""
    qteich.intertwine
    ~~~~~~~~~~~~~~~~~

    Quantum coordinate changes in matrix form and intertwining operators.

    An intertwiner L from r (on lambda) to r' (on lambda') satisfies

        rho(Phi(X_i')) L = L rho'(X_i')

    for every generator X_i' of lambda'. Flip intertwiners are solved on the
    two faces of the square and completed by a tensor-split intertwiner
    between representations of the same triangulation.

    :copyright: 2020 by qteich Authors, see AUTHORS for more details.
    :license: BSD, see LICENSE for more details.
"""

import functools
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import networkx as nx
import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .common import (
    INTERTWINE_TOL,
    NULLSPACE_GAP,
    NULLSPACE_SMALL,
    SCALAR_RESIDUAL_TOL,
    SINGULAR_TOL,
    ClassificationMismatch,
    GaugeInconsistent,
    InputError,
    NotFixedPointError,
    NullSpaceError,
    SingularWeightError,
    logger,
    off_scalar_residual,
    relative_residual,
)
from .fixtures import load_fixture
from .representation import (
    KronOperator,
    LocalRep,
    classify,
    face_from_weights,
    factor_permutation,
    on_factors,
    principal_root,
    random_rep,
    rep_from_weights,
    transfer,
)
from .surface import (
    FlipMove,
    Triangulation,
    align,
    canonical_key,
    closing_alignment,
    dual_graph,
    find_relabel,
    flip,
    flip_move,
    relabel,
)
from .transport import EdgeWeights, check_generic, flip_weights, transport

#: Square positions, diagonal first.
POSITIONS = ("diagonal", "lambda2", "lambda3", "lambda4", "lambda5")

#: Sigma between sides of the flipped square sharing a face.
_FLIPPED_SQUARE_SIGMA = {
    ("lambda2", "lambda3"): 1,
    ("lambda3", "lambda2"): -1,
    ("lambda4", "lambda5"): 1,
    ("lambda5", "lambda4"): -1,
}


@dataclass(frozen=True, eq=False)
class Intertwiner:
    """A normalized intertwining operator.

    Parameters
    ----------
    matrix : np.ndarray
        unit operator norm, largest-modulus entry positive real.
    source, target : LocalRep
    residual : float
        largest relative residual of the intertwining identity.
    kind : str
        "same", "flip", "path" or "closing".
    factors : tuple of np.ndarray, optional
        per-face factors of a tensor-split intertwiner.
    """

    matrix: np.ndarray
    source: LocalRep
    target: LocalRep
    residual: float
    kind: str
    factors: Optional[Tuple[np.ndarray, ...]] = None
    normalization: str = field(default="unit operator norm")

    @property
    def dim(self):
        return self.matrix.shape[0]


def normalize(matrix):
    """Scale to unit operator norm with the largest-modulus entry positive real."""
    matrix = np.asarray(matrix, dtype=complex)
    norm = np.linalg.norm(matrix, 2)
    flat = matrix.ravel()
    pivot = flat[np.argmax(np.abs(flat))]
    return matrix / (norm * pivot / abs(pivot))


def null_vector(lhs, rhs, small=NULLSPACE_SMALL, gap=NULLSPACE_GAP):
    """The unique (up to scalar) X with A X = X B for all pairs (A, B).

    Solved as the null space of the stacked operators kron(A, I) - kron(I, B^T)
    acting on row-major vectorized X.

    Parameters
    ----------
    lhs, rhs : sequence of np.ndarray
        square matrices of equal size, paired.

    Returns
    -------
    np.ndarray, np.ndarray
        the solution and the singular values of the stacked system.

    Raises
    ------
    NullSpaceError
        if the numerical null space is not one dimensional.
    """
    n = lhs[0].shape[0]
    identity = np.eye(n)
    system = np.vstack([np.kron(a, identity) - np.kron(identity, b.T) for a, b in zip(lhs, rhs)])
    _, s, vh = scipy.linalg.svd(system, full_matrices=False)
    top = s[0] if s[0] > 0 else 1.0
    if s[-1] >= small * top or (len(s) > 1 and s[-2] <= gap * top):
        dim = int(np.sum(s < gap * top))
        raise NullSpaceError(
            f"intertwining system has numerical null space of dimension {dim} "
            f"(smallest singular values {s[-2:] / top})"
        )
    return vh[-1].conj().reshape(n, n), s


def intertwining_residual(lhs, rhs, L):
    return max(relative_residual(a @ L, L @ b) for a, b in zip(lhs, rhs))


#################
# Same triangulation
#################


def _nearest_root_index(value, q, what):
    """k such that value is q^(2k), an N-th root of unity."""
    candidates = [abs(value - q.power(2 * k)) for k in range(q.N)]
    k = int(np.argmin(candidates))
    if candidates[k] > 1e-6:
        raise GaugeInconsistent(f"{what}: {value} is not an {q.N}-th root of unity")
    return k


def _check_same_class(r, r2, tol):
    x, h = classify(r)
    x2, h2 = classify(r2)
    bad = [
        i + 1 for i, (a, b) in enumerate(zip(x, x2)) if abs(a - b) > tol * max(1.0, abs(a))
    ]
    problems = [f"edge {i} weights differ" for i in bad]
    if abs(h - h2) > tol * max(1.0, abs(h)):
        problems.append(f"central loads differ ({h} != {h2})")
    if problems:
        raise ClassificationMismatch("representations are not isomorphic", problems)


def gauge_scalars(r: LocalRep, r2: LocalRep):
    """Per-side scalars c with c^N w2 = w, unit product over the sides of
    every edge, and product h / h2 on every face.

    N-th root of unity discrepancies of the face loads are pushed along a
    spanning tree of the dual graph, from the leaves to the root.

    Returns
    -------
    list of [c_0, c_1, c_2]

    Raises
    ------
    GaugeInconsistent
    """
    t = r.triangulation
    q = r.q
    c = [[1 + 0j, 1 + 0j, 1 + 0j] for _ in range(t.face_count)]
    for edge, sides in t.sides_by_edge.items():
        if len(sides) == 1:
            continue
        (j, s), (k, u) = sides
        a = principal_root(r.faces[j].w[s] / r2.faces[j].w[s], q.N)
        c[j][s] *= a
        c[k][u] /= a

    k_face = []
    for j in range(t.face_count):
        delta = (r.faces[j].h / r2.faces[j].h) / np.prod(c[j])
        k_face.append(_nearest_root_index(delta, q, f"face {j + 1} load ratio"))

    graph = dual_graph(t)
    for component in nx.connected_components(graph):
        root = min(component)
        tree_edges = list(nx.bfs_edges(graph, root))
        for parent, child in reversed(tree_edges):
            label = min(key for key in graph[parent][child])
            (f1, s1), (f2, s2) = t.sides_of(label)
            if child == f1:
                shift = k_face[child]
            else:
                shift = -k_face[child]
            zeta = q.power(2 * shift)
            c[f1][s1] *= zeta
            c[f2][s2] /= zeta
            k_face[f1] = (k_face[f1] - shift) % q.N
            k_face[f2] = (k_face[f2] + shift) % q.N
        if k_face[root] % q.N:
            raise GaugeInconsistent(
                f"load discrepancy q^{2 * k_face[root]} left on the component of face {root + 1}"
            )
    return c


def solve_same_intertwiner(r: LocalRep, r2: LocalRep, tol=INTERTWINE_TOL) -> Intertwiner:
    """Tensor-split intertwiner between two local representations of one triangulation.

    Parameters
    ----------
    r, r2 : LocalRep
        with equal edge weights and central load.

    Returns
    -------
    Intertwiner

    Raises
    ------
    ClassificationMismatch
    GaugeInconsistent
    """
    if r.triangulation != r2.triangulation:
        raise InputError("representations live on different triangulations")
    _check_same_class(r, r2, tol)

    c = gauge_scalars(r, r2)
    factors = []
    for j, (face, face2) in enumerate(zip(r.faces, r2.faces)):
        gauged = face2.scaled(c[j])
        L, _ = null_vector(list(face.matrices), list(gauged.matrices))
        factors.append(normalize(L))

    matrix = normalize(functools.reduce(np.kron, factors, np.eye(1)))
    residual = intertwining_residual(r.dense_generators(), r2.dense_generators(), matrix)
    if residual > tol:
        raise NullSpaceError(f"same-triangulation intertwiner residual {residual:.3e}")
    return Intertwiner(matrix, r, r2, residual, "same", tuple(factors))


#################
# Flips
#################


def _position_before(move: FlipMove, side):
    j, k = move.faces
    s, u = move.slots
    face, slot = side
    if face == j:
        return {s: "diagonal", (s + 1) % 3: "lambda5", (s + 2) % 3: "lambda2"}[slot]
    if face == k:
        return {u: "diagonal", (u + 1) % 3: "lambda3", (u + 2) % 3: "lambda4"}[slot]
    return None


def _position_after(move: FlipMove, side):
    j, k = move.faces
    s, u = move.slots
    face, slot = side
    if face == j:
        return {s: "diagonal", (s + 1) % 3: "lambda2", (s + 2) % 3: "lambda3"}[slot]
    if face == k:
        return {u: "diagonal", (u + 1) % 3: "lambda4", (u + 2) % 3: "lambda5"}[slot]
    return None


def _square_matrices(r: LocalRep, move: FlipMove, locate):
    """Images of the square generators on V_j x V_k."""
    j, k = move.faces
    identity = np.eye(r.N, dtype=complex)
    out = {}
    for face, other in ((j, k), (k, j)):
        for slot in range(3):
            position = locate(move, (face, slot))
            if position == "diagonal":
                continue
            m = r.faces[face].matrices[slot]
            out[position] = np.kron(m, identity) if face == j else np.kron(identity, m)
    s, u = move.slots
    out["diagonal"] = np.kron(r.faces[j].matrices[s], r.faces[k].matrices[u])
    return out


def square_images(r: LocalRep, move: FlipMove, tol=SINGULAR_TOL):
    """rho(Phi(X_p')) on the two faces of the square, for every position p.

    Phi(X_d') = X_d^-1, Phi(X_p') = (1 + q X_d) X_p for p = lambda2, lambda4 and
    Phi(X_p') = (1 + q X_d^-1)^-1 X_p for p = lambda3, lambda5.

    Raises
    ------
    SingularWeightError
        naming the eigenvalue of rho(X_d) for which a factor vanishes.
    """
    q = r.q
    A = _square_matrices(r, move, _position_before)
    diag = A["diagonal"]
    for mu in scipy.linalg.eigvals(diag):
        for label, value in (("1 + q X", 1 + q.q * mu), ("1 + q X^-1", 1 + q.q / mu)):
            if abs(value) < tol * max(1.0, abs(q.q * mu), abs(q.q / mu)):
                raise SingularWeightError(
                    f"{label} is singular: rho(X_{move.edge + 1}) has eigenvalue {mu}"
                )
    identity = np.eye(diag.shape[0])
    diag_inv = np.linalg.inv(diag)
    plus = identity + q.q * diag
    inverse = np.linalg.inv(identity + q.q * diag_inv)
    return {
        "diagonal": diag_inv,
        "lambda2": plus @ A["lambda2"],
        "lambda4": plus @ A["lambda4"],
        "lambda3": inverse @ A["lambda3"],
        "lambda5": inverse @ A["lambda5"],
    }


def phi_q_on_generator(r: LocalRep, move: FlipMove, edge, images=None) -> np.ndarray:
    """Matrix of rho(Phi(X_edge')) for a generator of the flipped triangulation.

    Sides in the square contribute their square images, other sides the
    face matrices of r; two square sides of one edge are combined by the
    Weyl product of the flipped square.
    """
    t = r.triangulation
    m, N = t.face_count, r.N
    j, k = move.faces
    images = images if images is not None else square_images(r, move)
    flipped, _ = flip(t, move.edge)

    positions = []
    rest = [None] * m
    for side in flipped.sides_of(edge):
        position = _position_after(move, side)
        if position is None:
            rest[side[0]] = side
        else:
            positions.append(position)

    if not positions:
        return r.generator(edge).dense(r.max_dim)

    if len(positions) == 1:
        square = images[positions[0]]
    elif positions[0] == positions[1] == "diagonal":
        square = images["diagonal"]
    else:
        p1, p2 = positions
        sigma = _FLIPPED_SQUARE_SIGMA.get((p1, p2), 0)
        square = r.q.power(-sigma) * (images[p1] @ images[p2])

    factors = tuple(None if side is None else r.side_matrix(side) for side in rest)
    return on_factors(square, [j, k], m, N) @ KronOperator(factors, N).dense(r.max_dim)


def transported_rep(r: LocalRep, move: FlipMove) -> LocalRep:
    """Canonical representation of the flipped triangulation with the
    classification of r transported by the flip.

    Faces off the square are kept. On the square, side weights follow the
    flip formulas side by side, the new diagonal sides carry the inverse
    weights, the first face gets the principal load and the second the
    rest of the square load.
    """
    j, k = move.faces
    s, u = move.slots
    fj, fk = r.faces[j], r.faces[k]
    xd = fj.w[s] * fk.w[u]
    check_generic(xd)
    plus, inverse = 1 + xd, 1 / (1 + 1 / xd)

    wj = [None] * 3
    wk = [None] * 3
    wj[s] = 1 / fj.w[s]
    wj[(s + 1) % 3] = fj.w[(s + 2) % 3] * plus
    wj[(s + 2) % 3] = fk.w[(u + 1) % 3] * inverse
    wk[u] = 1 / fk.w[u]
    wk[(u + 1) % 3] = fk.w[(u + 2) % 3] * plus
    wk[(u + 2) % 3] = fj.w[(s + 1) % 3] * inverse

    hj = principal_root(np.prod(wj), r.N)
    hk = fj.h * fk.h / hj

    faces = list(r.faces)
    faces[j] = face_from_weights(r.q, wj, hj)
    faces[k] = face_from_weights(r.q, wk, hk)
    flipped, _ = flip(r.triangulation, move.edge)
    return LocalRep(flipped, r.q, tuple(faces), r.max_dim)


def solve_flip_intertwiner(
    r: LocalRep, r2: LocalRep, move: FlipMove, tol=INTERTWINE_TOL
) -> Intertwiner:
    """Intertwiner for a diagonal exchange.

    Parameters
    ----------
    r : LocalRep
        on lambda.
    r2 : LocalRep
        on the flipped triangulation, with the transported classification.
    move : FlipMove

    Returns
    -------
    Intertwiner

    Raises
    ------
    ClassificationMismatch
    NullSpaceError
    SingularWeightError
    """
    x, h = classify(r)
    x2, h2 = classify(r2)
    expected = flip_weights(EdgeWeights.of(x), move)
    problems = [
        f"edge {i + 1}: {b} != {a}"
        for i, (a, b) in enumerate(zip(expected.values, x2))
        if abs(a - b) > tol * max(1.0, abs(a))
    ]
    if abs(h - h2) > tol * max(1.0, abs(h)):
        problems.append(f"central load {h2} != {h}")
    if problems:
        for problem in problems:
            logger.error(problem)
        raise ClassificationMismatch("target is not the flip-transported representation", problems)

    flipped, _ = flip(r.triangulation, move.edge)
    if flipped != r2.triangulation:
        raise InputError("target representation does not live on the flipped triangulation")

    star = transported_rep(r, move)
    images = square_images(r, move)
    target = _square_matrices(star, move, _position_after)
    square, _ = null_vector(
        [images[p] for p in POSITIONS], [target[p] for p in POSITIONS]
    )

    j, k = move.faces
    m, N = r.triangulation.face_count, r.N
    same = solve_same_intertwiner(star, r2, tol)
    matrix = normalize(on_factors(square, [j, k], m, N) @ same.matrix)

    lhs = [phi_q_on_generator(r, move, e, images) for e in range(flipped.edge_count)]
    residual = intertwining_residual(lhs, r2.dense_generators(), matrix)
    logger.debug(f"Flip of edge {move.edge + 1}: intertwining residual {residual:.3e}")
    if residual > tol:
        raise NullSpaceError(f"flip intertwiner residual {residual:.3e} above {tol}")
    return Intertwiner(matrix, r, r2, residual, "flip")


#################
# Paths and closing
#################


def path_reps(r: LocalRep, path):
    """Canonical representations along a flip path, starting at r."""
    reps = [r]
    for edge in path:
        move = flip_move(reps[-1].triangulation, edge)
        reps.append(transported_rep(reps[-1], move))
    return reps


def compose_path(reps: Sequence[LocalRep], path, tol=INTERTWINE_TOL) -> Intertwiner:
    """Product L_1 L_2 ... L_l of the elementary flip intertwiners.

    Parameters
    ----------
    reps : sequence of LocalRep
        one per triangulation along the path; a single representation is
        completed with transported_rep.
    path : sequence of int

    Returns
    -------
    Intertwiner
    """
    reps = list(reps)
    if len(reps) == 1:
        reps = path_reps(reps[0], path)
    if len(reps) != len(path) + 1:
        raise InputError(f"{len(reps)} representations for a path of {len(path)} flips")

    matrix = np.eye(reps[0].dim, dtype=complex)
    residual = 0.0
    for step, edge in enumerate(path):
        move = flip_move(reps[step].triangulation, edge)
        elementary = solve_flip_intertwiner(reps[step], reps[step + 1], move, tol)
        matrix = matrix @ elementary.matrix
        residual = max(residual, elementary.residual)
    return Intertwiner(normalize(matrix), reps[0], reps[-1], residual, "path")


def closing_intertwiner(start: LocalRep, end: LocalRep, perm, tol=INTERTWINE_TOL, path=None):
    """Intertwiner C with rho_end(X_perm[i]) C = C rho_start(X_i).

    The end triangulation must equal the start one relabeled by perm.
    C = L_back P, with P the tensor-factor permutation of the isomorphism and
    L_back the same-triangulation intertwiner to the carried start rep. When
    the flip path leading to end is given, the isomorphism follows the sides
    along it; otherwise the first labeled isomorphism found is used.

    Returns
    -------
    Intertwiner
    """
    renamed = relabel(start.triangulation, perm)
    if path is None:
        alignment = align(renamed, end.triangulation)
    else:
        alignment = closing_alignment(start.triangulation, path, perm)
    carried = transfer(
        LocalRep(renamed, start.q, start.faces, start.max_dim), end.triangulation, alignment
    )
    back = solve_same_intertwiner(end, carried, tol)
    P = factor_permutation(alignment.face_map, start.N)
    return Intertwiner(normalize(back.matrix @ P), end, start, back.residual, "closing")


def closed_path_operator(r: LocalRep, path, perm, tol=INTERTWINE_TOL):
    """Composite of a flip path closing up to a relabeling, an operator on V.

    Returns
    -------
    np.ndarray, list of LocalRep, float
        the operator, the representations along the path and the largest
        intertwining residual met.
    """
    reps = path_reps(r, path)
    L = compose_path(reps, path, tol)
    C = closing_intertwiner(r, reps[-1], perm, tol, path)
    return normalize(L.matrix @ C.matrix), reps, max(L.residual, C.residual)


@dataclass(frozen=True)
class ScalarCheck:
    """Outcome of a check that a composite is a scalar multiple of the identity."""

    name: str
    N: int
    dim: int
    residual: float
    tolerance: float

    @property
    def passed(self):
        return self.residual <= self.tolerance


def pentagon_check(q, rng, tol=SCALAR_RESIDUAL_TOL):
    """Five flips around the pentagon compose to a scalar."""
    t = load_fixture("pentagon")
    path = [0, 1, 0, 1, 0]
    end = transport(t, EdgeWeights.of([1] * t.edge_count), path).triangulation
    perm = find_relabel(t, end)
    r = random_rep(t, q, rng)
    operator, _, _ = closed_path_operator(r, path, perm)
    residual = off_scalar_residual(operator)
    logger.info(f"Pentagon composite: off-scalar residual {residual:.3e}")
    return ScalarCheck("pentagon", q.N, operator.shape[0], residual, tol)


def roundtrip_check(r: LocalRep, edge, tol=SCALAR_RESIDUAL_TOL):
    """Flipping an edge twice composes to a scalar."""
    identity = tuple(range(r.triangulation.edge_count))
    operator, _, _ = closed_path_operator(r, [edge, edge], identity)
    return ScalarCheck("roundtrip", r.N, r.dim, off_scalar_residual(operator), tol)


def distant_commutativity_check(r: LocalRep, e1, e2, tol=SCALAR_RESIDUAL_TOL):
    """Flips in squares with no common face commute up to scalar."""
    m1 = flip_move(r.triangulation, e1)
    m2 = flip_move(r.triangulation, e2)
    if set(m1.faces) & set(m2.faces):
        raise InputError(f"edges {e1 + 1} and {e2 + 1} have overlapping squares")
    first = compose_path([r], [e1, e2]).matrix
    second = compose_path([r], [e2, e1]).matrix
    operator = first @ np.linalg.inv(second)
    return ScalarCheck("distant-commutativity", r.N, r.dim, off_scalar_residual(operator), tol)


#################
# Invariants
#################


@dataclass(frozen=True)
class InvariantReport:
    """Projective invariants of a closed-path operator.

    Parameters
    ----------
    dim : int
    trace_ratio : float
        |tr L| / |det L|^(1/dim).
    normalized_trace : complex
        tr(L) det(L)^(-1/dim) with the principal root.
    trace_class : complex
        representative of normalized_trace modulo dim-th roots of unity,
        argument in [0, 2 pi / dim).
    eigenvalue_ratios : tuple of complex
        eigenvalues divided by one of largest modulus.
    """

    dim: int
    trace_ratio: float
    normalized_trace: complex
    trace_class: complex
    eigenvalue_ratios: Tuple[complex, ...]
    fixed_point_residual: float = 0.0
    intertwining_residual: float = 0.0


def invariant_report(L) -> InvariantReport:
    L = np.asarray(L, dtype=complex)
    d = L.shape[0]
    sign, logabsdet = np.linalg.slogdet(L)
    trace = complex(np.trace(L))
    trace_ratio = abs(trace) / np.exp(logabsdet / d)
    root = np.exp((logabsdet + 1j * np.angle(sign)) / d)
    normalized = trace / root
    sector = 2 * np.pi / d
    if normalized == 0:
        representative = 0j
    else:
        k = np.floor(np.angle(normalized) / sector)
        representative = normalized * np.exp(-1j * sector * k)
    eigenvalues = scipy.linalg.eigvals(L)
    anchor = eigenvalues[np.argmax(np.abs(eigenvalues))]
    ratios = sorted(eigenvalues / anchor, key=lambda z: (-round(abs(z), 9), np.angle(z)))
    return InvariantReport(
        dim=d,
        trace_ratio=float(trace_ratio),
        normalized_trace=complex(normalized),
        trace_class=complex(representative),
        eigenvalue_ratios=tuple(complex(z) for z in ratios),
    )


def ratios_match(a, b, tol=1e-6):
    """Compare eigenvalue-ratio multisets, allowing a change of anchor among
    the eigenvalues of largest modulus."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        return False
    top = np.max(np.abs(b))
    for anchor in b[np.abs(np.abs(b) - top) <= tol * top]:
        candidate = b / anchor
        cost = np.abs(a[:, None] - candidate[None, :])
        rows, cols = linear_sum_assignment(cost)
        if np.max(cost[rows, cols]) <= tol:
            return True
    return False


def mapping_class_invariant(
    t: Triangulation,
    q,
    x: EdgeWeights,
    path,
    perm,
    k=0,
    tol=INTERTWINE_TOL,
    fixed_tol=INTERTWINE_TOL,
) -> InvariantReport:
    """Projective invariants of the intertwiner of a mapping class.

    The mapping class is the flip path followed by the relabeling perm
    (edge i of t becomes edge perm[i] of the path end). x must be a fixed
    point: the transported weights, read through perm, give x back.

    Parameters
    ----------
    t : Triangulation
    q : QParams
    x : EdgeWeights
    path : sequence of int
    perm : sequence of int
    k : int
        the representation is the q^(2k)-standard one scaled by roots of x.

    Returns
    -------
    InvariantReport

    Raises
    ------
    NotFixedPointError
    """
    result = transport(t, x, path)
    if canonical_key(result.triangulation) != canonical_key(relabel(t, perm)):
        raise NotFixedPointError("the flip path does not end at the relabeled triangulation")
    end = result.weights.values
    residual = max(
        abs(end[perm[i]] - x[i]) / max(1.0, abs(x[i])) for i in range(t.edge_count)
    )
    if residual > fixed_tol:
        raise NotFixedPointError(
            f"weights are not fixed by the mapping class (residual {residual:.3e})"
        )

    r = rep_from_weights(t, q, x.values, k)
    operator, _, closing_residual = closed_path_operator(r, path, perm, tol)
    report = invariant_report(operator)
    logger.info(f"Mapping class invariant: |tr|/|det|^(1/d) = {report.trace_ratio:.12g}")
    return InvariantReport(
        report.dim,
        report.trace_ratio,
        report.normalized_trace,
        report.trace_class,
        report.eigenvalue_ratios,
        fixed_point_residual=float(residual),
        intertwining_residual=closing_residual,
    )
