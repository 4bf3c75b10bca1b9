"""
    qteich.holonomy
    ~~~~~~~~~~~~~~~

    Pleated surfaces: developing map from shear-bend weights, PSL(2, C)
    holonomy of dual loops, peripheral eigenvalues and the total load.

    Points of the Riemann sphere are kept as projective pairs (z0, z1),
    z = z0 / z1, rescaled to unit max-coordinate after every step.
    Crossing side s of a face with developed vertices (v0, v1, v2) attaches
    the vertex z with cr(v_s, v_s+1; v_s+2, z) = -x, where

        cr(p, q; r, s) = (p - r)(q - s) / ((p - s)(q - r)).

    :copyright: 2020 by qteich Authors, see AUTHORS for more details.
    :license: BSD, see LICENSE for more details.
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .common import (
    HOLONOMY_TOL,
    LOAD_TOL,
    AmbiguousEigenline,
    DegenerateDevelopment,
    InputError,
    logger,
    off_scalar_residual,
)
from .surface import Puncture, Side, Triangulation, dual_graph, flip_move, punctures
from .transport import EdgeWeights, check_generic, peripheral_load, puncture_eigenvalue_sq

#: Degenerate configurations: brackets of unit points below this vanish.
DEGENERATE_TOL = 1e-12

INFINITY = np.array([1, 0], dtype=complex)


def to_point(z):
    """Projective pair of a complex number; None or an infinite value is infinity."""
    if z is None or np.isinf(z):
        return INFINITY.copy()
    return np.array([z, 1], dtype=complex)


def _unit(p):
    p = np.asarray(p, dtype=complex)
    return p / np.max(np.abs(p))


def to_complex(p):
    """Affine coordinate of a projective pair, complex infinity for (1, 0)."""
    p = _unit(p)
    if abs(p[1]) < DEGENERATE_TOL:
        return complex(np.inf, 0)
    return complex(p[0] / p[1])


def bracket(u, v):
    return u[0] * v[1] - u[1] * v[0]


def cross_ratio(p, q, r, s):
    """cr(p, q; r, s) of four projective points."""
    return bracket(p, r) * bracket(q, s) / (bracket(p, s) * bracket(q, r))


def fourth_vertex(a, b, c, x):
    """The point z with cr(a, b; c, z) = -x."""
    z = x * bracket(b, c) * a + bracket(a, c) * b
    if np.max(np.abs(z)) < DEGENERATE_TOL:
        raise DegenerateDevelopment("developed vertex collapses")
    return _unit(z)


@dataclass(frozen=True, eq=False)
class IdealTriple:
    """Vertices (v0, v1, v2) of a developed ideal triangle."""

    points: Tuple[np.ndarray, np.ndarray, np.ndarray]

    def __post_init__(self):
        for i in range(3):
            u = _unit(self.points[i])
            v = _unit(self.points[(i + 1) % 3])
            if abs(bracket(u, v)) < DEGENERATE_TOL:
                raise DegenerateDevelopment(
                    f"developed triangle has coincident vertices {to_complex(u)}"
                )

    @classmethod
    def standard(cls):
        """The triple (0, 1, infinity)."""
        return cls((to_point(0), to_point(1), INFINITY.copy()))

    @classmethod
    def of(cls, values):
        return cls(tuple(to_point(z) for z in values))

    def __getitem__(self, i):
        return self.points[i % 3]

    def as_complex(self):
        return tuple(to_complex(p) for p in self.points)

    def close_to(self, other, tol=HOLONOMY_TOL):
        return all(
            abs(bracket(_unit(p), _unit(p2))) <= tol for p, p2 in zip(self.points, other.points)
        )


@dataclass(frozen=True, eq=False)
class Moebius:
    """A Moebius transformation given by an invertible 2 x 2 matrix,
    compared projectively."""

    matrix: np.ndarray

    def __post_init__(self):
        if abs(np.linalg.det(self.matrix)) < DEGENERATE_TOL * np.max(np.abs(self.matrix)) ** 2:
            raise DegenerateDevelopment("Moebius matrix is singular")

    @classmethod
    def identity(cls):
        return cls(np.eye(2, dtype=complex))

    @classmethod
    def from_standard(cls, triple: IdealTriple):
        """The transformation sending (0, 1, infinity) to the triple."""
        p, q, r = triple.points
        alpha, beta = np.linalg.solve(np.column_stack([r, p]), q)
        return cls(np.column_stack([alpha * r, beta * p]))

    @classmethod
    def from_triples(cls, source: IdealTriple, target: IdealTriple):
        return cls.from_standard(target) @ cls.from_standard(source).inverse()

    def __matmul__(self, other):
        return Moebius(self.matrix @ other.matrix)

    def inverse(self):
        m = self.matrix
        return Moebius(np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]))

    @property
    def det(self):
        return complex(np.linalg.det(self.matrix))

    def sl2(self, sign=1):
        """SL(2) representative; sign picks the lift."""
        return sign * self.matrix / np.sqrt(self.det)

    def trace_sl2(self, sign=1):
        return complex(np.trace(self.sl2(sign)))

    def apply(self, p):
        return _unit(self.matrix @ p)

    def apply_triple(self, triple: IdealTriple) -> IdealTriple:
        return IdealTriple(tuple(self.apply(p) for p in triple.points))

    def derivative_at(self, p):
        """Derivative at a fixed point, det / e^2 with e the eigenvalue on p."""
        e = eigenvalue_on(self.matrix, p)
        return complex(self.det / e ** 2)

    def projectively_equal(self, other, tol=HOLONOMY_TOL):
        a = self.sl2()
        b = other.sl2()
        return min(np.linalg.norm(a - b), np.linalg.norm(a + b)) <= tol * np.linalg.norm(a)

    def is_identity(self, tol=HOLONOMY_TOL):
        return off_scalar_residual(self.matrix) <= tol


def eigenvalue_on(matrix, p, tol=HOLONOMY_TOL):
    """Eigenvalue of matrix on the line p, checking that p is fixed."""
    p = _unit(p)
    image = matrix @ p
    e = complex(np.vdot(p, image) / np.vdot(p, p))
    if np.linalg.norm(image - e * p) > tol * max(1.0, np.linalg.norm(image)):
        raise AmbiguousEigenline(f"{to_complex(p)} is not a fixed point")
    return e


#################
# Developing
#################


@dataclass(frozen=True)
class DualPath:
    """A path in the dual graph: start face and the slot crossed at every step."""

    start: int
    slots: Tuple[int, ...]

    def __add__(self, other):
        return DualPath(self.start, self.slots + other.slots)


def dual_path_from_edges(t: Triangulation, start, edges) -> DualPath:
    """Dual path crossing the given edges in order.

    Raises
    ------
    InputError
        if an edge is not a side of the current face, is a boundary edge or
        appears twice in the current face.
    """
    face = start
    slots = []
    for edge in edges:
        matches = [s for s in range(3) if t.faces[face][s] == edge]
        if len(matches) != 1:
            reason = "not a side of" if not matches else "ambiguous in"
            raise InputError(f"edge {edge + 1} is {reason} face {face + 1}")
        partner = t.partner((face, matches[0]))
        if partner is None:
            raise InputError(f"edge {edge + 1} is a boundary edge")
        slots.append(matches[0])
        face = partner[0]
    return DualPath(start, tuple(slots))


def cross(t: Triangulation, x: EdgeWeights, face, triple: IdealTriple, slot):
    """Cross one side of a developed face.

    Returns
    -------
    int, IdealTriple
        the face on the other side and its developed triple in its own
        slot order.
    """
    partner = t.partner((face, slot))
    if partner is None:
        raise InputError(f"side {slot + 1} of face {face + 1} is on the boundary")
    k, u = partner
    a, b, c = triple[slot], triple[slot + 1], triple[slot + 2]
    z = fourth_vertex(a, b, c, x[t.edge_of((face, slot))])
    points = [None] * 3
    points[u] = b
    points[(u + 1) % 3] = a
    points[(u + 2) % 3] = z
    return k, IdealTriple(tuple(points))


def walk(t: Triangulation, x: EdgeWeights, path: DualPath, start: Optional[IdealTriple] = None):
    """Faces and developed triples along a dual path, start included."""
    if len(x) != t.edge_count:
        raise InputError(f"{len(x)} weights for {t.edge_count} edges")
    face = path.start
    triple = start if start is not None else IdealTriple.standard()
    out = [(face, triple)]
    for slot in path.slots:
        face, triple = cross(t, x, face, triple, slot)
        out.append((face, triple))
    return out


def develop(t: Triangulation, x: EdgeWeights, path: DualPath) -> IdealTriple:
    """Developed triple of the last face of a dual path, the first face
    being placed at (0, 1, infinity).

    Raises
    ------
    DegenerateDevelopment
    """
    return walk(t, x, path)[-1][1]


def holonomy(t: Triangulation, x: EdgeWeights, loop: DualPath) -> Moebius:
    """Moebius transformation carrying the initial developed triple of a
    closed dual path to the final one.

    Raises
    ------
    InputError
        if the path does not close.
    DegenerateDevelopment
    """
    steps = walk(t, x, loop)
    face, final = steps[-1]
    if face != loop.start:
        raise InputError(f"dual path ends at face {face + 1}, not at face {loop.start + 1}")
    return Moebius.from_triples(steps[0][1], final)


#################
# Spanning tree and lifts
#################


@dataclass(frozen=True)
class DualTree:
    """A spanning tree of the dual graph rooted at face 0.

    Parameters
    ----------
    paths : dict
        dual path from the root to every face.
    back : dict
        slot leading back to the parent, for every face but the root.
    parents : dict
    tree_edges : frozenset of int
        labels of the edges crossed by the tree.
    generators : tuple of int
        interior edges off the tree, one free generator of the fundamental
        group each.
    """

    root: int
    paths: Dict[int, DualPath]
    back: Dict[int, int]
    parents: Dict[int, int]
    tree_edges: FrozenSet[int]
    generators: Tuple[int, ...]


def dual_tree(t: Triangulation) -> DualTree:
    graph = dual_graph(t)
    if not nx.is_connected(graph):
        raise InputError("the dual graph is not connected")
    root = 0
    paths = {root: DualPath(root, ())}
    back, parents = {}, {}
    tree_edges = set()
    for parent, child in nx.bfs_edges(graph, root):
        label = min(graph[parent][child])
        side = next(side for side in t.sides_of(label) if side[0] == parent)
        paths[child] = paths[parent] + DualPath(root, (side[1],))
        back[child] = t.partner(side)[1]
        parents[child] = parent
        tree_edges.add(label)
    generators = tuple(
        label
        for label in range(t.edge_count)
        if t.is_interior(label) and label not in tree_edges
    )
    return DualTree(root, paths, back, parents, frozenset(tree_edges), generators)


def path_to_root(t: Triangulation, tree: DualTree, face) -> DualPath:
    slots = []
    while face != tree.root:
        slots.append(tree.back[face])
        face = tree.parents[face]
    return DualPath(face, tuple(slots))


def generator_loop(t: Triangulation, tree: DualTree, edge) -> DualPath:
    """Loop at the root crossing a non-tree edge once, through its first side."""
    (f1, s1), (f2, _) = sorted(t.sides_of(edge))
    home = path_to_root(t, tree, f2)
    return DualPath(tree.root, tree.paths[f1].slots + (s1,) + home.slots)


def generator_loops(t: Triangulation) -> Dict[int, DualPath]:
    tree = dual_tree(t)
    return {edge: generator_loop(t, tree, edge) for edge in tree.generators}


@dataclass(frozen=True, eq=False)
class Development:
    """Tree placement of every face and the transition across every glued side.

    transitions[(f, s)] maps the placement of the face across side s of f
    to the triple developed from the placement of f.
    """

    tree: DualTree
    placements: Dict[int, IdealTriple]
    transitions: Dict[Side, Moebius]


def develop_surface(t: Triangulation, x: EdgeWeights) -> Development:
    tree = dual_tree(t)
    placements = {}
    for face, path in tree.paths.items():
        placements[face] = develop(t, x, path)
    transitions = {}
    for label in range(t.edge_count):
        if not t.is_interior(label):
            continue
        for face, slot in t.sides_of(label):
            k, triple = cross(t, x, face, placements[face], slot)
            transitions[(face, slot)] = Moebius.from_triples(placements[k], triple)
    return Development(tree, placements, transitions)


def lifted_crossing(t: Triangulation, dev: Development, side, signs) -> np.ndarray:
    """SL(2) lift of the transition across a side.

    Tree crossings lift to the identity. A generator edge lifts to
    signs[edge] times the unit-determinant matrix of its first side, and
    to the inverse through its second side.
    """
    edge = t.edge_of(side)
    if edge in dev.tree.tree_edges:
        return np.eye(2, dtype=complex)
    first = sorted(t.sides_of(edge))[0]
    lift = signs.get(edge, 1) * dev.transitions[first].sl2()
    if tuple(side) == first:
        return lift
    return np.array([[lift[1, 1], -lift[0, 1]], [-lift[1, 0], lift[0, 0]]])


def lifted_holonomy(t: Triangulation, x: EdgeWeights, loop: DualPath, signs=None, dev=None):
    """Product of the lifted crossings along a closed dual path.

    Parameters
    ----------
    signs : dict, optional
        +1 or -1 per generator edge; missing edges take +1.

    Returns
    -------
    np.ndarray
        an SL(2, C) matrix.
    """
    dev = dev or develop_surface(t, x)
    signs = signs or {}
    face = loop.start
    out = np.eye(2, dtype=complex)
    for slot in loop.slots:
        out = out @ lifted_crossing(t, dev, (face, slot), signs)
        face = t.partner((face, slot))[0]
    if face != loop.start:
        raise InputError(f"dual path ends at face {face + 1}, not at face {loop.start + 1}")
    return out


#################
# Punctures
#################


def peripheral_loop(t: Triangulation, puncture: Puncture) -> DualPath:
    """Loop around an interior puncture crossing, at each corner, the side
    ending at the puncture."""
    if puncture.boundary:
        raise InputError("a boundary puncture has no peripheral loop")
    return DualPath(puncture.corners[0][0], tuple(s for _, s in puncture.crossings))


@dataclass(frozen=True)
class PunctureEigenvalue:
    """Peripheral data of one puncture.

    a_sq is the square of the eigenvalue of an SL(2) lift on the fixed
    line; derivative is the derivative of the holonomy at the fixed point,
    equal to 1 / a_sq; expected is 1 / (product of incident weights).
    """

    a_sq: complex
    derivative: complex
    expected: complex
    residual: float


def puncture_eigenvalue(t: Triangulation, x: EdgeWeights, puncture: Puncture):
    """Peripheral eigenvalue from the holonomy, with its combinatorial residual.

    Raises
    ------
    AmbiguousEigenline
        if the fixed point of the loop is not the developed puncture.
    """
    loop = peripheral_loop(t, puncture)
    steps = walk(t, x, loop)
    T = Moebius.from_triples(steps[0][1], steps[-1][1])
    xi = steps[0][1][puncture.corners[0][1]]
    derivative = T.derivative_at(xi)
    a_sq = 1 / derivative
    expected = puncture_eigenvalue_sq(x, puncture)
    residual = abs(a_sq - expected) / max(1.0, abs(expected))
    logger.debug(f"Puncture eigenvalue a^2 = {a_sq}, expected {expected}")
    return PunctureEigenvalue(complex(a_sq), complex(derivative), complex(expected), float(residual))


@dataclass(frozen=True)
class LoadReport:
    """Comparison of (-1)^p / (a_1 ... a_p) with the total peripheral load."""

    p: int
    eigenvalues: Tuple[complex, ...]
    signed_product: complex
    peripheral_load: complex
    residual: float
    squared_residual: float
    signs: Dict[int, int]


def total_load_check(t: Triangulation, x: EdgeWeights, signs=None, tol=LOAD_TOL) -> LoadReport:
    """Eigenvalues a_k of the lifted peripheral holonomies on their fixed
    lines, and the relation (-1)^p / (a_1 ... a_p) = x_1 ... x_n.

    Parameters
    ----------
    signs : dict, optional
        lift sign per generator edge.

    Raises
    ------
    InputError
        for surfaces with boundary.
    AmbiguousEigenline
        if a lifted peripheral holonomy is +-Id.
    """
    if t.boundary_edges:
        raise InputError("the total load relation needs a surface without boundary")
    signs = dict(signs or {})
    dev = develop_surface(t, x)
    eigenvalues = []
    for puncture in punctures(t):
        loop = peripheral_loop(t, puncture)
        P = lifted_holonomy(t, x, loop, signs, dev)
        if off_scalar_residual(P) <= HOLONOMY_TOL:
            raise AmbiguousEigenline("a peripheral holonomy is trivial: its eigenline is not determined")
        j, s = puncture.corners[0]
        eigenvalues.append(eigenvalue_on(P, dev.placements[j][s]))

    p = len(eigenvalues)
    signed = (-1) ** p / np.prod(eigenvalues)
    load = peripheral_load(x)
    residual = abs(signed - load) / max(1.0, abs(load))
    squared = abs(np.prod(eigenvalues) ** -2 - load ** 2) / max(1.0, abs(load) ** 2)
    if residual > tol:
        logger.info(f"Total load relation off by {residual:.3e}")
    return LoadReport(
        p, tuple(complex(a) for a in eigenvalues), complex(signed), load, float(residual),
        float(squared), signs,
    )


#################
# Weights from geometry
#################


def roundtrip_weights(t: Triangulation, x: EdgeWeights) -> EdgeWeights:
    """Read the weights back from the developed surface.

    Interior edges are measured on the quadrilateral formed by the tree
    placement of one face and the triangle developed across the edge;
    boundary edges carry no geometry and are returned unchanged.
    """
    dev = develop_surface(t, x)
    out = list(x.values)
    for label in range(t.edge_count):
        if not t.is_interior(label):
            continue
        face, slot = t.sides_of(label)[0]
        triple = dev.placements[face]
        k, u = t.partner((face, slot))
        _, across = cross(t, x, face, triple, slot)
        out[label] = -cross_ratio(triple[slot], triple[slot + 1], triple[slot + 2], across[u + 2])
    return EdgeWeights(tuple(complex(v) for v in out))


def flipped_weights(t: Triangulation, x: EdgeWeights, edge) -> EdgeWeights:
    """Weights of the flipped triangulation read from the developed square.

    Every edge keeps its developed quadrilateral except where a side of the
    square now bounds a triangle with the opposite corner of the square as
    third vertex; the diagonal is measured on the same square.
    """
    move = flip_move(t, edge)
    check_generic(x[edge])
    square = set(move.faces)
    slot_of = dict(zip(move.faces, move.slots))

    def third_vertex(face, triple, slot):
        if face in square:
            _, across = cross(t, x, face, triple, slot_of[face])
            u = t.partner((face, slot_of[face]))[1]
            return across[u + 2]
        return triple[slot + 2]

    out = list(x.values)
    for label in range(t.edge_count):
        if not t.is_interior(label):
            continue
        sides = t.sides_of(label)
        if label == edge or not any(f in square for f, _ in sides):
            continue
        (f1, s1), (f2, s2) = sorted(sides, key=lambda side: side[0] not in square)
        start = IdealTriple.standard()
        _, across = cross(t, x, f1, start, s1)
        r = third_vertex(f1, start, s1)
        t4 = third_vertex(f2, across, s2)
        out[label] = -cross_ratio(start[s1], start[s1 + 1], r, t4)

    j, k = move.faces
    s, u = move.slots
    start = IdealTriple.standard()
    a, b, c = start[s], start[s + 1], start[s + 2]
    _, across = cross(t, x, j, start, s)
    z = across[u + 2]
    out[edge] = -cross_ratio(z, c, a, b)
    logger.debug(f"Geometric flip of edge {edge + 1}")
    return EdgeWeights(tuple(complex(v) for v in out))


def holonomy_traces(t: Triangulation, x: EdgeWeights, loops: Sequence[DualPath]):
    """SL(2) traces (principal lift) of the holonomies of several loops."""
    return [holonomy(t, x, loop).trace_sl2() for loop in loops]
