"""
    qteich.surface
    ~~~~~~~~~~~~~~

    Combinatorial ideal triangulations of punctured surfaces.

    A triangulation is stored as the edge label carried by each (face, slot).
    Slots of a face are listed clockwise; side s runs from vertex v_s to
    v_{s+1}. Sides sharing a label are glued, a label seen once is a boundary
    edge. Every derived structure (gluing involution, corner cycles, sigma)
    is computed from the labels.

    :copyright: 2020 by qteich Authors, see AUTHORS for more details.
    :license: BSD, see LICENSE for more details.
"""

import collections
import functools
import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .common import FlipError, MalformedTriangulation, logger

Side = Tuple[int, int]


@dataclass(frozen=True)
class Triangulation:
    """An edge-labeled ideal triangulation.

    Parameters
    ----------
    faces : tuple of 3-tuples of int
        edge label of every slot, slots in clockwise order.
    """

    faces: Tuple[Tuple[int, int, int], ...]

    def __post_init__(self):
        problems = []
        seen = collections.Counter()
        for j, face in enumerate(self.faces):
            if len(face) != 3:
                problems.append(f"face {j + 1} has {len(face)} sides")
                continue
            for label in face:
                seen[label] += 1

        for label, count in seen.items():
            if count > 2:
                problems.append(f"edge {label + 1} is carried by {count} sides")

        if seen and sorted(seen) != list(range(len(seen))):
            problems.append("edge labels must be consecutive")

        if problems:
            for problem in problems:
                logger.error(problem)
            raise MalformedTriangulation("Invalid triangulation", problems)

    @classmethod
    def from_gluing(cls, face_count, gluing, labels=None):
        """Build a triangulation from a gluing table.

        Edges are numbered by the gluing pairs in list order, then by the
        unglued sides in (face, slot) order, unless explicit labels are given.

        Parameters
        ----------
        face_count : int
        gluing : sequence of (side, side)
            0-based sides (face, slot).
        labels : sequence of 3-sequences of int, optional
            0-based edge label of every slot; must agree with the gluing.

        Returns
        -------
        Triangulation

        Raises
        ------
        MalformedTriangulation
            listing every problem found.
        """
        problems = []
        if face_count < 1:
            problems.append("a triangulation has at least one face")

        partner = {}
        for pair in gluing:
            if len(pair) != 2:
                problems.append(f"gluing entry {pair!r} is not a pair of sides")
                continue
            first, second = (tuple(side) for side in pair)
            for side in (first, second):
                if not (0 <= side[0] < face_count and 0 <= side[1] < 3):
                    problems.append(f"side {_side_str(side)} is out of range")
            if first == second:
                problems.append(f"side {_side_str(first)} is paired with itself")
                continue
            for side in (first, second):
                if side in partner:
                    problems.append(f"side {_side_str(side)} is glued twice")
            partner[first] = second
            partner[second] = first

        if problems:
            for problem in problems:
                logger.error(problem)
            raise MalformedTriangulation("Gluing is not a valid involution", problems)

        if labels is not None:
            faces = tuple(tuple(int(e) for e in face) for face in labels)
            if len(faces) != face_count:
                raise MalformedTriangulation(
                    f"labels describe {len(faces)} faces, expected {face_count}"
                )
            t = cls(faces)
            if t.partner_map != partner:
                raise MalformedTriangulation("labels disagree with the gluing table")
            return t

        table = [[None] * 3 for _ in range(face_count)]
        label = 0
        for pair in gluing:
            for j, s in pair:
                table[j][s] = label
            label += 1
        for j in range(face_count):
            for s in range(3):
                if table[j][s] is None:
                    table[j][s] = label
                    label += 1

        return cls(tuple(tuple(face) for face in table))

    @property
    def face_count(self):
        return len(self.faces)

    @property
    def edge_count(self):
        return 1 + max(max(face) for face in self.faces)

    def edge_of(self, side):
        j, s = side
        return self.faces[j][s % 3]

    @functools.cached_property
    def sides_by_edge(self) -> Dict[int, Tuple[Side, ...]]:
        out = collections.defaultdict(list)
        for j, face in enumerate(self.faces):
            for s, label in enumerate(face):
                out[label].append((j, s))
        return {label: tuple(sides) for label, sides in sorted(out.items())}

    def sides_of(self, edge):
        return self.sides_by_edge[edge]

    @functools.cached_property
    def partner_map(self) -> Dict[Side, Side]:
        out = {}
        for sides in self.sides_by_edge.values():
            if len(sides) == 2:
                out[sides[0]] = sides[1]
                out[sides[1]] = sides[0]
        return out

    def partner(self, side) -> Optional[Side]:
        j, s = side
        return self.partner_map.get((j, s % 3))

    def is_interior(self, edge):
        return len(self.sides_of(edge)) == 2

    def is_self_folded(self, edge):
        sides = self.sides_of(edge)
        return len(sides) == 2 and sides[0][0] == sides[1][0]

    @property
    def boundary_edges(self):
        return [e for e, sides in self.sides_by_edge.items() if len(sides) == 1]

    def gluing(self):
        """Gluing table as a sorted list of 0-based side pairs."""
        return [
            list(sides)
            for _, sides in sorted(self.sides_by_edge.items())
            if len(sides) == 2
        ]


def _side_str(side):
    return f"({side[0] + 1}, {side[1] + 1})"


#################
# Derived data
#################


@dataclass(frozen=True)
class Puncture:
    """A vertex of the triangulation, seen as a cycle (or chain) of corners.

    Parameters
    ----------
    corners : tuple of Side
        corner (j, s) is the corner of face j at vertex v_s, listed in the
        order obtained by repeatedly crossing the side ending at the vertex.
    edges : tuple of int
        edge ends at the puncture, with multiplicity.
    boundary : bool
        True for a puncture on the boundary of the surface.
    """

    corners: Tuple[Side, ...]
    edges: Tuple[int, ...]
    boundary: bool

    @property
    def crossings(self):
        """Sides crossed by the peripheral loop (interior punctures)."""
        return tuple((j, (s - 1) % 3) for j, s in self.corners)


@functools.lru_cache(maxsize=256)
def punctures(t: Triangulation) -> Tuple[Puncture, ...]:
    """Partition the face corners into cycles around the punctures.

    Parameters
    ----------
    t : Triangulation

    Returns
    -------
    tuple of Puncture
    """

    def following(corner):
        j, s = corner
        return t.partner((j, s - 1))

    visited = set()
    out = []

    # Chains of boundary punctures start at a corner whose starting side is free.
    for j in range(t.face_count):
        for s in range(3):
            if t.partner((j, s)) is not None:
                continue
            corner = (j, s)
            corners = []
            edges = [t.edge_of((j, s))]
            while corner is not None:
                corners.append(corner)
                visited.add(corner)
                edges.append(t.edge_of((corner[0], corner[1] - 1)))
                corner = following(corner)
            out.append(Puncture(tuple(corners), tuple(edges), True))

    for j in range(t.face_count):
        for s in range(3):
            if (j, s) in visited:
                continue
            corner = (j, s)
            corners = []
            while corner not in visited:
                corners.append(corner)
                visited.add(corner)
                corner = following(corner)
            edges = tuple(t.edge_of((c[0], c[1] - 1)) for c in corners)
            out.append(Puncture(tuple(corners), edges, False))

    return tuple(out)


def sigma_matrix(t: Triangulation) -> np.ndarray:
    """Antisymmetric matrix of the Chekhov-Fock relations.

    The corner of face j at v_s is bounded by the sides s-1 and s, the first
    one coming first counterclockwise; it adds one to sigma[e(s-1), e(s)].

    Parameters
    ----------
    t : Triangulation

    Returns
    -------
    np.ndarray
        (n, n) integer matrix.
    """
    n = t.edge_count
    sigma = np.zeros((n, n), dtype=int)
    for face in t.faces:
        for s in range(3):
            first, second = face[s - 1], face[s]
            sigma[first, second] += 1
            sigma[second, first] -= 1
    return sigma


def dual_graph(t: Triangulation) -> nx.MultiGraph:
    """Faces as nodes, one edge per glued pair of sides.

    Each graph edge carries the crossed side of its smaller endpoint as `side`
    and the edge label as `label`.
    """
    graph = nx.MultiGraph()
    graph.add_nodes_from(range(t.face_count))
    for label, sides in t.sides_by_edge.items():
        if len(sides) == 2:
            (j, s), (k, r) = sides
            graph.add_edge(j, k, key=label, label=label, sides=((j, s), (k, r)))
    return graph


def components(t: Triangulation) -> List[Tuple[int, ...]]:
    graph = dual_graph(t)
    return sorted(
        (tuple(sorted(c)) for c in nx.connected_components(graph)), key=lambda c: c[0]
    )


@dataclass(frozen=True)
class ComponentReport:
    faces: Tuple[int, ...]
    m: int
    n: int
    u: int
    p: int
    chi: int
    interior_punctures: int
    hyperbolic: bool


@dataclass(frozen=True)
class ValidationReport:
    m: int
    n: int
    u: int
    p: int
    chi: int
    connected: bool
    components: Tuple[ComponentReport, ...]


def validate(t: Triangulation) -> ValidationReport:
    """Counts, Euler characteristic and connectivity of a triangulation.

    The Euler characteristic of the punctured surface is computed from the
    corner cycles and cross-checked against m = -2 chi + s, n = -3 chi + 2 s
    with s the number of boundary edges.

    Parameters
    ----------
    t : Triangulation

    Returns
    -------
    ValidationReport

    Raises
    ------
    MalformedTriangulation
        if the corner structure is inconsistent.
    """
    all_punctures = punctures(t)
    problems = []

    total = sum(len(p.corners) for p in all_punctures)
    if total != 3 * t.face_count:
        problems.append(f"corner cycles cover {total} corners, expected {3 * t.face_count}")

    reports = []
    for faces in components(t):
        face_set = set(faces)
        edges = {label for j in faces for label in t.faces[j]}
        u = sum(1 for e in edges if not t.is_interior(e))
        local = [p for p in all_punctures if p.corners[0][0] in face_set]
        interior = sum(1 for p in local if not p.boundary)
        m, n = len(faces), len(edges)
        chi = (len(local) - n + m) - interior
        if 2 * chi != u - m or n != -3 * chi + 2 * u:
            problems.append(f"component {faces} has inconsistent Euler characteristic")
        reports.append(
            ComponentReport(faces, m, n, u, len(local), chi, interior, chi < 0)
        )

    if problems:
        for problem in problems:
            logger.error(problem)
        raise MalformedTriangulation("Integrity check not passed", problems)

    return ValidationReport(
        m=t.face_count,
        n=t.edge_count,
        u=len(t.boundary_edges),
        p=len(all_punctures),
        chi=sum(r.chi for r in reports),
        connected=len(reports) == 1,
        components=tuple(reports),
    )


#################
# Diagonal exchanges
#################


@dataclass(frozen=True)
class FlipMove:
    """The square around a diagonal.

    Parameters
    ----------
    edge : int
        the diagonal.
    faces : (int, int)
        the faces on both sides of the diagonal.
    slots : (int, int)
        slot of the diagonal in each face.
    positions : dict
        edge occupying each side position of the square, keyed by
        "lambda2" ... "lambda5". Positions 2 and 4 sit two slots after the
        diagonal, positions 3 and 5 one slot after it.
    """

    edge: int
    faces: Tuple[int, int]
    slots: Tuple[int, int]
    positions: Dict[str, int] = field(compare=False)

    def side_of(self, position) -> Side:
        """Side (face, slot) of the square at a position."""
        j, k = self.faces
        s, r = self.slots
        return {
            "lambda5": (j, (s + 1) % 3),
            "lambda2": (j, (s + 2) % 3),
            "lambda3": (k, (r + 1) % 3),
            "lambda4": (k, (r + 2) % 3),
        }[position]

    @property
    def plus_positions(self):
        """Positions multiplied by (1 + x) under the flip."""
        return ("lambda2", "lambda4")

    @property
    def inverse_positions(self):
        """Positions multiplied by (1 + 1/x)^-1 under the flip."""
        return ("lambda3", "lambda5")

    def side_map(self) -> Dict[Side, Side]:
        """Where the six sides of the square sit after the flip.

        Square sides keep their direction along the boundary of the square;
        the diagonal keeps its two slots.
        """
        j, k = self.faces
        s, r = self.slots
        return {
            (j, s): (j, s),
            (k, r): (k, r),
            self.side_of("lambda2"): (j, (s + 1) % 3),
            self.side_of("lambda3"): (j, (s + 2) % 3),
            self.side_of("lambda4"): (k, (r + 1) % 3),
            self.side_of("lambda5"): (k, (r + 2) % 3),
        }


def flip_move(t: Triangulation, edge: int) -> FlipMove:
    """Describe the square whose diagonal is the given edge.

    Raises
    ------
    FlipError
        for a boundary edge or a self-folded diagonal.
    """
    if not 0 <= edge < t.edge_count:
        raise FlipError(f"edge {edge + 1} does not exist", code="no-such-edge")
    if not t.is_interior(edge):
        raise FlipError(f"edge {edge + 1} is a boundary edge", code="boundary-edge")
    if t.is_self_folded(edge):
        raise FlipError(f"edge {edge + 1} is self-folded", code="self-folded")

    (j, s), (k, r) = t.sides_of(edge)
    fj, fk = t.faces[j], t.faces[k]
    positions = {
        "lambda5": fj[(s + 1) % 3],
        "lambda2": fj[(s + 2) % 3],
        "lambda3": fk[(r + 1) % 3],
        "lambda4": fk[(r + 2) % 3],
    }
    return FlipMove(edge, (j, k), (s, r), positions)


def flip(t: Triangulation, edge: int):
    """Exchange the diagonal of the square around an edge.

    The new diagonal keeps the label of the old one; all other edges keep
    their labels. The faces on both sides keep their indices and carry
    (diagonal, lambda2, lambda3) and (diagonal, lambda4, lambda5).

    Parameters
    ----------
    t : Triangulation
    edge : int

    Returns
    -------
    Triangulation, dict
        the flipped triangulation and the edge correspondence.
    """
    move = flip_move(t, edge)
    j, k = move.faces
    s, r = move.slots
    pos = move.positions

    faces = [list(face) for face in t.faces]
    faces[j][s] = edge
    faces[j][(s + 1) % 3] = pos["lambda2"]
    faces[j][(s + 2) % 3] = pos["lambda3"]
    faces[k][r] = edge
    faces[k][(r + 1) % 3] = pos["lambda4"]
    faces[k][(r + 2) % 3] = pos["lambda5"]

    flipped = Triangulation(tuple(tuple(face) for face in faces))
    return flipped, {e: e for e in range(t.edge_count)}


#################
# Splitting and fusion
#################


@dataclass(frozen=True)
class Fusion:
    """Records how a split surface fuses back.

    Parameters
    ----------
    pairs : tuple of (int, int)
        (original edge, edge label created by the split).
    sides : tuple of (Side, Side)
        the two boundary sides to glue back for every pair.
    """

    pairs: Tuple[Tuple[int, int], ...]
    sides: Tuple[Tuple[Side, Side], ...]


def split(t: Triangulation, edges: Sequence[int]):
    """Cut the surface open along interior edges.

    The first side of every cut edge keeps its label; the second gets a new
    label, appended after the existing ones.

    Returns
    -------
    Triangulation, Fusion
    """
    faces = [list(face) for face in t.faces]
    next_label = t.edge_count
    pairs, sides = [], []
    for edge in sorted(set(edges)):
        if not 0 <= edge < t.edge_count or not t.is_interior(edge):
            raise MalformedTriangulation(f"edge {edge + 1} is not an interior edge")
        first, second = t.sides_of(edge)
        faces[second[0]][second[1]] = next_label
        pairs.append((edge, next_label))
        sides.append((first, second))
        next_label += 1

    cut = Triangulation(tuple(tuple(face) for face in faces))
    return cut, Fusion(tuple(pairs), tuple(sides))


def fuse(t: Triangulation, pairs: Sequence[Tuple[Side, Side]]) -> Triangulation:
    """Glue pairs of boundary sides.

    The glued edge takes the label of the first side of each pair; the
    remaining labels are renumbered keeping their order.
    """
    problems = []
    faces = [list(face) for face in t.faces]
    used = set()
    for first, second in pairs:
        first, second = tuple(first), tuple(second)
        if first == second:
            problems.append(f"side {_side_str(first)} is paired with itself")
            continue
        for side in (first, second):
            if t.partner(side) is not None:
                problems.append(f"side {_side_str(side)} is already glued")
            if side in used:
                problems.append(f"side {_side_str(side)} appears in two pairs")
            used.add(side)
        faces[second[0]][second[1]] = t.edge_of(first)

    if problems:
        for problem in problems:
            logger.error(problem)
        raise MalformedTriangulation("Cannot fuse", problems)

    remaining = sorted({label for face in faces for label in face})
    renumber = {label: i for i, label in enumerate(remaining)}
    return Triangulation(tuple(tuple(renumber[e] for e in face) for face in faces))


#################
# Labeled isomorphisms
#################


def _min_rotation(face):
    rotations = [face[i:] + face[:i] for i in range(3)]
    return min(rotations)


@functools.lru_cache(maxsize=4096)
def canonical_key(t: Triangulation):
    """Hashable key equal for labeled-isomorphic triangulations."""
    return tuple(sorted(_min_rotation(tuple(face)) for face in t.faces))


def relabel(t: Triangulation, perm) -> Triangulation:
    """Rename edges: edge e becomes perm[e].

    Parameters
    ----------
    perm : dict or sequence
        a bijection of the edge labels.
    """
    mapping = [perm[e] for e in range(t.edge_count)]
    if sorted(mapping) != list(range(t.edge_count)):
        raise MalformedTriangulation("relabeling is not a bijection of the edges")
    return Triangulation(tuple(tuple(mapping[e] for e in face) for face in t.faces))


@dataclass(frozen=True)
class Alignment:
    """Face permutation and slot rotation between two equal triangulations.

    Slot s of source face j is slot (s + rotations[j]) % 3 of target face
    face_map[j].
    """

    face_map: Tuple[int, ...]
    rotations: Tuple[int, ...]


def align(source: Triangulation, target: Triangulation) -> Alignment:
    """Find the isomorphism realizing the labeled equality of two triangulations.

    Raises
    ------
    MalformedTriangulation
        if the triangulations differ.
    """
    if canonical_key(source) != canonical_key(target):
        raise MalformedTriangulation("triangulations are not equal as labeled triangulations")

    free = list(range(target.face_count))
    face_map, rotations = [], []
    for face in source.faces:
        for k in free:
            candidate = target.faces[k]
            rotation = next(
                (r for r in range(3) if all(candidate[(s + r) % 3] == face[s] for s in range(3))),
                None,
            )
            if rotation is not None:
                face_map.append(k)
                rotations.append(rotation)
                free.remove(k)
                break
    return Alignment(tuple(face_map), tuple(rotations))


def align_from(source: Triangulation, target: Triangulation, anchors) -> Alignment:
    """Isomorphism of labeled triangulations fixed by the image of given sides.

    Parameters
    ----------
    source, target : Triangulation
    anchors : iterable of (Side, Side)
        source side and its image, in order of preference. The first anchor
        met in each connected component fixes the map on that component.

    Returns
    -------
    Alignment

    Raises
    ------
    MalformedTriangulation
        if an anchored map does not respect the labels or misses a face.
    """
    face_map = [None] * source.face_count
    rotations = [None] * source.face_count
    for (g, s), (f, u) in anchors:
        if face_map[g] is not None:
            continue
        stack = [(g, f, (u - s) % 3)]
        while stack:
            g, f, rotation = stack.pop()
            if face_map[g] is not None:
                if (face_map[g], rotations[g]) != (f, rotation):
                    raise MalformedTriangulation("anchored sides do not define an isomorphism")
                continue
            if any(
                source.faces[g][slot] != target.faces[f][(slot + rotation) % 3]
                for slot in range(3)
            ):
                raise MalformedTriangulation(
                    f"face {g + 1} cannot go to face {f + 1} with rotation {rotation}"
                )
            face_map[g], rotations[g] = f, rotation
            for slot in range(3):
                there = source.partner((g, slot))
                image = target.partner((f, slot + rotation))
                if (there is None) != (image is None):
                    raise MalformedTriangulation("anchored map sends a glued side to a boundary")
                if there is not None:
                    stack.append((there[0], image[0], (image[1] - there[1]) % 3))

    if None in face_map or len(set(face_map)) != len(face_map):
        raise MalformedTriangulation("anchored sides do not reach every face once")
    return Alignment(tuple(face_map), tuple(rotations))


@dataclass(frozen=True)
class SideTrack:
    """Sides followed along a flip path.

    Parameters
    ----------
    end : Triangulation
    sides : dict
        side of the start triangulation -> side of the end one carrying the
        same edge in the same direction.
    flipped : frozenset of int
        edges used as a diagonal along the path.
    """

    end: Triangulation
    sides: Dict[Side, Side]
    flipped: FrozenSet[int]


def track_sides(t: Triangulation, path) -> SideTrack:
    sides = {(j, s): (j, s) for j in range(t.face_count) for s in range(3)}
    current = t
    for edge in path:
        step = flip_move(current, edge).side_map()
        sides = {start: step.get(now, now) for start, now in sides.items()}
        current, _ = flip(current, edge)
    return SideTrack(current, sides, frozenset(path))


def closing_alignment(t: Triangulation, path, perm) -> Alignment:
    """Isomorphism from t relabeled by perm onto the end of a flip path.

    Face indices alone do not fix it when faces carry equal labels (the
    once-punctured torus). Edge e goes to edge perm[e] traversed the way
    the path carries the first side of perm[e]; edges that are never a
    diagonal along the path anchor first, and an anchor whose map breaks the
    labels gives way to the next one.
    """
    track = track_sides(t, path)
    renamed = relabel(t, perm)
    edges = sorted(range(t.edge_count), key=lambda e: perm[e] in track.flipped)
    anchors = [(t.sides_of(e)[0], track.sides[t.sides_of(perm[e])[0]]) for e in edges]
    for i in range(len(anchors)):
        try:
            return align_from(renamed, track.end, anchors[i:] + anchors[:i])
        except MalformedTriangulation:
            continue
    return align(renamed, track.end)


def flip_path(source: Triangulation, target: Triangulation, depth: int):
    """Breadth-first search of a flip sequence from source to target.

    Parameters
    ----------
    source, target : Triangulation
        labeled triangulations of the same surface.
    depth : int
        maximal number of flips.

    Returns
    -------
    list of int or None
        edges to flip in order, None when the depth is exhausted.
    """
    if source.edge_count != target.edge_count or source.face_count != target.face_count:
        raise MalformedTriangulation("triangulations do not describe the same surface")

    goal = canonical_key(target)
    start = canonical_key(source)
    if start == goal:
        return []

    visited = {start}
    frontier = collections.deque([(source, [])])
    while frontier:
        current, path = frontier.popleft()
        if len(path) >= depth:
            continue
        for edge in range(current.edge_count):
            if not current.is_interior(edge) or current.is_self_folded(edge):
                continue
            nxt, _ = flip(current, edge)
            key = canonical_key(nxt)
            if key in visited:
                continue
            if key == goal:
                logger.debug(f"Flip path of length {len(path) + 1} found")
                return path + [edge]
            visited.add(key)
            frontier.append((nxt, path + [edge]))

    logger.info(f"No flip path within depth {depth} ({len(visited)} triangulations visited)")
    return None


def find_relabel(source: Triangulation, target: Triangulation, fix_boundary=True):
    """Edge bijection perm such that relabel(source, perm) equals target.

    Parameters
    ----------
    source, target : Triangulation
    fix_boundary : bool
        only accept bijections fixing every boundary edge.

    Returns
    -------
    tuple of int or None
    """
    if (source.face_count, source.edge_count) != (target.face_count, target.edge_count):
        return None

    for face_perm in itertools.permutations(range(source.face_count)):
        for rotations in itertools.product(range(3), repeat=source.face_count):
            mapping = {}
            consistent = True
            for j, (k, r) in enumerate(zip(face_perm, rotations)):
                for s in range(3):
                    a = source.faces[j][s]
                    b = target.faces[k][(s + r) % 3]
                    if mapping.setdefault(a, b) != b:
                        consistent = False
                        break
                if not consistent:
                    break
            if not consistent or len(set(mapping.values())) != len(mapping):
                continue
            if fix_boundary and any(mapping[e] != e for e in source.boundary_edges):
                continue
            return tuple(mapping[e] for e in range(source.edge_count))
    return None
