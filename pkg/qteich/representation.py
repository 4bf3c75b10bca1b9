"""
    qteich.representation
    ~~~~~~~~~~~~~~~~~~~~~

    Irreducible representations of the triangle algebra and local
    representations of the Chekhov-Fock algebra as tensor products over faces.

    Operators are kept factorized (one N x N factor per face) and only made
    dense on demand.

    :copyright: 2020 by qteich Authors, see AUTHORS for more details.
    :license: BSD, see LICENSE for more details.
"""

import functools
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np

from .common import (
    DEFAULT_MAX_DIM,
    SCALAR_TOL,
    DimensionCapError,
    InputError,
    LoadMismatchError,
    NonScalarError,
    logger,
    relative_residual,
    scalar_of,
)
from .qalgebra import QParams
from .surface import Alignment, Fusion, Triangulation, fuse, sigma_matrix


def principal_root(value, N):
    """Principal N-th root of a nonzero complex number."""
    return complex(np.power(complex(value), 1.0 / N))


#################
# Triangle algebra
#################


@dataclass(frozen=True, eq=False)
class TriangleRep:
    """An irreducible representation of the triangle algebra.

    Parameters
    ----------
    q : QParams
    matrices : tuple of 3 np.ndarray
        image of the side generator of every slot.
    w : tuple of 3 complex
        side weights, M_s^N = w_s Id.
    h : complex
        face load, q^-1 M_0 M_1 M_2 = h Id.
    """

    q: QParams
    matrices: Tuple[np.ndarray, np.ndarray, np.ndarray]
    w: Tuple[complex, complex, complex]
    h: complex

    @property
    def N(self):
        return self.q.N

    def central(self):
        m0, m1, m2 = self.matrices
        return self.q.power(-1) * (m0 @ m1 @ m2)

    def rotated(self, shift):
        """Slot s moves to slot (s + shift) % 3."""
        matrices = [None] * 3
        w = [None] * 3
        for s in range(3):
            matrices[(s + shift) % 3] = self.matrices[s]
            w[(s + shift) % 3] = self.w[s]
        return replace(self, matrices=tuple(matrices), w=tuple(w))

    def conjugated(self, P):
        """The representation P M P^-1."""
        P = np.asarray(P, dtype=complex)
        Pinv = np.linalg.inv(P)
        return replace(self, matrices=tuple(P @ m @ Pinv for m in self.matrices))

    def scaled(self, factors):
        """Multiply the side generator of slot s by factors[s]."""
        factors = [complex(f) for f in factors]
        if any(f == 0 for f in factors):
            raise InputError("scaling factors must be nonzero")
        return replace(
            self,
            matrices=tuple(f * m for f, m in zip(factors, self.matrices)),
            w=tuple(w * f ** self.N for w, f in zip(self.w, factors)),
            h=self.h * factors[0] * factors[1] * factors[2],
        )


def triangle_rep(q: QParams, y) -> TriangleRep:
    """The triangle representation with parameters (y_1, y_2, y_3).

    On the basis e_0 ... e_{N-1}:

        M_1 e_i = y_1 q^(2i) e_i
        M_2 e_i = y_2 e_(i+1)
        M_3 e_i = y_3 q^(1-2i) e_(i-1)

    Parameters
    ----------
    q : QParams
    y : 3-sequence of nonzero complex

    Returns
    -------
    TriangleRep

    Raises
    ------
    InputError
        if a parameter vanishes.
    """
    y = tuple(complex(v) for v in y)
    if len(y) != 3 or any(v == 0 for v in y):
        raise InputError(f"triangle parameters must be three nonzero numbers, got {y}")
    N = q.N
    idx = np.arange(N)
    m1 = np.diag([y[0] * q.power(2 * i) for i in idx])
    m2 = np.zeros((N, N), dtype=complex)
    m2[(idx + 1) % N, idx] = y[1]
    m3 = np.zeros((N, N), dtype=complex)
    m3[(idx - 1) % N, idx] = [y[2] * q.power(1 - 2 * i) for i in idx]
    return TriangleRep(
        q=q,
        matrices=(m1.astype(complex), m2, m3),
        w=tuple(v ** N for v in y),
        h=y[0] * y[1] * y[2],
    )


def face_from_weights(q: QParams, w, h, tol=SCALAR_TOL) -> TriangleRep:
    """Triangle representation with y_1, y_2 principal roots and y_3 = h / (y_1 y_2).

    Raises
    ------
    LoadMismatchError
        if h^N differs from w_1 w_2 w_3.
    """
    w = tuple(complex(v) for v in w)
    h = complex(h)
    if any(v == 0 for v in w) or h == 0:
        raise InputError("side weights and loads must be nonzero")
    residual = abs(h ** q.N - w[0] * w[1] * w[2]) / max(abs(h ** q.N), abs(w[0] * w[1] * w[2]))
    if residual > tol:
        raise LoadMismatchError(
            f"face load {h} does not satisfy h^N = w1 w2 w3 (residual {residual:.3e})"
        )
    y1, y2 = principal_root(w[0], q.N), principal_root(w[1], q.N)
    rep = triangle_rep(q, (y1, y2, h / (y1 * y2)))
    return replace(rep, w=w)


#################
# Factorized operators
#################


@dataclass(frozen=True, eq=False)
class KronOperator:
    """An operator on V_1 x ... x V_m given by one factor per face.

    A factor None stands for the identity.
    """

    factors: Tuple[Optional[np.ndarray], ...]
    N: int

    def __matmul__(self, other):
        factors = []
        for a, b in zip(self.factors, other.factors):
            if a is None:
                factors.append(b)
            elif b is None:
                factors.append(a)
            else:
                factors.append(a @ b)
        return KronOperator(tuple(factors), self.N)

    def power(self, k):
        return KronOperator(
            tuple(None if f is None else np.linalg.matrix_power(f, k) for f in self.factors),
            self.N,
        )

    def scale(self, value):
        factors = list(self.factors)
        j = next((i for i, f in enumerate(factors) if f is not None), 0)
        base = np.eye(self.N, dtype=complex) if factors[j] is None else factors[j]
        factors[j] = value * base
        return KronOperator(tuple(factors), self.N)

    @property
    def dim(self):
        return self.N ** len(self.factors)

    def dense(self, max_dim=DEFAULT_MAX_DIM):
        if self.dim > max_dim:
            raise DimensionCapError(f"dimension {self.dim} exceeds the cap {max_dim}")
        identity = np.eye(self.N, dtype=complex)
        return functools.reduce(
            np.kron, [identity if f is None else f for f in self.factors], np.eye(1)
        )

    def scalar(self, tol=SCALAR_TOL, what="operator"):
        """Scalar c with operator = c Id, checked factor by factor."""
        value = 1 + 0j
        for f in self.factors:
            if f is not None:
                value *= scalar_of(f, tol, what)
        return value


def on_factors(matrix, factors: Sequence[int], m: int, N: int) -> np.ndarray:
    """Dense operator acting as `matrix` on the listed tensor factors.

    Parameters
    ----------
    matrix : np.ndarray
        operator on V_{factors[0]} x V_{factors[1]} x ..., in that order.
    factors : sequence of int
        distinct face indices.
    m : int
        number of tensor factors.
    N : int

    Returns
    -------
    np.ndarray
        (N^m, N^m) matrix.
    """
    factors = list(factors)
    rest = [f for f in range(m) if f not in factors]
    order = factors + rest
    full = np.kron(matrix, np.eye(N ** len(rest), dtype=complex))
    tensor = full.reshape((N,) * (2 * m))
    axes = [order.index(f) for f in range(m)]
    tensor = tensor.transpose(axes + [m + a for a in axes])
    return tensor.reshape(N ** m, N ** m)


def factor_permutation(face_map: Sequence[int], N: int) -> np.ndarray:
    """Permutation matrix sending factor j to factor face_map[j].

    Parameters
    ----------
    face_map : sequence of int
    N : int

    Returns
    -------
    np.ndarray
    """
    m = len(face_map)
    dim = N ** m
    inverse = [0] * m
    for j, k in enumerate(face_map):
        inverse[k] = j
    perm = np.arange(dim).reshape((N,) * m).transpose(inverse).reshape(dim)
    out = np.zeros((dim, dim))
    out[np.arange(dim), perm] = 1
    return out


#################
# Local representations
#################


@dataclass(frozen=True, eq=False)
class LocalRep:
    """A local representation, one triangle representation per face.

    Parameters
    ----------
    triangulation : Triangulation
    q : QParams
    faces : tuple of TriangleRep
    max_dim : int
        largest dimension made dense.
    """

    triangulation: Triangulation
    q: QParams
    faces: Tuple[TriangleRep, ...]
    max_dim: int = DEFAULT_MAX_DIM

    def __post_init__(self):
        if len(self.faces) != self.triangulation.face_count:
            raise InputError(
                f"{len(self.faces)} face representations for "
                f"{self.triangulation.face_count} faces"
            )
        if self.dim > self.max_dim:
            raise DimensionCapError(f"dimension {self.dim} exceeds the cap {self.max_dim}")

    @property
    def N(self):
        return self.q.N

    @property
    def dim(self):
        return self.q.N ** self.triangulation.face_count

    def side_matrix(self, side):
        j, s = side
        return self.faces[j].matrices[s % 3]

    def generator(self, edge) -> KronOperator:
        """rho(X_edge) as a factorized operator."""
        t = self.triangulation
        factors = [None] * t.face_count
        sides = sorted(t.sides_of(edge))
        if len(sides) == 2 and sides[0][0] == sides[1][0]:
            (j, s1), (_, s2) = sides
            if (s1 + 1) % 3 != s2:
                s1, s2 = s2, s1
            factors[j] = self.q.power(-1) * (
                self.faces[j].matrices[s1] @ self.faces[j].matrices[s2]
            )
        else:
            for j, s in sides:
                factors[j] = self.faces[j].matrices[s]
        return KronOperator(tuple(factors), self.N)

    def generators(self):
        return [self.generator(i) for i in range(self.triangulation.edge_count)]

    def dense_generators(self):
        return [g.dense(self.max_dim) for g in self.generators()]

    def central(self) -> KronOperator:
        """rho(H), product over faces of q^-1 M_0 M_1 M_2."""
        return KronOperator(tuple(f.central() for f in self.faces), self.N)

    def face_data(self):
        return [(f.w, f.h) for f in self.faces]

    def with_faces(self, faces):
        return replace(self, faces=tuple(faces))


def local_rep(t: Triangulation, q: QParams, face_data, max_dim=DEFAULT_MAX_DIM, tol=SCALAR_TOL):
    """Build a local representation from per-face side weights and loads.

    Parameters
    ----------
    t : Triangulation
    q : QParams
    face_data : sequence of (w, h)
        w a triple of side weights, h the face load with h^N = w_1 w_2 w_3.
    max_dim : int

    Returns
    -------
    LocalRep

    Raises
    ------
    LoadMismatchError
    DimensionCapError
    """
    face_data = list(face_data)
    if q.N ** t.face_count > max_dim:
        raise DimensionCapError(
            f"dimension {q.N ** t.face_count} exceeds the cap {max_dim}"
        )
    faces = [face_from_weights(q, w, h, tol) for w, h in face_data]
    logger.debug(f"Local representation of dimension {q.N ** t.face_count} built")
    return LocalRep(t, q, tuple(faces), max_dim)


def classify(r: LocalRep, tol=SCALAR_TOL):
    """Edge weights and central load of a local representation.

    x_i is read from rho(X_i)^N and h from rho(H) after checking that both
    are scalar; h^N = x_1 ... x_n is verified.

    Parameters
    ----------
    r : LocalRep

    Returns
    -------
    tuple of complex, complex
        edge weights (x_1, ..., x_n) and central load h.

    Raises
    ------
    NonScalarError
    """
    x = tuple(
        r.generator(i).power(r.N).scalar(tol, f"rho(X_{i + 1})^N")
        for i in range(r.triangulation.edge_count)
    )
    h = r.central().scalar(tol, "rho(H)")
    product = complex(np.prod(x))
    if relative_residual(h ** r.N, product) > tol:
        raise NonScalarError(f"h^N = {h ** r.N} differs from the product of weights {product}")
    return x, h


def standard_rep(t: Triangulation, q: QParams, k=0, max_dim=DEFAULT_MAX_DIM):
    """The q^(2k)-standard representation: all weights 1, load q^(2k) on the first face."""
    data = [((1, 1, 1), q.power(2 * k) if j == 0 else 1) for j in range(t.face_count)]
    return local_rep(t, q, data, max_dim)


def _edge_owner(t: Triangulation, edge):
    """The side of an edge that receives edge-level scalings."""
    return sorted(t.sides_of(edge))[0]


def scale_by_roots(r: LocalRep, roots) -> LocalRep:
    """Multiply every rho(X_i) by roots[i].

    The factor goes on the first side of the edge, so x_i picks up
    roots[i]^N and the load picks up the product of the roots.
    """
    t = r.triangulation
    roots = [complex(v) for v in roots]
    if len(roots) != t.edge_count:
        raise InputError(f"{len(roots)} roots for {t.edge_count} edges")
    if any(v == 0 for v in roots):
        raise InputError("roots must be nonzero")
    factors = [[1, 1, 1] for _ in range(t.face_count)]
    for i, root in enumerate(roots):
        j, s = _edge_owner(t, i)
        factors[j][s] *= root
    return r.with_faces(face.scaled(f) for face, f in zip(r.faces, factors))


def rep_from_weights(t: Triangulation, q: QParams, x, k=0, max_dim=DEFAULT_MAX_DIM):
    """The q^(2k)-standard representation scaled by principal roots of x."""
    roots = [principal_root(v, q.N) for v in x]
    return scale_by_roots(standard_rep(t, q, k, max_dim), roots)


def gauge(r: LocalRep, edge, a) -> LocalRep:
    """Multiply one side of an interior edge by a and the other by 1/a.

    The generator images, hence the isomorphism class, are unchanged.
    """
    t = r.triangulation
    if not t.is_interior(edge):
        raise InputError(f"edge {edge + 1} is a boundary edge")
    a = complex(a)
    (j, s), (k, u) = sorted(t.sides_of(edge))
    factors = [[1, 1, 1] for _ in range(t.face_count)]
    factors[j][s] *= a
    factors[k][u] /= a
    return r.with_faces(face.scaled(f) for face, f in zip(r.faces, factors))


def conjugate_face(r: LocalRep, j, P) -> LocalRep:
    faces = list(r.faces)
    faces[j] = faces[j].conjugated(P)
    return r.with_faces(faces)


def random_weights(n, rng, low=0.5, high=2.0):
    """Nonzero complex numbers with modulus in [low, high] and random phase."""
    modulus = rng.uniform(low, high, size=n)
    phase = rng.uniform(-np.pi, np.pi, size=n)
    return modulus * np.exp(1j * phase)


def random_rep(t: Triangulation, q: QParams, rng, max_dim=DEFAULT_MAX_DIM):
    """A local representation with random side weights and random load roots."""
    data = []
    for _ in range(t.face_count):
        w = random_weights(3, rng)
        h = principal_root(np.prod(w), q.N) * q.power(2 * int(rng.integers(q.N)))
        data.append((tuple(w), h))
    return local_rep(t, q, data, max_dim)


#################
# Fusion and isomorphisms
#################


def fuse_rep(r: LocalRep, fusion: Fusion) -> LocalRep:
    """The same face representations seen on the fused triangulation."""
    fused = fuse(r.triangulation, fusion.sides)
    return replace(r, triangulation=fused)


def fused_generator(r: LocalRep, pair) -> np.ndarray:
    """Dense image of the fused edge generator, computed in the split surface.

    For boundary edges (a, b) glued together this is the Weyl product
    q^(-sigma_ab) rho(X_a) rho(X_b).
    """
    a, b = pair
    sigma = sigma_matrix(r.triangulation)
    product = (r.generator(a) @ r.generator(b)).dense(r.max_dim)
    return r.q.power(-int(sigma[a, b])) * product


def transfer(r: LocalRep, target: Triangulation, alignment: Alignment) -> LocalRep:
    """Carry a representation along a labeled isomorphism of triangulations.

    Face j of the source becomes face alignment.face_map[j] of the target,
    rotated by alignment.rotations[j]; generator images are conjugated by
    factor_permutation(alignment.face_map).
    """
    faces = [None] * target.face_count
    for j, face in enumerate(r.faces):
        faces[alignment.face_map[j]] = face.rotated(alignment.rotations[j])
    return LocalRep(target, r.q, tuple(faces), r.max_dim)
