"""
    qteich.transport
    ~~~~~~~~~~~~~~~~

    Edge weights and their change under diagonal exchanges.

    :copyright: 2020 by qteich Authors, see AUTHORS for more details.
    :license: BSD, see LICENSE for more details.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .common import (
    NEAR_SINGULAR_TOL,
    SINGULAR_TOL,
    InputError,
    SingularWeightError,
    is_singular_factor,
    logger,
)
from .surface import FlipMove, Puncture, Triangulation, flip, flip_move, sigma_matrix


@dataclass(frozen=True)
class EdgeWeights:
    """One nonzero complex weight per edge."""

    values: Tuple[complex, ...]

    def __post_init__(self):
        zeros = [i + 1 for i, v in enumerate(self.values) if v == 0]
        if zeros:
            raise InputError(f"edge weights must be nonzero (edges {zeros})")

    @classmethod
    def of(cls, values):
        return cls(tuple(complex(v) for v in values))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def as_array(self):
        return np.asarray(self.values, dtype=complex)

    def relabeled(self, perm):
        """Weights seen after renaming edge i to perm[i]."""
        out = [None] * len(self.values)
        for i, v in enumerate(self.values):
            out[perm[i]] = v
        return EdgeWeights(tuple(out))


@dataclass(frozen=True)
class StepReport:
    """One flip of a transport; generic is False when 1 + x is nearly zero."""

    step: int
    edge: int
    diagonal: complex
    distance: float
    generic: bool


@dataclass(frozen=True)
class TransportResult:
    triangulation: Triangulation
    weights: EdgeWeights
    steps: Tuple[StepReport, ...]


def check_generic(x_diagonal, tol=SINGULAR_TOL, step=None):
    """Distance of the diagonal weight to the singular value -1.

    Raises
    ------
    SingularWeightError
    """
    if is_singular_factor(x_diagonal, tol):
        where = "" if step is None else f" at step {step + 1}"
        raise SingularWeightError(
            f"diagonal weight {x_diagonal} makes the flip singular{where}", step=step
        )
    return abs(1 + x_diagonal)


def flip_weights(x: EdgeWeights, move: FlipMove, tol=SINGULAR_TOL) -> EdgeWeights:
    """Weights after the diagonal exchange described by move.

    The diagonal weight is inverted; the sides in positions lambda2 and
    lambda4 are multiplied by 1 + x and those in lambda3 and lambda5 by
    (1 + 1/x)^-1. A side occupying two positions takes both factors.

    Parameters
    ----------
    x : EdgeWeights
    move : FlipMove

    Returns
    -------
    EdgeWeights

    Raises
    ------
    SingularWeightError
        if the diagonal weight is -1.
    """
    d = move.edge
    xd = x[d]
    check_generic(xd, tol)
    out = list(x.values)
    for position in move.plus_positions:
        out[move.positions[position]] *= 1 + xd
    for position in move.inverse_positions:
        out[move.positions[position]] /= 1 + 1 / xd
    out[d] = 1 / xd
    return EdgeWeights(tuple(out))


def flip_weights_sigma(t: Triangulation, x: EdgeWeights, edge) -> EdgeWeights:
    """Same change written with the sigma matrix.

    x_k' = x_k (1 + x_d^(-sgn sigma_dk))^(-sigma_dk) for k != d.
    """
    sigma = sigma_matrix(t)
    xd = x[edge]
    check_generic(xd)
    out = []
    for k, v in enumerate(x.values):
        if k == edge:
            out.append(1 / xd)
            continue
        s = int(sigma[edge, k])
        out.append(v * (1 + xd ** (-np.sign(s))) ** (-s) if s else v)
    return EdgeWeights(tuple(out))


def transport(t: Triangulation, x: EdgeWeights, path, tol=SINGULAR_TOL) -> TransportResult:
    """Apply flip_weights along a flip sequence.

    Parameters
    ----------
    t : Triangulation
    x : EdgeWeights
    path : sequence of int
        edges to flip, left to right.

    Returns
    -------
    TransportResult

    Raises
    ------
    SingularWeightError
        reporting the index of the failing step.
    """
    if len(x) != t.edge_count:
        raise InputError(f"{len(x)} weights for {t.edge_count} edges")
    steps = []
    current = t
    for step, edge in enumerate(path):
        move = flip_move(current, edge)
        xd = x[edge]
        distance = check_generic(xd, tol, step)
        generic = not is_singular_factor(xd, NEAR_SINGULAR_TOL)
        if not generic:
            logger.warning(f"Step {step + 1}: flip of edge {edge + 1} is nearly singular")
        steps.append(StepReport(step, edge, xd, distance, generic))
        x = flip_weights(x, move, tol)
        current, _ = flip(current, edge)
        logger.debug(f"Step {step + 1}: flipped edge {edge + 1}")
    return TransportResult(current, x, tuple(steps))


def peripheral_load(x: EdgeWeights) -> complex:
    """Total peripheral load, the product of all edge weights."""
    return complex(np.prod(x.as_array()))


def puncture_eigenvalue_sq(x: EdgeWeights, puncture: Puncture) -> complex:
    """a^2 = 1 / (product of the weights of the edge ends at the puncture)."""
    return complex(1 / np.prod([x[e] for e in puncture.edges]))
