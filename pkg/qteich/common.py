"""
    qteich.common
    ~~~~~~~~~~~~~

    Common functions, exceptions and tolerances.

    :copyright: 2020 by qteich Authors, see AUTHORS for more details.
    :license: BSD, see LICENSE for more details.
"""

import logging

import numpy as np

logger = logging.getLogger("qteich")

#: Relative tolerance for scalarity checks and algebra relations.
SCALAR_TOL = 1e-9

#: Relative tolerance for the intertwining identity.
INTERTWINE_TOL = 1e-8

#: Null-space extraction: smallest singular value must be below
#: NULLSPACE_SMALL * sigma_max, the next one above NULLSPACE_GAP * sigma_max.
NULLSPACE_SMALL = 1e-8
NULLSPACE_GAP = 1e-6

#: Off-scalar residual accepted for composites that should be scalar.
SCALAR_RESIDUAL_TOL = 1e-6

#: |1 + x| below SINGULAR_TOL * max(1, |x|) is a singular flip.
SINGULAR_TOL = 1e-12

#: |1 + x| below NEAR_SINGULAR_TOL * max(1, |x|) flags a flip as not generic.
NEAR_SINGULAR_TOL = 1e-6

#: Holonomy and weight round trips.
HOLONOMY_TOL = 1e-8

#: Total peripheral load relation.
LOAD_TOL = 1e-9

#: Largest dense matrix built for a local representation.
DEFAULT_MAX_DIM = 4096


class QteichError(Exception):
    """Base class of all errors raised by qteich.

    Parameters
    ----------
    message : str
    problems : list of str
        every individual issue found, when the check collects several.
    """

    exit_code = 1

    def __init__(self, message, problems=()):
        super().__init__(message)
        self.problems = list(problems)


class InputError(QteichError):
    """Malformed input: exit code 2."""

    exit_code = 2


class MalformedTriangulation(InputError):
    pass


class SchemaError(InputError):
    pass


class DomainError(QteichError):
    """Valid input on which the mathematics is undefined or inconsistent."""

    exit_code = 1


class SingularWeightError(DomainError):
    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class LoadMismatchError(DomainError):
    pass


class DimensionCapError(DomainError):
    pass


class ClassificationMismatch(DomainError):
    pass


class NullSpaceError(DomainError):
    pass


class GaugeInconsistent(DomainError):
    pass


class NotFixedPointError(DomainError):
    pass


class DegenerateDevelopment(DomainError):
    pass


class NonScalarError(DomainError):
    pass


class FlipError(DomainError):
    """A diagonal exchange that cannot be performed.

    `code` is one of "no-such-edge", "boundary-edge", "self-folded".
    """

    def __init__(self, message, code="invalid"):
        super().__init__(message)
        self.code = code


class AmbiguousEigenline(DomainError):
    pass


def relative_residual(a, b):
    """Frobenius distance between two arrays relative to the larger one.

    Parameters
    ----------
    a, b : array_like

    Returns
    -------
    float
    """
    a = np.asarray(a)
    b = np.asarray(b)
    scale = max(np.linalg.norm(a), np.linalg.norm(b), np.finfo(float).tiny)
    return float(np.linalg.norm(a - b) / scale)


def scalar_of(matrix, tol=SCALAR_TOL, what="matrix"):
    """Return c such that matrix = c Id, checking scalarity.

    Parameters
    ----------
    matrix : np.ndarray
        square matrix.
    tol : float
        relative tolerance on the off-scalar part.
    what : str
        used in the error message.

    Returns
    -------
    complex

    Raises
    ------
    NonScalarError
    """
    matrix = np.asarray(matrix)
    value = complex(matrix[0, 0])
    residual = off_scalar_residual(matrix)
    if residual > tol:
        raise NonScalarError(f"{what} is not scalar (residual {residual:.3e})")
    return value


def off_scalar_residual(matrix):
    """Distance of a matrix to the scalar multiples of the identity,
    relative to the mean diagonal.

    Parameters
    ----------
    matrix : np.ndarray

    Returns
    -------
    float
    """
    matrix = np.asarray(matrix)
    mean = np.trace(matrix) / matrix.shape[0]
    if abs(mean) == 0:
        return float("inf")
    deviation = matrix - mean * np.eye(matrix.shape[0])
    return float(np.linalg.norm(deviation) / (abs(mean) * np.sqrt(matrix.shape[0])))


def is_singular_factor(x, tol=SINGULAR_TOL):
    """True if 1 + x vanishes numerically."""
    return abs(1 + x) < tol * max(1.0, abs(x))


def complex_to_pair(z, digits=12):
    z = complex(z)
    return [round(z.real, digits) + 0.0, round(z.imag, digits) + 0.0]


def pair_to_complex(pair):
    """Read a complex number stored as [re, im] (a bare real is accepted).

    Parameters
    ----------
    pair : list or float

    Returns
    -------
    complex
    """
    if isinstance(pair, (int, float)):
        return complex(pair)
    if len(pair) != 2:
        raise SchemaError(f"complex numbers are stored as [re, im], got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))
