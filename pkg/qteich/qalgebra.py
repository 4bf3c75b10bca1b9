"""
    qteich.qalgebra
    ~~~~~~~~~~~~~~~

    Skew-Laurent polynomials in generators X_1 ... X_n subject to
    X_i X_j = q^(2 sigma_ij) X_j X_i, with q a root of unity.

    Coefficients are combinations of powers of q kept exactly: a QNumber maps
    a q-exponent (reduced mod N using q^N = (-1)^(N+1)) to a complex number.

    :copyright: 2020 by qteich Authors, see AUTHORS for more details.
    :license: BSD, see LICENSE for more details.
"""

import functools
import math
import re
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from .common import SCALAR_TOL, InputError, SchemaError, relative_residual

#: Numerical check on the admissibility of q.
Q_CHECK_TOL = 1e-12


@dataclass(frozen=True)
class QParams:
    """The root of unity q = -exp(i pi c / N).

    Parameters
    ----------
    N : int
        at least 2.
    c : int
        odd and coprime to N.
    """

    N: int
    c: int = 1

    def __post_init__(self):
        problems = []
        if self.N < 2:
            problems.append(f"N must be at least 2, got {self.N}")
        if self.c % 2 == 0:
            problems.append(f"c must be odd, got {self.c}")
        if self.N >= 2 and math.gcd(self.c, self.N) != 1:
            problems.append(f"c = {self.c} is not coprime to N = {self.N}")
        if problems:
            raise InputError("Inadmissible root of unity", problems)

        q = self.q
        if abs(q ** self.N - (-1) ** (self.N + 1)) > Q_CHECK_TOL:
            raise InputError(f"q^N != (-1)^(N+1) for N={self.N}, c={self.c}")
        q2 = q * q
        powers = [q2 ** k for k in range(1, self.N)]
        if any(abs(p - 1) < Q_CHECK_TOL for p in powers):
            raise InputError(f"q^2 is not a primitive {self.N}-th root of unity")

    @property
    def q(self) -> complex:
        return complex(-np.exp(1j * np.pi * self.c / self.N))

    @functools.cached_property
    def _table(self):
        # q = exp(i pi (c + N) / N), so q^k depends on k mod 2N only.
        k = np.arange(2 * self.N)
        return np.exp(1j * np.pi * k * (self.c + self.N) / self.N)

    def power(self, k) -> complex:
        """q^k, read from a table of exact angles."""
        return complex(self._table[int(k) % (2 * self.N)])

    def reduce(self, k):
        """Write q^k as sign * q^r with 0 <= r < N."""
        k = int(k) % (2 * self.N)
        if k < self.N:
            return 1, k
        return (-1) ** (self.N + 1), k - self.N

    def to_dict(self):
        return {"N": self.N, "c": self.c}


#################
# Coefficients
#################


@dataclass(frozen=True)
class QNumber:
    """A finite sum of complex multiples of powers of q.

    Terms are stored as sorted (exponent, coefficient) pairs with
    0 <= exponent < N.
    """

    terms: Tuple[Tuple[int, complex], ...]

    @classmethod
    def make(cls, mapping: Dict[int, complex], q: QParams):
        reduced = {}
        for k, value in mapping.items():
            sign, r = q.reduce(k)
            reduced[r] = reduced.get(r, 0) + sign * complex(value)
        return cls(tuple(sorted((k, v) for k, v in reduced.items() if v != 0)))

    @classmethod
    def scalar(cls, value, q: QParams, exponent=0):
        return cls.make({exponent: value}, q)

    def __bool__(self):
        return bool(self.terms)

    def add(self, other, q):
        out = dict(self.terms)
        for k, v in other.terms:
            out[k] = out.get(k, 0) + v
        return QNumber.make(out, q)

    def mul(self, other, q):
        out = {}
        for k1, v1 in self.terms:
            for k2, v2 in other.terms:
                out[k1 + k2] = out.get(k1 + k2, 0) + v1 * v2
        return QNumber.make(out, q)

    def shift(self, exponent, q):
        """Multiply by q^exponent."""
        return QNumber.make({k + exponent: v for k, v in self.terms}, q)

    def value(self, q: QParams) -> complex:
        return sum((v * q.power(k) for k, v in self.terms), 0j)

    def is_zero(self, q: QParams):
        if not self.terms:
            return True
        scale = max(abs(v) for _, v in self.terms)
        return abs(self.value(q)) <= 1e-13 * scale

    def __str__(self):
        parts = []
        for k, v in self.terms:
            coef = _format_number(v)
            if k == 0:
                parts.append(coef)
            elif coef == "1":
                parts.append(f"q^{k}")
            else:
                parts.append(f"{coef}*q^{k}")
        return " + ".join(parts) if parts else "0"


def _format_number(v):
    v = complex(v)
    if v.imag == 0:
        real = v.real
        return str(int(real)) if real == int(real) else repr(real)
    return repr(v)


#################
# Monomials and polynomials
#################


@dataclass(frozen=True)
class SkewMonomial:
    """coefficient * X_1^e_1 X_2^e_2 ... X_n^e_n, variables in index order."""

    coefficient: QNumber
    exponents: Tuple[int, ...]


@dataclass(frozen=True)
class SkewPolynomial:
    """Sum of monomials with distinct exponent vectors, sorted and nonzero.

    Parameters
    ----------
    terms : tuple of (exponents, QNumber)
    n : int
        number of generators.
    """

    terms: Tuple[Tuple[Tuple[int, ...], QNumber], ...]
    n: int

    @classmethod
    def make(cls, mapping, n, q):
        terms = []
        for exponents, coef in sorted(mapping.items()):
            if len(exponents) != n:
                raise ValueError(f"exponent vector {exponents} has not {n} entries")
            if not coef.is_zero(q):
                terms.append((tuple(exponents), coef))
        return cls(tuple(terms), n)

    @classmethod
    def one(cls, n, q):
        return cls(((tuple([0] * n), QNumber.scalar(1, q)),), n)

    @classmethod
    def generator(cls, i, n, q, power=1):
        exponents = [0] * n
        exponents[i] = power
        return cls(((tuple(exponents), QNumber.scalar(1, q)),), n)

    @classmethod
    def from_monomial(cls, monomial: SkewMonomial):
        return cls(((monomial.exponents, monomial.coefficient),), len(monomial.exponents))

    def monomials(self):
        return [SkewMonomial(coef, exponents) for exponents, coef in self.terms]

    def add(self, other, q):
        out = dict(self.terms)
        for exponents, coef in other.terms:
            out[exponents] = out[exponents].add(coef, q) if exponents in out else coef
        return SkewPolynomial.make(out, self.n, q)

    def scale(self, value, q, exponent=0):
        factor = QNumber.scalar(value, q, exponent)
        return SkewPolynomial.make(
            {e: c.mul(factor, q) for e, c in self.terms}, self.n, q
        )

    def format(self, names=None):
        if not self.terms:
            return "0"
        names = names or [f"X{i + 1}" for i in range(self.n)]
        parts = []
        for exponents, coef in self.terms:
            factors = []
            for name, e in zip(names, exponents):
                if e == 1:
                    factors.append(name)
                elif e:
                    factors.append(f"{name}^{e}")
            mono = " ".join(factors)
            coef_str = str(coef)
            if not mono:
                parts.append(f"({coef_str})")
            elif coef_str == "1":
                parts.append(mono)
            else:
                parts.append(f"({coef_str}) {mono}")
        return " + ".join(parts)


def reorder_exponent(sigma, left, right):
    """Power of q produced when normal-ordering X^left X^right.

    X^e X^f = q^(2 sum_{i>j} sigma_ij e_i f_j) X^(e+f).
    """
    e = np.asarray(left, dtype=int)
    f = np.asarray(right, dtype=int)
    return int(2 * np.sum(np.tril(np.asarray(sigma), -1) * np.outer(e, f)))


def multiply_monomials(a: SkewMonomial, b: SkewMonomial, sigma, q: QParams):
    shift = reorder_exponent(sigma, a.exponents, b.exponents)
    exponents = tuple(x + y for x, y in zip(a.exponents, b.exponents))
    return SkewMonomial(a.coefficient.mul(b.coefficient, q).shift(shift, q), exponents)


def inverse_monomial(m: SkewMonomial, sigma, q: QParams):
    """Two-sided inverse of an invertible monomial.

    Raises
    ------
    ZeroDivisionError
        if the coefficient is not a single power of q.
    """
    if len(m.coefficient.terms) != 1:
        raise ZeroDivisionError("only monomials with a single q-power coefficient are inverted")
    (k, v), = m.coefficient.terms
    negated = tuple(-e for e in m.exponents)
    shift = reorder_exponent(sigma, m.exponents, negated)
    return SkewMonomial(QNumber.scalar(1 / v, q, -k - shift), negated)


def multiply(p: SkewPolynomial, p2: SkewPolynomial, sigma, q: QParams) -> SkewPolynomial:
    """Normal-form product of two skew polynomials.

    Parameters
    ----------
    p, p2 : SkewPolynomial
    sigma : np.ndarray
        antisymmetric (n, n) integer matrix.
    q : QParams

    Returns
    -------
    SkewPolynomial
    """
    if p.n != p2.n:
        raise ValueError("polynomials live in different algebras")
    out = {}
    for e1, c1 in p.terms:
        for e2, c2 in p2.terms:
            mono = multiply_monomials(SkewMonomial(c1, e1), SkewMonomial(c2, e2), sigma, q)
            if mono.exponents in out:
                out[mono.exponents] = out[mono.exponents].add(mono.coefficient, q)
            else:
                out[mono.exponents] = mono.coefficient
    return SkewPolynomial.make(out, p.n, q)


def power(p: SkewPolynomial, k: int, sigma, q: QParams) -> SkewPolynomial:
    """k-th power; negative powers only for single monomials."""
    if k < 0:
        if len(p.terms) != 1:
            raise ZeroDivisionError("only monomials can be raised to negative powers")
        mono = inverse_monomial(p.monomials()[0], sigma, q)
        p, k = SkewPolynomial.from_monomial(mono), -k
    out = SkewPolynomial.one(p.n, q)
    for _ in range(k):
        out = multiply(out, p, sigma, q)
    return out


def weyl_ordered(indices: Sequence[int], sigma, q: QParams, n=None) -> SkewMonomial:
    """Weyl-ordered product of generators.

    The product X_{i_1} ... X_{i_k} taken in the given order and multiplied by
    q^(-sum_{a<b} sigma_{i_a i_b}); the result does not depend on the order.

    Parameters
    ----------
    indices : sequence of int
        generator indices, repetitions allowed.
    sigma : np.ndarray
    q : QParams
    n : int, optional
        number of generators (defaults to the size of sigma).

    Returns
    -------
    SkewMonomial
    """
    sigma = np.asarray(sigma)
    n = sigma.shape[0] if n is None else n
    mono = SkewMonomial(QNumber.scalar(1, q), tuple([0] * n))
    prefactor = 0
    for a, i in enumerate(indices):
        gen = [0] * n
        gen[i] = 1
        mono = multiply_monomials(mono, SkewMonomial(QNumber.scalar(1, q), tuple(gen)), sigma, q)
        prefactor -= sum(int(sigma[j, i]) for j in indices[:a])
    return SkewMonomial(mono.coefficient.shift(prefactor, q), mono.exponents)


def central_element(sigma, q: QParams) -> SkewMonomial:
    """The principal central element H, Weyl-ordered product of all generators."""
    n = np.asarray(sigma).shape[0]
    return weyl_ordered(list(range(n)), sigma, q)


#################
# Split algebra and embedding
#################


def split_sigma(face_count):
    """Sigma matrix of the tensor product of triangle algebras.

    Generator 3 j + s is the side s of face j; within a face the side in slot
    s q-commutes with the one in slot s + 1 with exponent 2.
    """
    size = 3 * face_count
    sigma = np.zeros((size, size), dtype=int)
    for j in range(face_count):
        for s in range(3):
            a, b = 3 * j + s, 3 * j + (s + 1) % 3
            sigma[a, b] += 1
            sigma[b, a] -= 1
    return sigma


def embed_generator(t, edge, q: QParams) -> SkewMonomial:
    """Image of X_edge in the split algebra: the Weyl product of its sides.

    For sides on two distinct faces this is X_{j s} X_{k r}; for a
    self-folded edge on face j it is q^-1 X_{j s} X_{j s+1}.
    """
    sides = sorted(t.sides_of(edge))
    if len(sides) == 2 and sides[0][0] == sides[1][0]:
        (j, s1), (_, s2) = sides
        if (s1 + 1) % 3 != s2:
            s1, s2 = s2, s1
        sides = [(j, s1), (j, s2)]
    sigma = split_sigma(t.face_count)
    return weyl_ordered([3 * j + s for j, s in sides], sigma, q)


def embed(t, p: SkewPolynomial, q: QParams) -> SkewPolynomial:
    """Image of a polynomial under the embedding into the split algebra.

    Parameters
    ----------
    t : Triangulation
    p : SkewPolynomial
        polynomial in the edge generators of t.
    q : QParams

    Returns
    -------
    SkewPolynomial
        polynomial in the 3 m face-side generators.
    """
    sigma = split_sigma(t.face_count)
    size = 3 * t.face_count
    images = [
        SkewPolynomial.from_monomial(embed_generator(t, i, q)) for i in range(t.edge_count)
    ]
    out = SkewPolynomial.make({}, size, q)
    for exponents, coef in p.terms:
        term = SkewPolynomial(((tuple([0] * size), coef),), size)
        for i, e in enumerate(exponents):
            if e:
                term = multiply(term, power(images[i], e, sigma, q), sigma, q)
        out = out.add(term, q)
    return out


#################
# Evaluation
#################


def evaluate(p: SkewPolynomial, generators, q: QParams) -> np.ndarray:
    """Evaluate a polynomial on matrices, reading monomials in index order.

    Parameters
    ----------
    p : SkewPolynomial
    generators : sequence of np.ndarray
        matrix of each generator.
    q : QParams

    Returns
    -------
    np.ndarray
    """
    dim = generators[0].shape[0]
    out = np.zeros((dim, dim), dtype=complex)
    for exponents, coef in p.terms:
        term = coef.value(q) * np.eye(dim, dtype=complex)
        for gen, e in zip(generators, exponents):
            if e:
                term = term @ np.linalg.matrix_power(gen, e)
        out += term
    return out


def quantum_binomial_residual(a, b, q: QParams, tol=SCALAR_TOL):
    """Check (A + B)^N = A^N + B^N for B A = q^2 A B.

    Returns
    -------
    float
        relative residual of the binomial identity.

    Raises
    ------
    ValueError
        if the pair does not q-commute.
    """
    q2 = q.power(2)
    if relative_residual(b @ a, q2 * (a @ b)) > tol:
        raise ValueError("matrices do not satisfy B A = q^2 A B")
    lhs = np.linalg.matrix_power(a + b, q.N)
    rhs = np.linalg.matrix_power(a, q.N) + np.linalg.matrix_power(b, q.N)
    return relative_residual(lhs, rhs)


#################
# Literals
#################

_TOKEN = re.compile(
    r"\s*(?:(?P<gen>X(?P<idx>\d+)(?:\^(?P<gexp>-?\d+))?)"
    r"|(?P<q>q(?:\^(?P<qexp>-?\d+))?)"
    r"|\((?P<cplx>[^)]*)\)"
    r"|(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?j?)"
    r"|(?P<op>[-+*]))"
)


def parse(text: str, n: int, sigma, q: QParams) -> SkewPolynomial:
    """Parse a polynomial literal such as "q^-1 * X1 X2 X3 - (1+2j) X1^-1".

    Factors of a term are multiplied left to right before normalization.
    Generators are 1-based.

    Raises
    ------
    SchemaError
        on a syntax error or an out of range generator.
    """
    text = text.strip()
    if not text:
        raise SchemaError("empty polynomial")

    pos = 0
    terms = []
    current = []
    sign = 1
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match or match.end() == pos:
            raise SchemaError(f"cannot parse polynomial at {text[pos:]!r}")
        pos = match.end()
        op = match.group("op")
        if op in ("+", "-"):
            if current:
                terms.append((sign, current))
                current = []
                sign = 1
            if op == "-":
                sign = -sign
        elif op == "*":
            continue
        elif match.group("gen"):
            idx = int(match.group("idx")) - 1
            if not 0 <= idx < n:
                raise SchemaError(f"generator X{idx + 1} out of range 1..{n}")
            current.append(SkewPolynomial.generator(idx, n, q, int(match.group("gexp") or 1)))
        elif match.group("q"):
            current.append(SkewPolynomial.one(n, q).scale(1, q, int(match.group("qexp") or 1)))
        else:
            literal = match.group("cplx") if match.group("cplx") is not None else match.group("num")
            try:
                value = complex(literal.replace(" ", ""))
            except ValueError:
                raise SchemaError(f"invalid number {literal!r}")
            current.append(SkewPolynomial.one(n, q).scale(value, q))

    if not current:
        raise SchemaError("polynomial ends with an operator")
    terms.append((sign, current))

    out = SkewPolynomial.make({}, n, q)
    for sign, factors in terms:
        term = SkewPolynomial.one(n, q)
        for factor in factors:
            term = multiply(term, factor, sigma, q)
        out = out.add(term.scale(sign, q), q)
    return out
