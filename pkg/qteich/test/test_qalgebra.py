import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qteich.common import InputError, SchemaError
from qteich.fixtures import load_fixture
from qteich.qalgebra import (
    QNumber,
    QParams,
    SkewMonomial,
    SkewPolynomial,
    central_element,
    embed,
    embed_generator,
    evaluate,
    inverse_monomial,
    multiply,
    multiply_monomials,
    parse,
    power,
    quantum_binomial_residual,
    split_sigma,
    weyl_ordered,
)
from qteich.representation import triangle_rep
from qteich.surface import sigma_matrix


@pytest.mark.parametrize("N,c", [(2, 1), (3, 1), (3, 5), (4, 1), (4, 3), (5, 3)])
def test_qparams_admissible(N, c):
    q = QParams(N, c)
    assert abs(q.q ** N - (-1) ** (N + 1)) < 1e-12
    q2 = q.power(2)
    assert all(abs(q2 ** k - 1) > 1e-9 for k in range(1, N))
    for k in range(-7, 8):
        assert abs(q.power(k) - q.q ** k) < 1e-12


@pytest.mark.parametrize("N,c", [(1, 1), (2, 2), (3, 3), (4, 2)])
def test_qparams_rejected(N, c):
    with pytest.raises(InputError):
        QParams(N, c)


def test_q_for_two():
    q = QParams(2)
    assert abs(q.q - (-1j)) < 1e-12
    assert abs(q.power(2) + 1) < 1e-12


@pytest.mark.parametrize("N", [2, 3, 4])
def test_reduce(N):
    q = QParams(N)
    for k in range(-3 * N, 3 * N):
        sign, r = q.reduce(k)
        assert 0 <= r < N
        assert abs(sign * q.power(r) - q.power(k)) < 1e-12


def test_qnumber_arithmetic():
    q = QParams(3)
    a = QNumber.make({0: 1, 1: 2}, q)
    b = QNumber.scalar(3, q, exponent=2)
    assert abs(a.add(b, q).value(q) - (a.value(q) + b.value(q))) < 1e-12
    assert abs(a.mul(b, q).value(q) - a.value(q) * b.value(q)) < 1e-12
    assert abs(a.shift(4, q).value(q) - a.value(q) * q.power(4)) < 1e-12
    assert QNumber.make({0: 1, 3: 1}, q).is_zero(q) is False
    # q^3 = 1 for N = 3, so 1 - q^3 vanishes exactly
    assert not QNumber.make({0: 1, 3: -1}, q)


def test_generators_commutation_triangle():
    q = QParams(3)
    sigma = sigma_matrix(load_fixture("triangle"))
    x1 = SkewPolynomial.generator(0, 3, q)
    x2 = SkewPolynomial.generator(1, 3, q)
    left = multiply(x1, x2, sigma, q)
    right = multiply(x2, x1, sigma, q)
    assert left == SkewPolynomial((((1, 1, 0), QNumber.scalar(1, q)),), 3)
    assert right == left.scale(1, q, exponent=-2)


def test_parse_reorders():
    q = QParams(3)
    sigma = sigma_matrix(load_fixture("triangle"))
    p = parse("X2 X1", 3, sigma, q)
    ((exponents, coef),) = p.terms
    assert exponents == (1, 1, 0)
    assert abs(coef.value(q) - q.power(-2)) < 1e-12


def test_parse_sums_and_coefficients():
    q = QParams(2)
    sigma = sigma_matrix(load_fixture("torus"))
    p = parse("q^-1 * X1 X2 X3 - (1+2j) X1^-1 + 2 X1^-1", 3, sigma, q)
    assert len(p.terms) == 2
    by_exp = dict(p.terms)
    assert abs(by_exp[(-1, 0, 0)].value(q) - (1 - 2j)) < 1e-12


@pytest.mark.parametrize("text", ["", "X4", "X1 +", "X1 ? X2", "(1+)"])
def test_parse_errors(text):
    q = QParams(3)
    sigma = sigma_matrix(load_fixture("triangle"))
    with pytest.raises(SchemaError):
        parse(text, 3, sigma, q)


@pytest.mark.parametrize("name,exponent", [("triangle", -1), ("torus", -2)])
def test_central_element_coefficient(name, exponent):
    q = QParams(3)
    sigma = sigma_matrix(load_fixture(name))
    h = central_element(sigma, q)
    assert h.exponents == (1, 1, 1)
    assert abs(h.coefficient.value(q) - q.power(exponent)) < 1e-12


@pytest.mark.parametrize("name", ["triangle", "square", "torus", "sphere4"])
def test_central_element_commutes(name):
    q = QParams(3)
    sigma = sigma_matrix(load_fixture(name))
    n = sigma.shape[0]
    h = SkewPolynomial.from_monomial(central_element(sigma, q))
    for i in range(n):
        x = SkewPolynomial.generator(i, n, q)
        assert multiply(h, x, sigma, q) == multiply(x, h, sigma, q)


def test_weyl_order_does_not_depend_on_order():
    q = QParams(5, 3)
    sigma = sigma_matrix(load_fixture("torus"))
    assert weyl_ordered([0, 1, 2], sigma, q) == weyl_ordered([2, 0, 1], sigma, q)
    assert weyl_ordered([1, 0, 1], sigma, q) == weyl_ordered([1, 1, 0], sigma, q)


def test_inverse_monomial():
    q = QParams(4, 3)
    sigma = sigma_matrix(load_fixture("torus"))
    m = multiply_monomials(
        SkewMonomial(QNumber.scalar(2, q, 1), (1, 2, 0)),
        SkewMonomial(QNumber.scalar(1, q), (0, 0, 1)),
        sigma,
        q,
    )
    inv = inverse_monomial(m, sigma, q)
    one = SkewMonomial(QNumber.scalar(1, q), (0, 0, 0))
    assert multiply_monomials(m, inv, sigma, q) == one
    assert multiply_monomials(inv, m, sigma, q) == one


def test_power():
    q = QParams(3)
    sigma = sigma_matrix(load_fixture("triangle"))
    x = SkewPolynomial.generator(0, 3, q)
    binomial = SkewPolynomial.generator(1, 3, q).add(x, q)
    assert power(x, 3, sigma, q) == SkewPolynomial.generator(0, 3, q, power=3)
    assert multiply(power(x, -2, sigma, q), power(x, 2, sigma, q), sigma, q) == SkewPolynomial.one(
        3, q
    )
    with pytest.raises(ZeroDivisionError):
        power(binomial, -1, sigma, q)


exponents = st.tuples(*[st.integers(-2, 2)] * 3)


@settings(max_examples=50, deadline=None)
@given(exponents, exponents, exponents)
def test_associativity(a, b, c):
    q = QParams(3)
    sigma = sigma_matrix(load_fixture("torus"))
    one = QNumber.scalar(1, q)
    ma, mb, mc = (SkewMonomial(one, e) for e in (a, b, c))
    left = multiply_monomials(multiply_monomials(ma, mb, sigma, q), mc, sigma, q)
    right = multiply_monomials(ma, multiply_monomials(mb, mc, sigma, q), sigma, q)
    assert left == right


def test_evaluate_is_multiplicative():
    q = QParams(3)
    sigma = sigma_matrix(load_fixture("triangle"))
    rep = triangle_rep(q, (1.3, 0.7 + 0.2j, 2.0))
    p = parse("X1 X2 + 2 X3", 3, sigma, q)
    p2 = parse("X2^2 - X1 X3", 3, sigma, q)
    product = multiply(p, p2, sigma, q)
    np.testing.assert_allclose(
        evaluate(product, rep.matrices, q),
        evaluate(p, rep.matrices, q) @ evaluate(p2, rep.matrices, q),
        atol=1e-10,
    )


def test_split_sigma():
    sigma = split_sigma(2)
    assert sigma.shape == (6, 6)
    assert sigma[0, 1] == sigma[1, 2] == sigma[2, 0] == 1
    assert sigma[3, 4] == 1
    assert sigma[0, 3] == 0


def test_embed_generator_two_faces():
    q = QParams(3)
    t = load_fixture("square")
    mono = embed_generator(t, 0, q)
    assert mono.exponents == (1, 0, 0, 1, 0, 0)
    assert abs(mono.coefficient.value(q) - 1) < 1e-12


def test_embed_is_homomorphism():
    q = QParams(3)
    t = load_fixture("torus")
    sigma = sigma_matrix(t)
    split = split_sigma(t.face_count)
    x1 = SkewPolynomial.generator(0, 3, q)
    x2 = SkewPolynomial.generator(1, 3, q)
    assert embed(t, multiply(x2, x1, sigma, q), q) == multiply(
        embed(t, x2, q), embed(t, x1, q), split, q
    )


def test_quantum_binomial():
    q = QParams(4, 1)
    rep = triangle_rep(q, (1.1, 0.9, 1.0))
    m1, m2 = rep.matrices[0], rep.matrices[1]
    assert quantum_binomial_residual(m2, m1, q) < 1e-9
    with pytest.raises(ValueError):
        quantum_binomial_residual(m1, m2, q)
