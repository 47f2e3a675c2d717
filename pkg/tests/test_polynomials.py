import pytest
from sympy.polys.domains import QQ

from klr_lab.core.errors import ConfigError, RewriteError
from klr_lab.services.polynomials import (
    demazure, degree_in, exact_quotient, exponents_below, exponents_of_weight, leading_coefficient_in,
    monomial, perm_action, polynomial_ring, scalar_domain, sorted_terms, swap_action, to_scalar,
)


@pytest.fixture
def ring3():
    return polynomial_ring(3)


def test_scalar_domain():
    assert scalar_domain("QQ") == QQ
    assert scalar_domain("GF", 5).mod == 5
    with pytest.raises(ConfigError):
        scalar_domain("GF", 4)
    with pytest.raises(ConfigError):
        scalar_domain("RR")


def test_to_scalar_reads_fraction_strings():
    assert to_scalar(QQ, "3/4") == QQ(3, 4)
    assert to_scalar(scalar_domain("GF", 5), "1/2") * 2 == 1


def test_demazure(ring3):
    x1, x2, x3 = ring3.gens
    assert demazure(x1 ** 2, 0) == -x1 - x2
    assert demazure(x1, 0) == -1
    assert demazure(x2, 0) == 1
    assert demazure(x1 * x2 + x3, 0) == 0
    assert demazure(x2 ** 3, 1) == -(x2 ** 2 + x2 * x3 + x3 ** 2)


def test_demazure_leibniz(ring3):
    x1, x2, x3 = ring3.gens
    f, g = x1 ** 2 * x3, x1 + 2 * x2
    assert demazure(f * g, 0) == demazure(f, 0) * g + swap_action(f, 0) * demazure(g, 0)


def test_perm_action(ring3):
    x1, x2, x3 = ring3.gens
    assert perm_action((1, 2, 0), x1 ** 2 * x3) == x2 ** 2 * x1
    assert swap_action(x1 ** 2 * x3, 1) == x1 ** 2 * x2


def test_exact_quotient(ring3):
    x1, x2, _ = ring3.gens
    assert exact_quotient(x1 ** 2 - x2 ** 2, x1 - x2) == x1 + x2
    with pytest.raises(RewriteError):
        exact_quotient(x1, x2)


def test_degrees_and_leading_coefficients(ring3):
    x1, x2, x3 = ring3.gens
    f = x1 * x3 ** 2 + x2 ** 3 + 5
    assert degree_in(f, 2) == 2
    assert degree_in(ring3.zero, 0) == -1
    assert leading_coefficient_in(f, 2) == x1


def test_antilex_leading_term(ring3):
    x1, x2, _ = ring3.gens
    terms = sorted_terms(x1 ** 3 + x2)
    assert terms[0][0] == (0, 1, 0)


def test_monomial_with_coefficient(ring3):
    assert monomial(ring3, (1, 0, 2), QQ(3)) == 3 * ring3.gens[0] * ring3.gens[2] ** 2


def test_exponent_enumerations():
    assert list(exponents_below((2, 1))) == [(0, 0), (1, 0)]
    assert list(exponents_below((2, 0))) == []
    assert set(exponents_of_weight([2, 2], 4)) == {(2, 0), (1, 1), (0, 2)}
    assert list(exponents_of_weight([2, 2], 3)) == []
