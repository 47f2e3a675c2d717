import pytest
from sympy.polys.domains import GF, QQ

from klr_lab.core.errors import PreconditionError
from klr_lab.services.algebra import (
    FiniteDimAlgebra, nullspace_of, rank_of, require_same_domain, same_span, span_contains,
)
from klr_lab.services.cyclotomic import center_compute, graded_dimension, trace_form_solve


def truncated_polynomials(r: int, domain=QQ) -> FiniteDimAlgebra:
    """k[x]/(x^r) with deg x = 2."""
    table = {(i, j): {i + j: 1} for i in range(r) for j in range(r) if i + j < r}
    return FiniteDimAlgebra.from_table(
        domain, [f"x^{i}" for i in range(r)], [2 * i for i in range(r)], table, {0: 1},
        {"x": {1: 1}} if r > 1 else {},
    )


def matrix_units() -> FiniteDimAlgebra:
    """M_2(k) on E11, E12, E21, E22."""
    units = [(0, 0), (0, 1), (1, 0), (1, 1)]
    table = {}
    for p, (i, j) in enumerate(units):
        for q, (k, l) in enumerate(units):
            if j == k:
                table[(p, q)] = {units.index((i, l)): 1}
    generators = {f"E{i + 1}{j + 1}": {p: 1} for p, (i, j) in enumerate(units)}
    return FiniteDimAlgebra.from_table(QQ, ["E11", "E12", "E21", "E22"], [0, 0, 0, 0], table, {0: 1, 3: 1}, generators)


def test_linear_algebra_helpers():
    rows = [[QQ(1), QQ(2), QQ(0)], [QQ(2), QQ(4), QQ(0)]]
    assert rank_of(rows, 3, QQ) == 1
    kernel = nullspace_of(rows, 3, QQ)
    assert len(kernel) == 2
    assert all(sum(a * b for a, b in zip(rows[0], v)) == 0 for v in kernel)
    assert span_contains(rows, [[QQ(3), QQ(6), QQ(0)]], 3, QQ)
    assert not span_contains(rows, [[QQ(0), QQ(0), QQ(1)]], 3, QQ)
    assert same_span(rows[:1], rows[1:], 3, QQ)


def test_nullspace_of_zero_rows_is_everything():
    assert len(nullspace_of([[QQ(0), QQ(0)]], 2, QQ)) == 2
    assert nullspace_of([], 0, QQ) == []


@pytest.mark.parametrize("r", [1, 2, 3, 5])
def test_truncated_polynomials(r):
    A = truncated_polynomials(r)
    assert A.is_unital()
    assert not A.associativity_failures()
    assert not A.grading_failures()
    assert len(center_compute(A)) == r
    assert A.cocenter_dimension() == r
    forms, flags = trace_form_solve(A, 2 * (r - 1))
    assert len(forms) == 1 and flags == [True]
    assert graded_dimension(A) == {2 * i: 1 for i in range(r)}


def test_truncated_polynomial_lower_trace_is_degenerate():
    A = truncated_polynomials(3)
    forms, flags = trace_form_solve(A, 2)
    assert len(forms) == 1 and flags == [False]


def test_annihilator():
    A = truncated_polynomials(3)
    x = A.basis_vector(1)
    annihilator = A.annihilator(x)
    assert len(annihilator) == 1
    assert span_contains(annihilator, [A.basis_vector(2)], 3, QQ)


def test_matrix_algebra():
    A = matrix_units()
    assert A.is_unital()
    assert not A.associativity_failures()
    assert len(A.center()) == 1
    assert A.is_central(A.unit)
    assert not A.is_central(A.basis_vector(0))
    assert A.cocenter_dimension() == 1
    forms, flags = trace_form_solve(A, 0)
    assert len(forms) == 1 and flags == [True]


def test_algebras_over_different_fields_do_not_mix():
    require_same_domain(truncated_polynomials(2), truncated_polynomials(3))
    with pytest.raises(PreconditionError):
        require_same_domain(truncated_polynomials(2), truncated_polynomials(2, GF(5)))
