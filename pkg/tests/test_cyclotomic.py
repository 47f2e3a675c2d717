from fractions import Fraction

import pytest

from klr_lab.core.errors import PreconditionError
from klr_lab.services.cartan import d_lambda_beta, perturb_q
from klr_lab.services.cyclotomic import (
    annihilator_check, block_order, check_biweight_dimension, check_cap_formula, check_center,
    check_generators, check_ideal_basis, check_structure, check_trace, check_z_central, cyclotomic_reduce,
    is_special, nilhecke_basis, nilhecke_context, nilhecke_dimension, permutations_to, solving_pair,
)
from klr_lab.services.polynomials import scalar_domain
from klr_lab.services.symgroup import identity


@pytest.fixture
def level_one(a2, make_context):
    """A2, Lambda_1, alpha_1 + alpha_2: one-dimensional."""
    return make_context(a2, {1: 1}, {1: 1, 2: 1})


@pytest.fixture
def level_two(a2, make_context):
    """A2, Lambda_1 + Lambda_2, alpha_1 + alpha_2."""
    return make_context(a2, {1: 1, 2: 1}, {1: 1, 2: 1})


def test_special_sequences():
    assert is_special((1, 1, 2))
    assert is_special((2, 1))
    assert not is_special((1, 2, 1))
    assert block_order((2, 2, 1)) == (2, 1)
    with pytest.raises(PreconditionError):
        block_order((1, 2, 1))


def test_permutations_to():
    assert permutations_to((1, 1), (1, 1)) == [(0, 1), (1, 0)]
    assert permutations_to((1, 2), (2, 1)) == [(1, 0)]
    assert permutations_to((1, 2, 1), (1, 1, 2)) == [(0, 2, 1), (1, 2, 0)]


def test_generators_level_one(level_one):
    ctx = level_one
    x1, x2 = ctx.ring.gens
    assert ctx.g_generator((1, 2), 0, (1, 2)) == x1
    assert ctx.g_generator((1, 2), 1, (1, 2)) == x1 + x2
    assert ctx.g_generator((2, 1), 0, (1, 2)) == 1
    assert ctx.caps((1, 2), (1, 2)) == (1, 1)
    assert ctx.caps((1, 2), (2, 1)) == (1, 0)


def test_level_one_is_one_dimensional(level_one):
    ctx = level_one
    assert len(ctx.biweight_basis((1, 2), (1, 2))) == 1
    basis = ctx.full_basis()
    assert basis.elements == [(identity(2), (0, 0), (1, 2))]
    assert check_biweight_dimension(ctx, (1, 2), (1, 2)).status == "pass"


def test_level_two_basis(level_two, all_pass):
    ctx = level_two
    assert len(ctx.full_basis()) == 6
    assert ctx.full_basis_mf() is ctx.full_basis()
    all_pass([check_generators(ctx), check_cap_formula(ctx), check_ideal_basis(ctx)])
    for nu in ctx.klr.sequences:
        for target in ctx.special_targets():
            all_pass([check_biweight_dimension(ctx, nu, target)])


def test_reduction_lands_in_basis(level_two):
    ctx = level_two
    x1, x2 = ctx.ring.gens
    e = ctx.klr.idempotent((1, 2))
    # x1 e(1,2) is zero in the quotient, and x2^2 e(1,2) = -x1 x2 e(1,2) = 0
    assert not ctx.reduce(ctx.klr.x(0) * e)
    assert not ctx.reduce(ctx.klr.polynomial(x2 ** 2) * e)
    assert cyclotomic_reduce(ctx, ctx.klr.x(1) * e) == {(identity(2), (0, 1), (1, 2)): 1}


def test_structure_constants(level_two, all_pass):
    ctx = level_two
    A = ctx.structure_constants()
    assert A.dim == 6
    assert min(A.degrees) >= 0
    all_pass(check_structure(ctx, A))
    all_pass([check_z_central(ctx, A)])


def test_center_and_trace(level_two, all_pass):
    ctx = level_two
    reports, dim_center, dim_sym = check_center(ctx)
    all_pass(reports)
    assert dim_center == dim_sym == 3
    trace = check_trace(ctx)
    all_pass(trace)
    assert {r.claim for r in trace} == {"symmetrizing-form", "top-degree"}


def test_annihilator_and_trace_identity(level_one, all_pass):
    reports = annihilator_check(level_one, 1)
    assert [r.claim for r in reports] == ["annihilator-equals-kernel", "trace-identity"]
    all_pass(reports)
    assert "c" in reports[1].witness


def test_trace_identity_needs_one_pair_with_both_forms():
    # each solution alone has a zero part; their sum does not
    assert solving_pair([[1, 0, 0], [0, 2, 0]], 1) == [1, 2, 0]
    assert solving_pair([[1, 3, 0]], 1) == [1, 3, 0]
    assert solving_pair([[1, 0, 0]], 1) is None
    assert solving_pair([], 1) is None


def test_annihilator_of_a_dot(a1, make_context, all_pass):
    # k[x]/(x^2) over k[x]/(x): Ann(x) = (x) = Ker(p)
    annihilator, trace = annihilator_check(make_context(a1, {1: 1}, {1: 1}), 1)
    all_pass([annihilator, trace])
    assert annihilator.witness["dim_annihilator"] == annihilator.witness["dim_kernel"] == 1
    assert annihilator.witness["dim_raised"] == 2
    assert trace.witness["c"] == "1"


def test_annihilator_of_an_absent_label(a2, make_context, all_pass):
    # z(1, alpha_2) = 1 and the projection is an isomorphism
    reports = annihilator_check(make_context(a2, {2: 1}, {2: 1}), 1)
    all_pass(reports)
    assert reports[0].witness["dim_annihilator"] == reports[0].witness["dim_kernel"] == 0
    assert reports[1].witness["c"] == "1"


def test_zero_quotient(a2, make_context):
    ctx = make_context(a2, {}, {1: 1, 2: 1})
    assert len(ctx.full_basis()) == 0
    assert check_trace(ctx)[0].status == "info"


@pytest.mark.parametrize("l, n, size", [(2, 2, 4), (3, 2, 12), (3, 3, 36), (1, 2, 0), (2, 1, 2)])
def test_nilhecke_dimension(l, n, size):
    assert nilhecke_dimension(l, n) == size
    assert len(nilhecke_basis(l, n)) == size


def test_nilhecke_caps():
    ctx = nilhecke_context(3, 3)
    assert ctx.caps((1, 1, 1), (1, 1, 1)) == (3, 2, 1)


def test_nilhecke_over_prime_field(all_pass):
    ctx = nilhecke_context(2, 2, scalar_domain("GF", 5))
    assert len(ctx.full_basis()) == 4
    all_pass(check_structure(ctx))


def test_nilhecke_is_a_matrix_algebra(all_pass):
    ctx = nilhecke_context(2, 2)
    reports, dim_center, dim_sym = check_center(ctx)
    all_pass(reports)
    assert dim_center == dim_sym == 1
    trace = check_trace(ctx)
    all_pass(trace)
    # crossings have negative degree here, so the top degree is only recorded
    assert [r.status for r in trace] == ["pass", "info"]


def test_perturbed_q(a2, make_context, all_pass):
    ctx = make_context(perturb_q(a2, Fraction(2)), {1: 1, 2: 1}, {1: 1, 2: 1})
    assert len(ctx.full_basis()) == 6
    all_pass(check_structure(ctx))
    reports, dim_center, dim_sym = check_center(ctx)
    all_pass(reports)


def test_graded_oracle_needs_pure_power(make_context):
    from klr_lab.services.cartan import CartanDatum

    datum = CartanDatum(labels=(1,), matrix=((2,),), symmetrizers=(1,), a_coeffs={1: {0: Fraction(1)}})
    ctx = make_context(datum, {1: 2}, {1: 1}, target=(1,))
    with pytest.raises(PreconditionError):
        ctx.graded_oracle((1,))


def test_general_cyclotomic_polynomial(make_context):
    from klr_lab.services.cartan import CartanDatum

    datum = CartanDatum(labels=(1,), matrix=((2,),), symmetrizers=(1,), a_coeffs={1: {0: Fraction(-1)}})
    ctx = make_context(datum, {1: 2}, {1: 1})
    (x1,) = ctx.ring.gens
    # x^2 = 1 in k[x]/(x^2 - 1)
    assert ctx.reduce(ctx.klr.polynomial(x1 ** 2)) == {(identity(1), (0,), (1,)): 1}


def test_full_quotient_needs_blocks(a2, make_context):
    ctx = make_context(a2, {1: 1}, {1: 2, 2: 1})
    with pytest.raises(PreconditionError):
        ctx.full_basis()
    with pytest.raises(PreconditionError):
        nilhecke_context(2, 2).full_basis_mf()


def test_non_special_target(a2, make_context):
    with pytest.raises(PreconditionError):
        make_context(a2, {1: 2}, {1: 2, 2: 1}, target=(1, 2, 1))


@pytest.mark.slow
def test_a3_multiplicity_free(a3, make_context, all_pass):
    ctx = make_context(a3, {1: 1, 3: 1}, {1: 1, 2: 1, 3: 1})
    all_pass([check_cap_formula(ctx), check_generators(ctx)])
    all_pass(check_structure(ctx))
    reports, dim_center, dim_sym = check_center(ctx)
    all_pass(reports)


def test_oracle_scans_up_to_the_trace_degree(level_two):
    ctx = level_two
    d = d_lambda_beta(ctx.datum, ctx.lam, ctx.beta)
    for nu in ctx.klr.sequences:
        for target in ctx.special_targets():
            assert d in ctx.oracle_degrees(nu, target)


@pytest.mark.slow
@pytest.mark.parametrize("lam", [{1: 1, 2: 1}, {1: 2, 2: 2}])
def test_b2_center_and_annihilator(b2, make_context, all_pass, lam):
    ctx = make_context(b2, lam, {1: 1, 2: 1})
    reports, dim_center, dim_sym = check_center(ctx)
    all_pass(reports)
    all_pass(check_trace(ctx))
    for i in (1, 2):
        annihilator, trace = annihilator_check(ctx, i)
        all_pass([annihilator, trace])
        assert "c" in trace.witness


@pytest.mark.slow
def test_a3_annihilator(a3, make_context, all_pass):
    ctx = make_context(a3, {1: 1, 3: 1}, {1: 1, 2: 1, 3: 1})
    all_pass(annihilator_check(ctx, 2))
