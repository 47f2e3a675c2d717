import itertools
from fractions import Fraction

import pytest

from klr_lab.core.errors import PreconditionError
from klr_lab.services.cartan import DominantWeight, RootElement, cartan_preset, perturb_q
from klr_lab.services.klr import KLRAlgebra
from klr_lab.services.symgroup import from_word, identity


@pytest.fixture
def a2_pair(a2, make_algebra):
    return make_algebra(a2, {1: 1, 2: 1})


@pytest.fixture
def nilhecke2(a1, make_algebra):
    return make_algebra(a1, {1: 2})


def test_crossing_square_is_q(a2_pair):
    R = a2_pair
    x1, x2 = R.ring.gens
    assert R.tau(0) * R.tau(0) == R.polynomial(x1 + x2)


def test_nilhecke_relations(nilhecke2):
    R = nilhecke2
    e = R.idempotent((1, 1))
    assert not R.tau(0) * R.tau(0)
    assert R.x(0) * R.tau(0) == R.tau(0) * R.x(1) - e
    assert R.x(1) * R.tau(0) == R.tau(0) * R.x(0) + e


def test_idempotents(a2_pair):
    R = a2_pair
    e12, e21 = R.idempotent((1, 2)), R.idempotent((2, 1))
    assert e12 * e12 == e12
    assert not e12 * e21
    assert e12 + e21 == R.one()
    assert R.tau(0) * e12 == e21 * R.tau(0)


def test_braid_correction(a2, make_algebra):
    R = make_algebra(a2, {1: 2, 2: 1})
    x1, _, x3 = R.ring.gens
    nu = (1, 2, 1)
    t1, t2 = R.tau(0), R.tau(1)
    lhs = (t2 * t1 * t2 - t1 * t2 * t1) * R.idempotent(nu)
    # (Q_{1,2}(x1, x2) - Q_{1,2}(x3, x2)) / (x1 - x3) = 1 for Q = u + v
    assert R.braid_correction(nu, 0) == 1
    assert lhs == R.idempotent(nu)
    assert not (t2 * t1 * t2 - t1 * t2 * t1) * R.idempotent((1, 1, 2))


def test_degrees(a1, a2_pair, nilhecke2):
    R = a2_pair
    assert R.tau(0, (1, 2)).degree == 1
    assert R.x(0).degree == 2
    assert nilhecke2.tau(0).degree == -2
    assert R.zero().degree is None
    assert (R.x(0) + R.idempotent((1, 2))).degree is None


def test_basis_element_and_word_product(a3, make_algebra):
    R = make_algebra(a3, {1: 1, 2: 1, 3: 1})
    w = from_word((0, 1, 0), 3)
    assert R.word_product((0, 1, 0), (1, 2, 3)) == R.basis_element(w, (0, 0, 0), (1, 2, 3))
    assert R.basis_element(identity(3), (1, 0, 0), (1, 2, 3)) == R.x(0, (1, 2, 3))


def test_q_u_nu_for_interval_cycle(a3, make_algebra):
    R = make_algebra(a3, {1: 1, 2: 1, 3: 1})
    x1, x2, x3 = R.ring.gens
    u = from_word((0, 1), 3)
    # inversions of s1 s2 are (1, 3) and (2, 3)
    assert R.q_u_nu(u, (1, 2, 3)) == R.q_pair(1, 3, 0, 2) * R.q_pair(2, 3, 1, 2)
    assert R.q_u_nu(u, (1, 2, 3)) == x2 + x3


def test_z_elements_are_central(a2_pair, nilhecke2):
    for R in (a2_pair, nilhecke2):
        generators = [R.tau(k) for k in range(R.n - 1)] + [R.x(k) for k in range(R.n)]
        for i in R.beta.support:
            z = R.z_element(i)
            for g in generators:
                assert z * g == g * z


def test_z_lambda_element(a2_pair):
    R = a2_pair
    lam = DominantWeight.from_map(R.datum, {1: 2, 2: 1})
    z1, z2 = R.z_element(1), R.z_element(2)
    assert R.z_lambda_element(lam) == z1 * z1 * z2


def test_three_term_display(nilhecke2):
    R = nilhecke2
    x1, x2 = R.ring.gens
    for f in (x1, x2, x1 ** 2 * x2, x1 ** 3 + x2):
        assert not R.display_residual(f, 0, (1, 1))
        assert not R.two_sided_demazure_residual(f, 0, (1, 1))


def test_three_term_display_needs_equal_labels(a2_pair):
    with pytest.raises(PreconditionError):
        a2_pair.display_residual(a2_pair.ring.gens[0], 0, (1, 2))


def test_polynomial_representation(a2_pair):
    R = a2_pair
    x1, x2 = R.ring.gens
    image = R.polyrep_apply(R.tau(0) * R.tau(0), x1 ** 2, (1, 2))
    assert image == [((x1 + x2) * x1 ** 2, (1, 2))]


@pytest.mark.parametrize("preset, beta", [
    ("A2", {1: 1, 2: 1}),
    ("A1", {1: 2}),
    ("B2", {1: 1, 2: 1}),
    ("A2", {1: 2, 2: 1}),
    ("A3", {1: 1, 2: 1, 3: 1}),
])
def test_relation_suite(preset, beta, all_pass):
    datum = cartan_preset(preset)
    R = KLRAlgebra(datum, RootElement.from_map(datum, beta))
    reports = R.verify_relations()
    assert reports
    all_pass(reports)
    all_pass(R.check_associativity(samples=16))
    all_pass([R.check_polyrep(samples=8)])


def test_relation_suite_with_perturbed_q(a2, all_pass):
    datum = perturb_q(a2, Fraction(3))
    R = KLRAlgebra(datum, RootElement.from_map(datum, {1: 2, 2: 1}))
    all_pass(R.verify_relations())


def test_equal_label_crossing_products_are_observations(a2, make_algebra):
    R = make_algebra(a2, {1: 2, 2: 1})
    reports = {r.claim: r for r in R.check_q_u_nu()}
    assert reports["crossing-product-equals-q"].status == "pass"
    assert reports["crossing-product-equal-labels"].status == "info"


def test_height_bound(a1):
    with pytest.raises(PreconditionError):
        KLRAlgebra(a1, RootElement.from_map(a1, {1: 5}), max_height=4)


def test_unknown_sequence(a2_pair):
    with pytest.raises(PreconditionError):
        a2_pair.idempotent((1, 1))


def roots_up_to(datum, height):
    """Every beta of height 1..height, as {label: multiplicity} maps."""
    out = []
    for h in range(1, height + 1):
        for labels in itertools.combinations_with_replacement(datum.labels, h):
            out.append({i: labels.count(i) for i in set(labels)})
    return out


UP_TO_HEIGHT_THREE = [
    pytest.param(preset, beta, id=f"{preset}-{'+'.join(f'{k}a{i}' for i, k in sorted(beta.items()))}")
    for preset in ("A1", "A2", "A3", "B2")
    for beta in roots_up_to(cartan_preset(preset), 3)
]


@pytest.mark.slow
@pytest.mark.parametrize("preset, beta", UP_TO_HEIGHT_THREE)
def test_relation_suite_up_to_height_three(preset, beta, all_pass):
    datum = cartan_preset(preset)
    R = KLRAlgebra(datum, RootElement.from_map(datum, beta))
    all_pass(R.verify_relations())


@pytest.mark.slow
@pytest.mark.parametrize("preset, beta", [
    ("A1", {1: 3}),
    ("A2", {1: 2, 2: 1}),
    ("A3", {1: 1, 2: 1, 3: 1}),
    ("B2", {1: 2, 2: 1}),
    ("B2", {1: 1, 2: 2}),
])
def test_associativity_on_many_triples(preset, beta, all_pass):
    datum = cartan_preset(preset)
    R = KLRAlgebra(datum, RootElement.from_map(datum, beta))
    reports = R.check_associativity(samples=500)
    all_pass(reports)
    assert reports[0].witness["samples"] == 500
