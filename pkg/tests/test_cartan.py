from fractions import Fraction

import pytest

from klr_lab.core.errors import ConfigError
from klr_lab.models.job import CartanBlock
from klr_lab.services.cartan import (
    CartanDatum, DominantWeight, RootElement, a_poly, bilinear_form, cartan_preset, d_lambda_beta,
    enumerate_weight_sequences, expected_sequence_count, multiplicity_free_roots, perturb_q, q_poly,
    r_constants, r_last, weight_grid,
)
from klr_lab.services.polynomials import polynomial_ring


def test_bilinear_form(a2):
    assert bilinear_form(a2, 1, 1) == 2
    assert bilinear_form(a2, 1, 2) == -1


def test_bilinear_form_b2_is_symmetric():
    b2 = cartan_preset("B2")
    assert bilinear_form(b2, 1, 2) == -2
    assert bilinear_form(b2, 2, 1) == -2
    assert bilinear_form(b2, 1, 1) == 4


def test_unknown_label(a2):
    with pytest.raises(ConfigError):
        bilinear_form(a2, 1, 7)


def test_unknown_preset():
    with pytest.raises(ConfigError):
        cartan_preset("E8")


@pytest.mark.parametrize("matrix, symmetrizers", [
    (((3, -1), (-1, 2)), (1, 1)),   # a_ii != 2
    (((2, 1), (1, 2)), (1, 1)),     # positive off-diagonal
    (((2, 0), (-1, 2)), (1, 1)),    # zero pattern
    (((2, -1), (-2, 2)), (1, 1)),   # DA not symmetric
])
def test_invalid_matrices(matrix, symmetrizers):
    with pytest.raises(ConfigError):
        CartanDatum(labels=(1, 2), matrix=matrix, symmetrizers=symmetrizers)


def test_q_symmetry_is_enforced():
    with pytest.raises(ConfigError):
        CartanDatum(
            labels=(1, 2), matrix=((2, -1), (-1, 2)), symmetrizers=(1, 1),
            q_coeffs={(1, 2): {(1, 0): Fraction(1), (0, 1): Fraction(2)}},
        )


def test_q_degree_constraint():
    with pytest.raises(ConfigError):
        CartanDatum(
            labels=(1, 2), matrix=((2, -1), (-1, 2)), symmetrizers=(1, 1),
            q_coeffs={
                (1, 2): {(1, 0): Fraction(1), (0, 1): Fraction(1), (2, 0): Fraction(1)},
                (2, 1): {(0, 1): Fraction(1), (1, 0): Fraction(1), (0, 2): Fraction(1)},
            },
        )


def test_d_lambda_beta(a1, a2):
    lam = DominantWeight.fundamental(a1, 1)
    assert d_lambda_beta(a1, lam, RootElement.from_map(a1, {1: 1})) == 0

    beta = RootElement.from_map(a2, {1: 1, 2: 1})
    assert d_lambda_beta(a2, DominantWeight.fundamental(a2, 1), beta) == 0
    assert d_lambda_beta(a2, DominantWeight.from_map(a2, {}), beta) == -2


def test_r_constants(a2, a3):
    assert r_constants(a2, (1, 1)) == 0
    assert r_constants(a2, (1, 2)) == 1
    assert r_constants(a3, (1, 2, 3)) == 1
    assert r_last(a3, (3, 1, 2)) == 1


def test_enumerate_weight_sequences(a1, a2, a3):
    assert enumerate_weight_sequences(RootElement.from_map(a2, {1: 1, 2: 1})) == [(1, 2), (2, 1)]
    assert enumerate_weight_sequences(RootElement.from_map(a1, {1: 2})) == [(1, 1)]
    assert len(enumerate_weight_sequences(RootElement.from_map(a3, {1: 1, 2: 1, 3: 1}))) == 6


def test_sequence_count_is_multinomial(a2):
    beta = RootElement.from_map(a2, {1: 2, 2: 1})
    assert len(enumerate_weight_sequences(beta)) == expected_sequence_count(beta) == 3


def test_q_poly(a2):
    u, v = polynomial_ring(2).gens
    assert q_poly(a2, 1, 2) == u + v
    assert q_poly(a2, 2, 1) == u + v
    assert q_poly(a2, 1, 1) == 0


def test_q_poly_orthogonal_labels_is_one(a3):
    assert q_poly(a3, 1, 3) == 1


def test_a_poly(a2):
    (u,) = polynomial_ring(1).gens
    assert a_poly(a2, DominantWeight.fundamental(a2, 1), 1) == u
    assert a_poly(a2, DominantWeight.from_map(a2, {1: 3}), 1) == u ** 3


def test_a_poly_keeps_lower_coefficients():
    datum = CartanDatum(
        labels=(1,), matrix=((2,),), symmetrizers=(1,), a_coeffs={1: {0: Fraction(-1)}},
    )
    (u,) = polynomial_ring(1).gens
    assert a_poly(datum, DominantWeight.from_map(datum, {1: 2}), 1) == u ** 2 - 1


def test_perturb_q_keeps_symmetry(a2):
    perturbed = perturb_q(a2, Fraction(2))
    assert perturbed.q_terms(1, 2) == {(1, 0): Fraction(2), (0, 1): Fraction(1)}
    assert perturbed.q_terms(2, 1) == {(0, 1): Fraction(2), (1, 0): Fraction(1)}
    u, v = polynomial_ring(2).gens
    assert q_poly(perturbed, 1, 2) == 2 * u + v


def test_negative_weight_rejected(a2):
    with pytest.raises(ConfigError):
        DominantWeight.from_map(a2, {1: -1})


def test_multiplicity_free_roots(a3):
    roots = multiplicity_free_roots(a3, 2)
    assert len(roots) == 3
    assert all(r.is_multiplicity_free and r.height == 2 for r in roots)


def test_weight_grid(a2):
    assert len(list(weight_grid(a2, 1))) == 4


def test_cartan_block_rejects_preset_with_explicit_matrix():
    block = CartanBlock(preset="A2", matrix=[[2, -1], [-1, 2]])
    with pytest.raises(ConfigError):
        block.to_datum()


def test_cartan_block_applies_q_coefficients_to_a_preset():
    entries = [[1, 2, 1, 0, 3], [1, 2, 0, 1, 3], [2, 1, 0, 1, 3], [2, 1, 1, 0, 3]]
    datum = CartanBlock(preset="A2", q_coeffs=entries).to_datum()
    u, v = polynomial_ring(2).gens
    assert q_poly(datum, 1, 2) == 3 * u + 3 * v
