import json

import pytest
from sympy.polys.domains import QQ

from klr_lab.services.cartan import CartanDatum, DominantWeight, RootElement, cartan_preset
from klr_lab.services.cyclotomic import CyclotomicContext
from klr_lab.services.klr import KLRAlgebra

A4_MATRIX = (
    (2, -1, 0, 0),
    (-1, 2, -1, 0),
    (0, -1, 2, -1),
    (0, 0, -1, 2),
)


@pytest.fixture
def a1():
    return cartan_preset("A1")


@pytest.fixture
def a2():
    return cartan_preset("A2")


@pytest.fixture
def a3():
    return cartan_preset("A3")


@pytest.fixture
def b2():
    return cartan_preset("B2")


@pytest.fixture
def a4():
    return CartanDatum(labels=(1, 2, 3, 4), matrix=A4_MATRIX, symmetrizers=(1, 1, 1, 1), name="A4")


@pytest.fixture
def make_algebra():
    def build(datum, beta, domain=QQ):
        return KLRAlgebra(datum, RootElement.from_map(datum, beta), domain)
    return build


@pytest.fixture
def make_context():
    """Cyclotomic context from plain {label: count} maps."""
    def build(datum, lam, beta, target=None, domain=QQ):
        return CyclotomicContext(
            datum,
            DominantWeight.from_map(datum, lam),
            RootElement.from_map(datum, beta),
            domain,
            target,
        )
    return build


@pytest.fixture
def write_job(tmp_path):
    def write(job, name="job.json"):
        path = tmp_path / name
        path.write_text(json.dumps(job) if not isinstance(job, str) else job)
        return str(path)
    return write


def assert_all_pass(reports):
    failed = [r for r in reports if r.failed]
    assert not failed, [(r.claim, r.witness) for r in failed]


@pytest.fixture
def all_pass():
    return assert_all_pass
