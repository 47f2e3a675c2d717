# klr_lab/services/algebra.py

"""
Finite-dimensional algebras given by structure constants, and the exact linear
algebra (ranks, null spaces, subspace comparison) the verifiers run on them.

Vectors are dense lists of ground-field elements indexed by the basis.
"""

import logging
import random
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

from sympy.polys.matrices import DomainMatrix

from klr_lab.core.errors import PreconditionError

logger = logging.getLogger(__name__)

Vector = List
Row = Dict[int, object]


def _matrix(rows: Sequence[Sequence], ncols: int, domain) -> DomainMatrix:
    dod = {}
    for r, row in enumerate(rows):
        entries = {c: v for c, v in enumerate(row) if v}
        if entries:
            dod[r] = entries
    return DomainMatrix(dod, (len(rows), ncols), domain)


def rank_of(rows: Sequence[Sequence], ncols: int, domain) -> int:
    if ncols == 0 or not any(any(row) for row in rows):
        return 0
    return _matrix(rows, ncols, domain).rank()


def nullspace_of(rows: Sequence[Sequence], ncols: int, domain) -> List[Vector]:
    """Basis of {v : row . v = 0 for every row}."""
    if ncols == 0:
        return []
    if not any(any(row) for row in rows):
        return [[domain.one if c == r else domain.zero for c in range(ncols)] for r in range(ncols)]
    basis = _matrix(rows, ncols, domain).nullspace().to_Matrix().tolist()
    out = [[domain.convert(v) for v in vec] for vec in basis]
    return [vec for vec in out if any(vec)]


def span_contains(big: Sequence[Sequence], small: Sequence[Sequence], ncols: int, domain) -> bool:
    return rank_of(list(big) + list(small), ncols, domain) == rank_of(big, ncols, domain)


def same_span(a: Sequence[Sequence], b: Sequence[Sequence], ncols: int, domain) -> bool:
    ra, rb = rank_of(a, ncols, domain), rank_of(b, ncols, domain)
    return ra == rb == rank_of(list(a) + list(b), ncols, domain)


def transpose(rows: Sequence[Sequence], ncols: int, domain) -> List[Vector]:
    return [[row[c] for row in rows] for c in range(ncols)] if rows else [[] for _ in range(ncols)]


class FiniteDimAlgebra:
    """
    A graded algebra with a fixed basis and lazily computed structure constants.

    Args:
        domain: sympy ground field
        labels: one label per basis element, used in reports
        degrees: degree of each basis element
        product: (i, j) -> coordinates of b_i b_j
        unit: coordinates of 1
        generators: named elements generating the algebra as a ring with 1
    """

    def __init__(
        self,
        domain,
        labels: Sequence[Hashable],
        degrees: Sequence[int],
        product: Callable[[int, int], Vector],
        unit: Vector,
        generators: Dict[str, Vector],
    ):
        self.domain = domain
        self.labels = list(labels)
        self.degrees = list(degrees)
        self.dim = len(self.labels)
        self._product = product
        self._table: Dict[Tuple[int, int], Vector] = {}
        self.unit = list(unit)
        self.generators = dict(generators)

    @classmethod
    def from_table(
        cls,
        domain,
        labels: Sequence[Hashable],
        degrees: Sequence[int],
        table: Dict[Tuple[int, int], Dict[int, object]],
        unit: Dict[int, object],
        generators: Dict[str, Dict[int, object]],
    ) -> "FiniteDimAlgebra":
        """Build from sparse constants {(i, j): {k: c}}; missing pairs multiply to zero."""
        dim = len(labels)

        def dense(entries: Dict[int, object]) -> Vector:
            out = [domain.zero] * dim
            for k, c in entries.items():
                out[k] = domain.convert(c)
            return out

        return cls(
            domain, labels, degrees,
            lambda i, j: dense(table.get((i, j), {})),
            dense(unit),
            {name: dense(v) for name, v in generators.items()},
        )

    # -- arithmetic ---------------------------------------------------------

    def zero(self) -> Vector:
        return [self.domain.zero] * self.dim

    def basis_vector(self, i: int) -> Vector:
        out = self.zero()
        out[i] = self.domain.one
        return out

    def product_of_basis(self, i: int, j: int) -> Vector:
        key = (i, j)
        if key not in self._table:
            self._table[key] = self._product(i, j)
        return self._table[key]

    def multiply(self, u: Vector, v: Vector) -> Vector:
        out = self.zero()
        right = [(j, c) for j, c in enumerate(v) if c]
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in right:
                coeff = a * b
                for k, c in enumerate(self.product_of_basis(i, j)):
                    if c:
                        out[k] += coeff * c
        return out

    def add(self, u: Vector, v: Vector, scale=None) -> Vector:
        scale = self.domain.one if scale is None else scale
        return [a + scale * b for a, b in zip(u, v)]

    def commutator(self, u: Vector, v: Vector) -> Vector:
        return self.add(self.multiply(u, v), self.multiply(v, u), -self.domain.one)

    def table(self) -> Dict[Tuple[int, int], Vector]:
        for i in range(self.dim):
            for j in range(self.dim):
                self.product_of_basis(i, j)
        return self._table

    # -- structure checks ---------------------------------------------------

    def is_unital(self) -> bool:
        for j in range(self.dim):
            b = self.basis_vector(j)
            if self.multiply(self.unit, b) != b or self.multiply(b, self.unit) != b:
                return False
        return True

    def associativity_failures(self, samples: Optional[int] = None, seed: int = 0) -> List[Tuple[int, int, int]]:
        """Basis triples with (ab)c != a(bc); every triple when samples is None."""
        if samples is None:
            triples = [(i, j, k) for i in range(self.dim) for j in range(self.dim) for k in range(self.dim)]
        else:
            rng = random.Random(seed)
            triples = [tuple(rng.randrange(self.dim) for _ in range(3)) for _ in range(samples if self.dim else 0)]
        bad = []
        for i, j, k in triples:
            left = self.multiply(self.product_of_basis(i, j), self.basis_vector(k))
            right = self.multiply(self.basis_vector(i), self.product_of_basis(j, k))
            if left != right:
                bad.append((i, j, k))
        return bad

    def grading_failures(self) -> List[Tuple[int, int]]:
        """Pairs whose product has a component outside degree deg b_i + deg b_j."""
        bad = []
        for (i, j), vec in self.table().items():
            target = self.degrees[i] + self.degrees[j]
            if any(c and self.degrees[k] != target for k, c in enumerate(vec)):
                bad.append((i, j))
        return bad

    def graded_dimension(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for d in self.degrees:
            out[d] = out.get(d, 0) + 1
        return dict(sorted(out.items()))

    # -- center and cocenter ------------------------------------------------

    def commutator_rows(self) -> List[Vector]:
        """[g, b_j] for every generator g and basis element b_j; they span [A, A]."""
        rows = []
        for g in self.generators.values():
            for j in range(self.dim):
                c = self.commutator(g, self.basis_vector(j))
                if any(c):
                    rows.append(c)
        return rows

    def center(self) -> List[Vector]:
        """Basis of Z(A): the z with [g, z] = 0 for every generator g."""
        equations = []
        for g in self.generators.values():
            columns = [self.commutator(g, self.basis_vector(j)) for j in range(self.dim)]
            equations.extend(transpose(columns, self.dim, self.domain))
        basis = nullspace_of(equations, self.dim, self.domain)
        logger.debug(f"center of a {self.dim}-dimensional algebra: dimension {len(basis)}")
        return basis

    def cocenter_dimension(self) -> int:
        return self.dim - rank_of(self.commutator_rows(), self.dim, self.domain)

    def in_commutator_span(self, v: Vector) -> bool:
        return span_contains(self.commutator_rows(), [v], self.dim, self.domain)

    def is_central(self, z: Vector) -> bool:
        return all(not any(self.commutator(g, z)) for g in self.generators.values())

    # -- symmetrizing forms -------------------------------------------------

    def trace_forms(self, degree: int) -> List[Vector]:
        """
        Basis of the linear forms t with t([A, A]) = 0 that vanish off the
        basis elements of the given degree.
        """
        support = [j for j, d in enumerate(self.degrees) if d == degree]
        rows = [[c[j] for j in support] for c in self.commutator_rows()]
        forms = []
        for solution in nullspace_of(rows, len(support), self.domain):
            t = self.zero()
            for j, value in zip(support, solution):
                t[j] = value
            forms.append(t)
        return forms

    def evaluate(self, t: Vector, v: Vector):
        return sum((a * b for a, b in zip(t, v) if a and b), self.domain.zero)

    def gram_rank(self, t: Vector) -> int:
        gram = [
            [self.evaluate(t, self.product_of_basis(i, j)) for j in range(self.dim)]
            for i in range(self.dim)
        ]
        return rank_of(gram, self.dim, self.domain)

    def is_nondegenerate(self, t: Vector) -> bool:
        return self.gram_rank(t) == self.dim

    def right_multiplication_rows(self, z: Vector) -> List[Vector]:
        """Row j holds b_j z, so the null space of the transpose is the left annihilator of z."""
        return [self.multiply(self.basis_vector(j), z) for j in range(self.dim)]

    def annihilator(self, z: Vector) -> List[Vector]:
        """Basis of {a : a z = 0}."""
        images = self.right_multiplication_rows(z)
        return nullspace_of(transpose(images, self.dim, self.domain), self.dim, self.domain)


def require_same_domain(a: FiniteDimAlgebra, b: FiniteDimAlgebra):
    if a.domain != b.domain:
        raise PreconditionError("algebras are defined over different fields")
