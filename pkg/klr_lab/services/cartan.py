# klr_lab/services/cartan.py

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, prod
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

from sympy.polys.rings import PolyElement

from klr_lab.core.errors import ConfigError
from klr_lab.services.polynomials import bivariate, polynomial_ring, scalar_domain, univariate

logger = logging.getLogger(__name__)

Label = Hashable
WeightSequence = Tuple[Label, ...]

# (p, q) -> c for the monomial u^p v^q of Q_{i,j}(u, v)
QTerms = Dict[Tuple[int, int], Fraction]

PRESETS = {
    "A1": ((1,), ((2,),), (1,)),
    "A2": ((1, 2), ((2, -1), (-1, 2)), (1, 1)),
    "A3": ((1, 2, 3), ((2, -1, 0), (-1, 2, -1), (0, -1, 2)), (1, 1, 1)),
    "B2": ((1, 2), ((2, -1), (-2, 2)), (2, 1)),
}


def default_q_terms(a_ij: int, a_ji: int) -> QTerms:
    """u^{-a_ij} + v^{-a_ji}; for a_ij = 0 the two monomials coincide and Q = 1."""
    return {(-a_ij, 0): Fraction(1), (0, -a_ji): Fraction(1)}


@dataclass(frozen=True, eq=False)
class CartanDatum:
    """
    Cartan matrix, symmetrizers and the coefficients of Q_{i,j}(u, v).

    ``q_coeffs[(i, j)]`` holds the terms of Q_{i,j} for i != j and is kept
    symmetric: c_{i,j,p,q} = c_{j,i,q,p}. ``a_coeffs[i][m]`` are optional
    lower coefficients of the cyclotomic polynomials a_i.
    """
    labels: Tuple[Label, ...]
    matrix: Tuple[Tuple[int, ...], ...]
    symmetrizers: Tuple[int, ...]
    q_coeffs: Dict[Tuple[Label, Label], QTerms] = field(default_factory=dict)
    a_coeffs: Dict[Label, Dict[int, Fraction]] = field(default_factory=dict)
    name: str = "custom"
    position: Dict[Label, int] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "position", {label: p for p, label in enumerate(self.labels)})
        self._validate_matrix()
        q = {
            (i, j): default_q_terms(self.a(i, j), self.a(j, i))
            for i in self.labels for j in self.labels if i != j
        }
        for (i, j), terms in self.q_coeffs.items():
            q[(i, j)] = dict(terms)
        object.__setattr__(self, "q_coeffs", q)
        self._validate_q()
        for i in self.a_coeffs:
            self.index(i)

    def _validate_matrix(self):
        n = len(self.labels)
        if len(self.position) != n:
            raise ConfigError(f"Repeated labels in {self.labels}")
        if len(self.matrix) != n or any(len(row) != n for row in self.matrix):
            raise ConfigError(f"Cartan matrix must be {n}x{n}")
        if len(self.symmetrizers) != n or any(d <= 0 for d in self.symmetrizers):
            raise ConfigError("Symmetrizers must be positive, one per label")
        for s in range(n):
            if self.matrix[s][s] != 2:
                raise ConfigError(f"a_ii must be 2, got a[{self.labels[s]}][{self.labels[s]}] = {self.matrix[s][s]}")
            for t in range(n):
                if s == t:
                    continue
                a_st, a_ts = self.matrix[s][t], self.matrix[t][s]
                if a_st > 0:
                    raise ConfigError(f"Off-diagonal entry a[{self.labels[s]}][{self.labels[t]}] = {a_st} is positive")
                if (a_st == 0) != (a_ts == 0):
                    raise ConfigError(f"a_ij = 0 must match a_ji = 0 for {self.labels[s]}, {self.labels[t]}")
                if self.symmetrizers[s] * a_st != self.symmetrizers[t] * a_ts:
                    raise ConfigError(f"DA is not symmetric at ({self.labels[s]}, {self.labels[t]})")

    def _validate_q(self):
        for (i, j), terms in self.q_coeffs.items():
            if i == j:
                raise ConfigError(f"Q_{{{i},{i}}} is zero and takes no coefficients")
            mirror = self.q_coeffs.get((j, i), {})
            for (p, q), c in terms.items():
                if p < 0 or q < 0:
                    raise ConfigError(f"Negative exponent in Q_{{{i},{j}}}: u^{p} v^{q}")
                if c and p * self.bilinear_form(i, i) + q * self.bilinear_form(j, j) != -2 * self.bilinear_form(i, j):
                    raise ConfigError(f"Q_{{{i},{j}}} term u^{p} v^{q} is not of degree -2(a_{i},a_{j})")
                if mirror.get((q, p), Fraction(0)) != c:
                    raise ConfigError(f"Q_{{{i},{j}}}(u,v) differs from Q_{{{j},{i}}}(v,u) at u^{p} v^{q}")
            if not terms.get((-self.a(i, j), 0)):
                raise ConfigError(f"Leading coefficient c_{{{i},{j},{-self.a(i, j)},0}} must be invertible")

    def index(self, i: Label) -> int:
        try:
            return self.position[i]
        except KeyError:
            raise ConfigError(f"Unknown label {i!r}; labels are {list(self.labels)}")

    def a(self, i: Label, j: Label) -> int:
        return self.matrix[self.index(i)][self.index(j)]

    def d(self, i: Label) -> int:
        return self.symmetrizers[self.index(i)]

    def bilinear_form(self, i: Label, j: Label) -> int:
        """(alpha_i, alpha_j) = d_i a_ij."""
        return self.d(i) * self.a(i, j)

    def q_terms(self, i: Label, j: Label) -> QTerms:
        if i == j:
            return {}
        return self.q_coeffs[(i, j)]

    def r(self, i: Label, j: Label) -> Fraction:
        """r_{i,j} = c_{i,j,-a_ij,0}, and 0 on the diagonal."""
        if i == j:
            return Fraction(0)
        return self.q_terms(i, j).get((-self.a(i, j), 0), Fraction(0))


@dataclass(frozen=True)
class DominantWeight:
    """Coordinates <alpha_i^vee, Lambda> over the labels of a datum."""
    coords: Tuple[Tuple[Label, int], ...]

    def __post_init__(self):
        if any(c < 0 for _, c in self.coords):
            raise ConfigError(f"Dominant weights have nonnegative coordinates, got {dict(self.coords)}")

    @classmethod
    def from_map(cls, datum: CartanDatum, mapping: Mapping[Label, int]) -> "DominantWeight":
        for label in mapping:
            datum.index(label)
        return cls(tuple((i, int(mapping.get(i, 0))) for i in datum.labels))

    @classmethod
    def fundamental(cls, datum: CartanDatum, i: Label) -> "DominantWeight":
        return cls.from_map(datum, {i: 1})

    def __getitem__(self, i: Label) -> int:
        return dict(self.coords).get(i, 0)

    def __add__(self, other: "DominantWeight") -> "DominantWeight":
        mine, theirs = dict(self.coords), dict(other.coords)
        labels = [i for i, _ in self.coords] + [i for i, _ in other.coords if i not in mine]
        return DominantWeight(tuple((i, mine.get(i, 0) + theirs.get(i, 0)) for i in labels))

    def as_dict(self) -> Dict[Label, int]:
        return dict(self.coords)


@dataclass(frozen=True)
class RootElement:
    """beta = sum k_i alpha_i."""
    multiplicities: Tuple[Tuple[Label, int], ...]

    def __post_init__(self):
        if any(k < 0 for _, k in self.multiplicities):
            raise ConfigError(f"Root multiplicities must be nonnegative, got {dict(self.multiplicities)}")

    @classmethod
    def from_map(cls, datum: CartanDatum, mapping: Mapping[Label, int]) -> "RootElement":
        for label in mapping:
            datum.index(label)
        return cls(tuple((i, int(mapping[i])) for i in datum.labels if mapping.get(i, 0)))

    @classmethod
    def from_sequence(cls, datum: CartanDatum, nu: Sequence[Label]) -> "RootElement":
        return cls.from_map(datum, {i: list(nu).count(i) for i in set(nu)})

    @property
    def height(self) -> int:
        return sum(k for _, k in self.multiplicities)

    @property
    def is_multiplicity_free(self) -> bool:
        return all(k <= 1 for _, k in self.multiplicities)

    @property
    def support(self) -> Tuple[Label, ...]:
        return tuple(i for i, k in self.multiplicities if k)

    def __getitem__(self, i: Label) -> int:
        return dict(self.multiplicities).get(i, 0)

    def content(self) -> WeightSequence:
        """The entries of the smallest weight sequence, labels in datum order."""
        return tuple(itertools.chain.from_iterable([i] * k for i, k in self.multiplicities))

    def as_dict(self) -> Dict[Label, int]:
        return dict(self.multiplicities)


def cartan_preset(name: str) -> CartanDatum:
    if name not in PRESETS:
        raise ConfigError(f"Unknown preset '{name}'. Available presets: {', '.join(PRESETS)}")
    labels, matrix, symmetrizers = PRESETS[name]
    return CartanDatum(labels=labels, matrix=matrix, symmetrizers=symmetrizers, name=name)


def perturb_q(datum: CartanDatum, scale: Fraction = Fraction(2)) -> CartanDatum:
    """
    Rescale every u-power term of Q_{i,j} (i before j in label order), mirrored
    into Q_{j,i}, so the symmetry and invertibility conditions survive.
    """
    q: Dict[Tuple[Label, Label], QTerms] = {}
    for (i, j), terms in datum.q_coeffs.items():
        if datum.index(i) > datum.index(j):
            continue
        scaled = {(p, r): c * scale if p > 0 else c for (p, r), c in terms.items()}
        q[(i, j)] = scaled
        q[(j, i)] = {(r, p): c for (p, r), c in scaled.items()}
    return CartanDatum(
        labels=datum.labels,
        matrix=datum.matrix,
        symmetrizers=datum.symmetrizers,
        q_coeffs=q,
        a_coeffs=datum.a_coeffs,
        name=f"{datum.name}~{scale}",
    )


def bilinear_form(datum: CartanDatum, i: Label, j: Label) -> int:
    return datum.bilinear_form(i, j)


def weight_pairing(datum: CartanDatum, lam: DominantWeight, i: Label) -> int:
    """(Lambda, alpha_i) = d_i <alpha_i^vee, Lambda>."""
    return datum.d(i) * lam[i]


def d_lambda_beta(datum: CartanDatum, lam: DominantWeight, beta: RootElement) -> int:
    """d_{Lambda,beta} = 2(Lambda, beta) - (beta, beta)."""
    lam_beta = sum(k * weight_pairing(datum, lam, i) for i, k in beta.multiplicities)
    beta_beta = sum(
        ki * kj * datum.bilinear_form(i, j)
        for i, ki in beta.multiplicities
        for j, kj in beta.multiplicities
    )
    return 2 * lam_beta - beta_beta


def r_constants(datum: CartanDatum, nu: Sequence[Label]) -> Fraction:
    """r_nu = prod_{k<l} r_{nu_k, nu_l}."""
    return prod(
        (datum.r(nu[k], nu[l]) for k in range(len(nu)) for l in range(k + 1, len(nu))),
        start=Fraction(1),
    )


def r_last(datum: CartanDatum, nu: Sequence[Label]) -> Fraction:
    """r(beta, nu_n) = prod_{k<n} r_{nu_k, nu_n}."""
    return prod((datum.r(nu[k], nu[-1]) for k in range(len(nu) - 1)), start=Fraction(1))


def enumerate_weight_sequences(beta: RootElement) -> List[WeightSequence]:
    """Distinct rearrangements of the content of beta, in lexicographic label order."""
    counts = dict(beta.multiplicities)
    order = [i for i, _ in beta.multiplicities]
    out: List[WeightSequence] = []

    def extend(prefix: List[Label]):
        if len(prefix) == beta.height:
            out.append(tuple(prefix))
            return
        for i in order:
            if counts[i]:
                counts[i] -= 1
                prefix.append(i)
                extend(prefix)
                prefix.pop()
                counts[i] += 1

    extend([])
    return out


def expected_sequence_count(beta: RootElement) -> int:
    return factorial(beta.height) // prod(factorial(k) for _, k in beta.multiplicities)


def q_poly(datum: CartanDatum, i: Label, j: Label, domain=None) -> PolyElement:
    """Q_{i,j}(u, v) in k[u, v] (variables x1, x2)."""
    ring = polynomial_ring(2, domain or scalar_domain())
    return bivariate(ring, datum.q_terms(i, j), 0, 1)


def a_terms(datum: CartanDatum, lam: DominantWeight, i: Label) -> Dict[int, Fraction]:
    """Monic a_i^Lambda(u) of degree <alpha_i^vee, Lambda>; configured lower terms are kept."""
    top = lam[i]
    terms = {top: Fraction(1)}
    for m, c in datum.a_coeffs.get(i, {}).items():
        if m < top:
            terms[m] = c
        elif c:
            logger.warning(f"Ignoring a_{i} coefficient of u^{m}: degree is {top} for this weight")
    return terms


def a_poly(datum: CartanDatum, lam: DominantWeight, i: Label, domain=None) -> PolyElement:
    ring = polynomial_ring(1, domain or scalar_domain())
    return univariate(ring, a_terms(datum, lam, i), 0)


def is_pure_power(datum: CartanDatum) -> bool:
    return not any(any(c for c in coeffs.values()) for coeffs in datum.a_coeffs.values())


def multiplicity_free_roots(datum: CartanDatum, height: int) -> List[RootElement]:
    """All beta = alpha_{i_1} + ... + alpha_{i_h} with distinct labels."""
    return [
        RootElement.from_map(datum, {i: 1 for i in combo})
        for combo in itertools.combinations(datum.labels, height)
    ]


def weight_grid(datum: CartanDatum, bound: int) -> Iterable[DominantWeight]:
    """Every Lambda with all coordinates in [0, bound]."""
    for coords in itertools.product(range(bound + 1), repeat=len(datum.labels)):
        yield DominantWeight(tuple(zip(datum.labels, coords)))


def beta_label(beta: RootElement) -> str:
    """'a1+a2', '2a1'."""
    parts = [f"{k if k > 1 else ''}a{i}" for i, k in beta.multiplicities]
    return "+".join(parts) or "0"


def weight_label(lam: DominantWeight) -> str:
    return "(" + ",".join(str(c) for _, c in lam.coords) + ")"


def instance_label(datum: CartanDatum, beta: RootElement, lam: Optional[DominantWeight] = None) -> str:
    if lam is None:
        return f"{datum.name} b={beta_label(beta)}"
    return f"{datum.name} L={weight_label(lam)} b={beta_label(beta)}"
