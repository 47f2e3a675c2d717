# klr_lab/services/cyclotomic.py

"""
The cyclotomic quotient R^Lambda_beta = R_beta / (a^Lambda(x_1)).

Bi-weight spaces e(target) R^Lambda_beta e(nu) are handled for any target whose
equal labels sit in contiguous blocks. The blocks give the order used by the
generators g_{nu,k}, and the quotient basis is tau_w x^a e(nu) with w.nu = target
and a_k below the x_k-degree of g_{nu,k}. The whole algebra is available when
every weight sequence is such a target, which holds for multiplicity-free beta
and for beta = n alpha_i.

Positions are 0-based; reports print them 1-based.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.polys.rings import PolyElement

from klr_lab.core.config import settings
from klr_lab.core.errors import PreconditionError, RewriteError
from klr_lab.models.report import ClaimReport, claim, observation
from klr_lab.services.algebra import (
    FiniteDimAlgebra, nullspace_of, rank_of, require_same_domain, same_span, span_contains, transpose,
)
from klr_lab.services.cartan import (
    CartanDatum, DominantWeight, RootElement, a_terms, cartan_preset, d_lambda_beta,
    instance_label, is_pure_power,
)
from klr_lab.services.klr import KLRAlgebra, KLRElement
from klr_lab.services.polynomials import (
    antilex_key, degree_in, demazure, exponents_below, exponents_of_weight,
    leading_coefficient_in, monomial, swap_action, univariate,
)
from klr_lab.services.symgroup import (
    Permutation, act, all_permutations, identity, preferred_word, swap_positions,
)

logger = logging.getLogger(__name__)

# (w, a, nu): tau_w x^a e(nu)
BasisKey = Tuple[Permutation, Tuple[int, ...], tuple]


@dataclass
class CyclotomicBasis:
    """Monomial basis of a bi-weight space or of the whole quotient."""
    elements: List[BasisKey] = field(default_factory=list)
    caps: Dict[Tuple[tuple, tuple], Tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        self.index = {key: p for p, key in enumerate(self.elements)}

    def __len__(self) -> int:
        return len(self.elements)

    def extend(self, other: "CyclotomicBasis"):
        for key in other.elements:
            self.index[key] = len(self.elements)
            self.elements.append(key)
        self.caps.update(other.caps)

    def to_json(self) -> dict:
        return {
            "size": len(self.elements),
            "elements": [
                {"w": [image + 1 for image in w], "a": list(a), "nu": list(nu)}
                for w, a, nu in self.elements
            ],
            "caps": [
                {"nu": list(nu), "target": list(target), "caps": list(caps)}
                for (nu, target), caps in self.caps.items()
            ],
        }


def is_special(seq: Sequence) -> bool:
    """Equal labels occupy one contiguous block each."""
    seen = set()
    for p, label in enumerate(seq):
        if label in seen and seq[p - 1] != label:
            return False
        seen.add(label)
    return True


def block_order(target: Sequence) -> Tuple:
    """Labels of a special sequence in block order."""
    if not is_special(target):
        raise PreconditionError(f"{tuple(target)} does not have contiguous label blocks")
    out = []
    for label in target:
        if not out or out[-1] != label:
            out.append(label)
    return tuple(out)


def permutations_to(nu: Sequence, target: Sequence) -> List[Permutation]:
    """S(nu, target) = {w : w.nu = target}, by assigning positions label by label."""
    n = len(nu)
    slots: Dict[object, List[int]] = {}
    for p, label in enumerate(target):
        slots.setdefault(label, []).append(p)
    out: List[Permutation] = []
    images: List[int] = []
    used = set()

    def extend(k: int):
        if k == n:
            out.append(Permutation(tuple(images)))
            return
        for p in slots.get(nu[k], []):
            if p not in used:
                used.add(p)
                images.append(p)
                extend(k + 1)
                images.pop()
                used.discard(p)

    extend(0)
    return sorted(out)


class CyclotomicContext:
    """
    R^Lambda_beta for one (datum, Lambda, beta).

    Args:
        datum: Cartan datum
        lam: dominant weight Lambda
        beta: positive root lattice element
        domain: sympy ground field
        target: default target sequence for bi-weight computations
        algebra: an existing KLRAlgebra for beta; contexts at different levels
            share it so that their elements can be compared
    """

    def __init__(
        self,
        datum: CartanDatum,
        lam: DominantWeight,
        beta: RootElement,
        domain=None,
        target: Optional[Sequence] = None,
        algebra: Optional[KLRAlgebra] = None,
        max_height: Optional[int] = None,
    ):
        self.datum = datum
        self.lam = lam
        self.beta = beta
        self.klr = algebra or KLRAlgebra(datum, beta, domain, max_height)
        if self.klr.beta != beta:
            raise PreconditionError("the shared KLR algebra belongs to a different beta")
        self.ring = self.klr.ring
        self.domain = self.ring.domain
        self.n = self.klr.n
        self.label = instance_label(datum, beta, lam)
        self.target = None if target is None else self._check_target(target)
        self._g_cache: Dict[Tuple[tuple, int, Tuple], PolyElement] = {}
        self._reducers: Dict[Tuple[tuple, Tuple], Optional[List[Tuple[int, PolyElement]]]] = {}
        self._full: Optional[CyclotomicBasis] = None
        self._algebra: Optional[FiniteDimAlgebra] = None

    def raised(self, i) -> "CyclotomicContext":
        """The same beta at level Lambda + Lambda_i, sharing the KLR algebra."""
        return CyclotomicContext(
            self.datum, self.lam + DominantWeight.fundamental(self.datum, i), self.beta,
            target=self.target, algebra=self.klr,
        )

    def _check_target(self, target: Sequence) -> tuple:
        target = self.klr._check_sequence(target)
        block_order(target)
        return target

    def _resolve_target(self, target: Optional[Sequence]) -> tuple:
        if target is not None:
            return self._check_target(target)
        if self.target is None:
            raise PreconditionError(f"{self.label}: no target sequence given")
        return self.target

    @property
    def supports_full_algebra(self) -> bool:
        return self.beta.is_multiplicity_free or len(self.beta.support) == 1

    def special_targets(self) -> List[tuple]:
        return [nu for nu in self.klr.sequences if is_special(nu)]

    # -- generators of the ideal --------------------------------------------

    def a_at(self, i, k: int) -> PolyElement:
        """a^Lambda_i(x_k)."""
        return univariate(self.ring, a_terms(self.datum, self.lam, i), k)

    def g_generator(self, nu: Sequence, k: int, target: Optional[Sequence] = None) -> PolyElement:
        """
        g^Lambda_{nu,k} for the block order of the target, k 0-based.

        g_{nu,0} = a_{nu_0}(x_0) and g_{nu,k} is obtained from g_{., k-1} by a
        divided difference when nu_{k-1} = nu_k, by s_{k-1} applied to the
        generator of s_{k-1}.nu otherwise, times Q_{nu_{k-1},nu_k}(x_{k-1}, x_k)
        when nu_{k-1} comes first in the order.
        """
        target = self._resolve_target(target)
        nu = self.klr._check_sequence(nu)
        if not 0 <= k < self.n:
            raise PreconditionError(f"g_{k + 1} does not exist for n = {self.n}")
        order = block_order(target)
        return self._g(nu, k, order, {label: p for p, label in enumerate(order)})

    def _g(self, nu: tuple, k: int, order: Tuple, rank: Dict) -> PolyElement:
        key = (nu, k, order)
        if key in self._g_cache:
            return self._g_cache[key]
        if k == 0:
            g = self.a_at(nu[0], 0)
        else:
            i, j = nu[k - 1], nu[k]
            if i == j:
                g = demazure(self._g(nu, k - 1, order, rank), k - 1)
            else:
                g = swap_action(self._g(swap_positions(nu, k - 1), k - 1, order, rank), k - 1)
                if rank[i] < rank[j]:
                    g = g * self.klr.q_pair(i, j, k - 1, k)
        self._g_cache[key] = g
        return g

    def _generators(self, nu: tuple, target: tuple) -> List[Tuple[int, PolyElement]]:
        """(cap, g) per position; caps after the first zero cap are reported as 0."""
        out = []
        zero_seen = False
        for t in range(self.n):
            g = self.g_generator(nu, t, target)
            if not g:
                if not zero_seen:
                    raise RewriteError(f"g_{t + 1} vanishes for nu={nu}, target={target}")
                out.append((0, g))
                continue
            cap = degree_in(g, t)
            out.append((cap, g))
            zero_seen = zero_seen or cap == 0
        return out

    def caps(self, nu: Sequence, target: Optional[Sequence] = None) -> Tuple[int, ...]:
        target = self._resolve_target(target)
        return tuple(cap for cap, _ in self._generators(self.klr._check_sequence(nu), target))

    def _reducer(self, nu: tuple, target: tuple) -> Optional[List[Tuple[int, PolyElement]]]:
        """Generators normalised to leading coefficient 1 in x_t; None when the space is zero."""
        key = (nu, block_order(target))
        if key not in self._reducers:
            generators = self._generators(nu, target)
            if any(cap == 0 for cap, _ in generators):
                self._reducers[key] = None
            else:
                normalised = []
                for t, (cap, g) in enumerate(generators):
                    lc = leading_coefficient_in(g, t)
                    if not lc.is_ground or not lc:
                        raise RewriteError(f"g_{t + 1} for nu={nu} has leading coefficient {lc} in x{t + 1}")
                    normalised.append((cap, g.quo_ground(lc.LC)))
                self._reducers[key] = normalised
        return self._reducers[key]

    # -- bases --------------------------------------------------------------

    def biweight_basis(self, nu: Sequence, target: Optional[Sequence] = None) -> CyclotomicBasis:
        """tau_w x^a e(nu) with w.nu = target and a_k < N_k."""
        target = self._resolve_target(target)
        nu = self.klr._check_sequence(nu)
        caps = self.caps(nu, target)
        exponents = list(exponents_below(caps))
        elements = [(w, a, nu) for w in permutations_to(nu, target) for a in exponents]
        return CyclotomicBasis(elements, {(nu, target): caps})

    def full_basis_mf(self) -> CyclotomicBasis:
        if not self.beta.is_multiplicity_free:
            raise PreconditionError(f"{self.label}: beta is not multiplicity-free")
        return self.full_basis()

    def full_basis(self) -> CyclotomicBasis:
        """Union of the bi-weight bases over all (nu, target)."""
        if not self.supports_full_algebra:
            raise PreconditionError(
                f"{self.label}: the whole quotient needs beta multiplicity-free or a multiple of one simple root"
            )
        if self._full is None:
            basis = CyclotomicBasis()
            for nu in self.klr.sequences:
                for target in self.klr.sequences:
                    basis.extend(self.biweight_basis(nu, target))
            self._full = basis
            logger.info(f"{self.label}: quotient basis of size {len(basis)}")
        return self._full

    def ideal_basis_mf(self, max_dots: int = 2) -> List[Tuple[BasisKey, int, KLRElement]]:
        """
        tau_w x^b g_{w,nu,k} e(nu) with b_t < N_t for t > k, restricted to
        sum(b) <= max_dots. Entries are ((w, b, nu), k, element).
        """
        if not self.beta.is_multiplicity_free:
            raise PreconditionError(f"{self.label}: beta is not multiplicity-free")
        out = []
        for nu in self.klr.sequences:
            for w in all_permutations(self.n):
                target = act(w, nu)
                generators = self._generators(nu, target)
                for k, (_, g) in enumerate(generators):
                    if not g:
                        continue
                    for b in self._exponents_with_tail_caps(generators, k, max_dots):
                        poly = monomial(self.ring, b) * g
                        out.append(((w, b, nu), k, self.klr.element({(w, nu): poly})))
        return out

    def _exponents_with_tail_caps(self, generators, k: int, max_dots: int):
        caps = [cap for cap, _ in generators]
        for total in range(max_dots + 1):
            for b in exponents_of_weight([1] * self.n, total):
                if all(b[t] < caps[t] for t in range(k + 1, self.n)):
                    yield b

    # -- reduction ----------------------------------------------------------

    def reduce_poly(self, f: PolyElement, reducer: List[Tuple[int, PolyElement]]) -> PolyElement:
        """Bring every x_t-exponent below its cap, last position first."""
        steps = 0
        for t in reversed(range(self.n)):
            cap, g = reducer[t]
            while True:
                over = [m for m in f.keys() if m[t] >= cap]
                if not over:
                    break
                m = max(over, key=lambda e: (e[t], antilex_key(e)))
                shift = list(m)
                shift[t] -= cap
                f = f - monomial(self.ring, shift, f[m]) * g
                steps += 1
                if steps > settings.REWRITE_GUARD:
                    raise RewriteError(f"{self.label}: reduction exceeded {settings.REWRITE_GUARD} steps")
        return f

    def reduce(self, a: KLRElement) -> Dict[BasisKey, object]:
        """Coordinates of the image of a in the quotient basis."""
        if a.algebra is not self.klr:
            raise PreconditionError("element belongs to a different KLR algebra")
        out: Dict[BasisKey, object] = {}
        for (w, nu), p in a.terms.items():
            target = act(w, nu)
            if not is_special(target):
                raise PreconditionError(f"{self.label}: cannot reduce into e{target}, its labels are not in blocks")
            reducer = self._reducer(nu, target)
            if reducer is None:
                continue
            for m, c in self.reduce_poly(p, reducer).items():
                key = (w, m, nu)
                total = out.get(key, self.domain.zero) + c
                if total:
                    out[key] = total
                else:
                    out.pop(key, None)
        return out

    def reduced_element(self, a: KLRElement) -> KLRElement:
        terms: Dict = {}
        for (w, m, nu), c in self.reduce(a).items():
            terms[(w, nu)] = terms.get((w, nu), self.ring.zero) + monomial(self.ring, m, c)
        return self.klr.element(terms)

    def to_vector(self, a: KLRElement, basis: Optional[CyclotomicBasis] = None) -> List:
        basis = basis or self.full_basis()
        out = [self.domain.zero] * len(basis)
        for key, c in self.reduce(a).items():
            if key not in basis.index:
                raise RewriteError(f"{self.label}: reduced term {key} lies outside the basis")
            out[basis.index[key]] = c
        return out

    def element_of(self, key: BasisKey) -> KLRElement:
        w, a, nu = key
        return self.klr.basis_element(w, a, nu)

    def degree_of(self, key: BasisKey) -> int:
        w, a, nu = key
        return self.klr.term_degree(w, nu, a)

    # -- structure constants ------------------------------------------------

    def structure_constants(self) -> FiniteDimAlgebra:
        """The quotient as a FiniteDimAlgebra; products are filled on demand."""
        if self._algebra is not None:
            return self._algebra
        basis = self.full_basis()
        elements = [self.element_of(key) for key in basis.elements]

        def product(i: int, j: int) -> List:
            return self.to_vector(elements[i] * elements[j], basis)

        generators = {f"e{nu}": self.to_vector(self.klr.idempotent(nu), basis) for nu in self.klr.sequences}
        for k in range(self.n):
            generators[f"x{k + 1}"] = self.to_vector(self.klr.x(k), basis)
        for k in range(self.n - 1):
            generators[f"t{k + 1}"] = self.to_vector(self.klr.tau(k), basis)
        self._algebra = FiniteDimAlgebra(
            self.domain,
            [self._label_of(key) for key in basis.elements],
            [self.degree_of(key) for key in basis.elements],
            product,
            self.to_vector(self.klr.one(), basis),
            generators,
        )
        return self._algebra

    @staticmethod
    def _label_of(key: BasisKey) -> str:
        w, a, nu = key
        word = "".join(f"t{b + 1}" for b in preferred_word(w))
        dots = "".join(f"x{k + 1}^{e}" if e > 1 else f"x{k + 1}" for k, e in enumerate(a) if e)
        return f"{word}{dots}e{nu}"

    # -- center -------------------------------------------------------------

    def symmetric_image(self, A: Optional[FiniteDimAlgebra] = None) -> List[List]:
        """
        Images of the orbit sums sum_w x^{w.a} e(w.nu), which span the center of
        R_beta, for every orbit up to the top degree of the quotient.
        """
        A = A or self.structure_constants()
        if not A.dim:
            return []
        top = max(A.degrees)
        form = self.datum.bilinear_form
        seen = set()
        rows = []
        for nu in self.klr.sequences:
            weights = [form(label, label) for label in nu]
            for d in range(top + 1):
                for a in exponents_of_weight(weights, d):
                    orbit = frozenset((act(w, a), act(w, nu)) for w in all_permutations(self.n))
                    if orbit in seen:
                        continue
                    seen.add(orbit)
                    e = identity(self.n)
                    terms: Dict = {}
                    for b, mu in orbit:
                        terms[(e, mu)] = terms.get((e, mu), self.ring.zero) + monomial(self.ring, b)
                    vector = self.to_vector(self.klr.element(terms))
                    if any(vector):
                        rows.append(vector)
        logger.debug(f"{self.label}: {len(seen)} symmetric orbits up to degree {top}")
        return rows

    # -- graded oracle ------------------------------------------------------

    def oracle_degrees(self, nu: Sequence, target: Optional[Sequence] = None) -> range:
        """
        Degrees the graded oracle scans for e(target) R^Lambda_beta e(nu).

        The symmetrizing form of degree -d_{Lambda,beta} pairs degree j here with
        degree d - j in e(nu) R^Lambda_beta e(target), which starts at the lowest
        crossing degree from target back to nu.
        """
        target = self._resolve_target(target)
        nu = self.klr._check_sequence(nu)
        zeros = (0,) * self.n
        term_degree = self.klr.term_degree
        lo = min(term_degree(w, nu, zeros) for w in permutations_to(nu, target))
        back = min(term_degree(w, target, zeros) for w in permutations_to(target, nu))
        top = max((self.degree_of(key) for key in self.biweight_basis(nu, target).elements), default=lo)
        step = max(self.datum.bilinear_form(label, label) for label in nu)
        d = d_lambda_beta(self.datum, self.lam, self.beta)
        return range(lo, max(top + step, d - back) + 1)

    def graded_oracle(self, nu: Sequence, target: Optional[Sequence] = None) -> Dict[int, int]:
        """
        Graded dimension of e(target) R^Lambda_beta e(nu) computed as
        dim R_d - rank of the degree-d spanning set
        tau_u x^c a_{mu_1}(x_1) e(mu) tau_v x^c' e(nu) of the ideal.
        """
        if not is_pure_power(self.datum):
            raise PreconditionError("the graded oracle needs a_i(u) = u^<alpha_i^vee, Lambda>")
        target = self._resolve_target(target)
        nu = self.klr._check_sequence(nu)
        form = self.datum.bilinear_form
        term_degree = self.klr.term_degree
        zeros = (0,) * self.n

        def weights(seq):
            return [form(label, label) for label in seq]

        words = permutations_to(nu, target)
        base = {w: term_degree(w, nu, zeros) for w in words}
        routes = [
            (mu, u, v)
            for mu in self.klr.sequences
            for v in permutations_to(nu, mu)
            for u in permutations_to(mu, target)
        ]
        out: Dict[int, int] = {}
        for d in self.oracle_degrees(nu, target):
            columns = {
                (w, a): p
                for p, (w, a) in enumerate(
                    (w, a) for w in words for a in exponents_of_weight(weights(nu), d - base[w])
                )
            }
            if not columns:
                continue
            rows = []
            for mu, u, v in routes:
                power = self.lam[mu[0]]
                rest = d - term_degree(u, mu, zeros) - power * form(mu[0], mu[0]) - term_degree(v, nu, zeros)
                for r1 in range(max(rest, -1) + 1):
                    for c1 in exponents_of_weight(weights(mu), r1):
                        left_poly = monomial(self.ring, c1) * self.ring.gens[0] ** power
                        left = self.klr.element({(u, mu): left_poly})
                        for c2 in exponents_of_weight(weights(nu), rest - r1):
                            row = [self.domain.zero] * len(columns)
                            for (w, _), poly in (left * self.klr.basis_element(v, c2, nu)).terms.items():
                                for m, c in poly.items():
                                    if (w, m) not in columns:
                                        raise RewriteError(f"product left degree {d}: {(w, m)}")
                                    row[columns[(w, m)]] += c
                            rows.append(row)
            dim = len(columns) - rank_of(rows, len(columns), self.domain)
            if dim:
                out[d] = dim
        return out


# -- module-level operations ----------------------------------------------------


def cyclotomic_reduce(ctx: CyclotomicContext, a: KLRElement) -> Dict[BasisKey, object]:
    return ctx.reduce(a)


def center_compute(A: FiniteDimAlgebra) -> List[List]:
    return A.center()


def trace_form_solve(A: FiniteDimAlgebra, degree: int) -> Tuple[List[List], List[bool]]:
    """Trace forms vanishing off the basis elements of the given degree, with nondegeneracy flags."""
    forms = A.trace_forms(degree)
    return forms, [A.is_nondegenerate(t) for t in forms]


def graded_dimension(A: FiniteDimAlgebra) -> Dict[int, int]:
    return A.graded_dimension()


def nilhecke_dimension(l: int, n: int) -> int:
    """n! l! / (l - n)!, zero when n > l."""
    if n > l:
        return 0
    return math.factorial(n) * math.factorial(l) // math.factorial(l - n)


def nilhecke_context(l: int, n: int, domain=None) -> CyclotomicContext:
    datum = cartan_preset("A1")
    i = datum.labels[0]
    return CyclotomicContext(
        datum, DominantWeight.from_map(datum, {i: l}), RootElement.from_map(datum, {i: n}), domain,
    )


def nilhecke_basis(l: int, n: int, domain=None) -> CyclotomicBasis:
    """The cyclotomic nilHecke basis tau_w x^a e(i^n) with a_t <= l - t."""
    return nilhecke_context(l, n, domain).full_basis()


# -- verifiers ----------------------------------------------------------------


def check_generators(ctx: CyclotomicContext) -> ClaimReport:
    """Each g_{nu,k} lies in k[x_1..x_k] and has a scalar leading coefficient in x_k."""
    failures, checked = [], 0
    for target in ctx.special_targets():
        for nu in ctx.klr.sequences:
            zero_seen = False
            for t in range(ctx.n):
                g = ctx.g_generator(nu, t, target)
                checked += 1
                if zero_seen:
                    continue
                in_range = all(not any(m[t + 1:]) for m in g.keys())
                monic = bool(g) and leading_coefficient_in(g, t).is_ground
                if not (in_range and monic):
                    failures.append({"nu": nu, "target": target, "k": t + 1, "g": str(g)})
                zero_seen = bool(g) and degree_in(g, t) == 0
    return claim(ctx.label, "generator-monic", not failures, instances=checked, failures=failures[:5])


def check_cap_formula(ctx: CyclotomicContext) -> ClaimReport:
    """
    Multiplicity-free caps: N_t = <alpha_{nu_t}^vee, Lambda> - sum a_{nu_t,nu_k}
    over k < t with w(k) < w(t).
    """
    if not ctx.beta.is_multiplicity_free:
        raise PreconditionError(f"{ctx.label}: beta is not multiplicity-free")
    failures, checked = [], 0
    for nu in ctx.klr.sequences:
        for w in all_permutations(ctx.n):
            expected = tuple(
                ctx.lam[nu[t]] - sum(ctx.datum.a(nu[t], nu[k]) for k in range(t) if w[k] < w[t])
                for t in range(ctx.n)
            )
            got = ctx.caps(nu, act(w, nu))
            checked += 1
            both_zero = math.prod(expected) == 0 and math.prod(got) == 0
            if not both_zero and expected != got:
                failures.append({"nu": nu, "w": [i + 1 for i in w], "expected": expected, "got": got})
    return claim(ctx.label, "cap-formula", not failures, instances=checked, failures=failures[:5])


def check_biweight_dimension(ctx: CyclotomicContext, nu: Sequence, target: Optional[Sequence] = None) -> ClaimReport:
    target = ctx._resolve_target(target)
    basis = ctx.biweight_basis(nu, target)
    from_basis: Dict[int, int] = {}
    for key in basis.elements:
        d = ctx.degree_of(key)
        from_basis[d] = from_basis.get(d, 0) + 1
    oracle = ctx.graded_oracle(nu, target)
    return claim(
        ctx.label, "biweight-dimension", dict(sorted(from_basis.items())) == oracle,
        nu=tuple(nu), target=target, size=len(basis), basis=dict(sorted(from_basis.items())), oracle=oracle,
    )


def check_ideal_basis(ctx: CyclotomicContext, max_dots: int = 1) -> ClaimReport:
    """Listed ideal elements reduce to zero and are independent within each tau_w e(nu) slot."""
    nonzero, slots = [], {}
    entries = ctx.ideal_basis_mf(max_dots)
    for key, k, element in entries:
        if ctx.reduce(element):
            nonzero.append({"w": [i + 1 for i in key[0]], "b": key[1], "nu": key[2], "k": k + 1})
        (poly,) = element.terms.values()
        slots.setdefault((key[0], key[2]), []).append(poly)
    dependent = []
    for (w, nu), polys in slots.items():
        monomials = sorted({m for p in polys for m in p.keys()})
        where = {m: c for c, m in enumerate(monomials)}
        rows = []
        for p in polys:
            row = [ctx.domain.zero] * len(monomials)
            for m, c in p.items():
                row[where[m]] = c
            rows.append(row)
        if rank_of(rows, len(monomials), ctx.domain) != len(polys):
            dependent.append({"w": [i + 1 for i in w], "nu": nu})
    return claim(
        ctx.label, "ideal-basis", not nonzero and not dependent,
        elements=len(entries), not_reduced_to_zero=nonzero[:5], dependent_slots=dependent[:5],
    )


def check_structure(ctx: CyclotomicContext, A: Optional[FiniteDimAlgebra] = None, samples: Optional[int] = None) -> List[ClaimReport]:
    A = A or ctx.structure_constants()
    samples = samples or settings.ASSOCIATIVITY_SAMPLES
    bad = A.associativity_failures(samples if A.dim > 6 else None, settings.RANDOM_SEED)
    return [
        claim(ctx.label, "quotient-associative", not bad, dim=A.dim, failures=[list(t) for t in bad[:5]]),
        claim(ctx.label, "quotient-unital", A.is_unital(), dim=A.dim),
        claim(ctx.label, "quotient-graded", not A.grading_failures(), dim=A.dim),
    ]


def check_z_central(ctx: CyclotomicContext, A: Optional[FiniteDimAlgebra] = None) -> ClaimReport:
    A = A or ctx.structure_constants()
    failing = [i for i in ctx.datum.labels if not A.is_central(ctx.to_vector(ctx.klr.z_element(i)))]
    return claim(ctx.label, "z-central", not failing, labels=list(ctx.datum.labels), failing=failing)


def check_center(ctx: CyclotomicContext, A: Optional[FiniteDimAlgebra] = None) -> Tuple[List[ClaimReport], int, int]:
    """Z(A) against the image of the symmetric elements; returns the reports and both dimensions."""
    A = A or ctx.structure_constants()
    center = center_compute(A)
    image = ctx.symmetric_image(A)
    dim_image = rank_of(image, A.dim, A.domain)
    contained = all(A.is_central(v) for v in image)
    reports = [
        claim(ctx.label, "symmetric-image-central", contained, dim_sym_image=dim_image),
        claim(
            ctx.label, "center-equals-symmetric-image", contained and dim_image == len(center),
            dim_center=len(center), dim_sym_image=dim_image,
        ),
    ]
    logger.info(f"{ctx.label}: dim Z = {len(center)}, symmetric image {dim_image}")
    return reports, len(center), dim_image


def check_trace(ctx: CyclotomicContext, A: Optional[FiniteDimAlgebra] = None) -> List[ClaimReport]:
    """A nondegenerate trace of degree -d_{Lambda,beta}, and the top degree it forces."""
    A = A or ctx.structure_constants()
    d = d_lambda_beta(ctx.datum, ctx.lam, ctx.beta)
    if not A.dim:
        return [observation(ctx.label, "symmetrizing-form", dim=0, d_lambda_beta=d)]
    forms, flags = trace_form_solve(A, d)
    if len(forms) > 1:
        logger.warning(f"{ctx.label}: {len(forms)}-dimensional space of trace forms in degree {d}")
    nondegenerate = any(flags)
    top = max(A.degrees)
    reports = [
        claim(ctx.label, "symmetrizing-form", nondegenerate, d_lambda_beta=d, forms=len(forms), nondegenerate=sum(flags)),
    ]
    # a form of degree -d pairs A_j with A_{d-j}; the top degree is d only without negative degrees
    witness = dict(top_degree=top, d_lambda_beta=d, graded_dimension=graded_dimension(A))
    if min(A.degrees) >= 0:
        reports.append(claim(ctx.label, "top-degree", not nondegenerate or top == d, **witness))
    else:
        reports.append(observation(ctx.label, "top-degree", **witness))
    return reports


def annihilator_check(ctx: CyclotomicContext, i) -> List[ClaimReport]:
    """
    Ann(z(i, beta)) in R^{Lambda+Lambda_i}_beta against the kernel of the
    projection onto R^Lambda_beta, and the trace identity between the two levels.
    """
    big = ctx.raised(i)
    A_big, A = big.structure_constants(), ctx.structure_constants()
    z = big.to_vector(ctx.klr.z_element(i))
    annihilator = A_big.annihilator(z)
    images = [ctx.to_vector(big.element_of(key)) for key in big.full_basis().elements]
    kernel = nullspace_of(transpose(images, A.dim, A.domain), A_big.dim, A.domain)
    equal = same_span(annihilator, kernel, A_big.dim, A.domain)
    reports = [claim(
        ctx.label, "annihilator-equals-kernel", equal, i=i,
        dim_annihilator=len(annihilator), dim_kernel=len(kernel), dim_raised=A_big.dim,
        kernel_in_annihilator=span_contains(annihilator, kernel, A_big.dim, A.domain),
    )]
    reports.append(trace_identity_check(ctx, big, A, A_big, z, images))
    return reports


def trace_identity_check(ctx, big, A, A_big, z, images) -> ClaimReport:
    """
    t_big(a z) = c t(p(a)) for every basis element a of the raised quotient,
    for one pair of trace forms that are both nonzero.

    The pair is reported by its coefficients in the two trace-form bases, and c
    compares the forms after scaling each to 1 on the first basis element it sees.
    """
    require_same_domain(A, A_big)
    d, d_big = (d_lambda_beta(c.datum, c.lam, c.beta) for c in (ctx, big))
    small_forms, big_forms = A.trace_forms(d), A_big.trace_forms(d_big)
    if not small_forms or not big_forms:
        return claim(ctx.label, "trace-identity", A.dim == 0, forms=len(small_forms), raised_forms=len(big_forms))
    rows = []
    for j in range(A_big.dim):
        az = A_big.multiply(A_big.basis_vector(j), z)
        rows.append([A_big.evaluate(t, az) for t in big_forms] + [-A.evaluate(t, images[j]) for t in small_forms])
    r = len(big_forms)
    witness = {"forms": len(small_forms), "raised_forms": r}
    pair = solving_pair(nullspace_of(rows, r + len(small_forms), A.domain), r)
    if pair is None:
        return claim(ctx.label, "trace-identity", False, **witness)
    t_big = combine(A_big, big_forms, pair[:r])
    t = combine(A, small_forms, pair[r:])
    # t_big(a z) = t(p(a)) with t_big = s_big N_big and t = s N, so c = s / s_big
    s_big, s = (next(v for v in form if v) for form in (t_big, t))
    witness.update(
        raised_coefficients=[str(v) for v in pair[:r]],
        coefficients=[str(v) for v in pair[r:]],
        c=str(s / s_big),
    )
    # a pair that only solves zero equations says nothing
    nontrivial = any(any(row[:r]) for row in rows) and any(any(row[r:]) for row in rows)
    return claim(ctx.label, "trace-identity", nontrivial, **witness)


def solving_pair(solutions: List[List], r: int) -> Optional[List]:
    """A vector of the span whose first r and last coordinates are both nonzero, if there is one."""
    with_big = next((v for v in solutions if any(v[:r])), None)
    with_small = next((v for v in solutions if any(v[r:])), None)
    if with_big is None or with_small is None:
        return None
    for v in (with_big, with_small):
        if any(v[:r]) and any(v[r:]):
            return v
    # with_big has a zero small part and with_small a zero big part
    return [a + b for a, b in zip(with_big, with_small)]


def combine(A: FiniteDimAlgebra, forms: List[List], coefficients: Sequence) -> List:
    out = A.zero()
    for c, form in zip(coefficients, forms):
        if c:
            out = A.add(out, form, c)
    return out
