# klr_lab/services/cocenter.py

"""
Cocenter of a multiplicity-free cyclotomic quotient.

Polynomial elements sum_nu f_nu e(nu) are dicts {nu: PolyElement}. Modulo
commutators and the cyclotomic ideal every such element is a combination of
the monomials x^a e(nu) in T_gamma, where a_t is capped by

    -sum_{l=k}^{t-1} a_{nu_t,nu_l}                        if k = k_{nu,t} exists
    <alpha_{nu_t}^vee, Lambda> - sum_{l<t} a_{nu_t,nu_l}   otherwise

and k_{nu,t} is the last position before t whose label precedes nu_t in gamma.
"""

import logging
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.polys.rings import PolyElement

from klr_lab.core.config import settings
from klr_lab.core.errors import PreconditionError, RewriteError
from klr_lab.models.report import ClaimReport, Verdict, claim
from klr_lab.services.algebra import FiniteDimAlgebra, rank_of, span_contains
from klr_lab.services.cartan import weight_label
from klr_lab.services.cyclotomic import CyclotomicContext, check_center
from klr_lab.services.polynomials import (
    antilex_key, degree_in, exponents_below, exponents_of_weight,
    monomial, perm_action,
)
from klr_lab.services.symgroup import (
    GammaOrder, Permutation, act, all_permutations, decompose, enumerate_indecomposables,
    gamma_less, identity, interval_bounds, interval_cycle, inverse, is_identity,
    is_indecomposable,
)

logger = logging.getLogger(__name__)

PolyVector = Dict[tuple, PolyElement]
CocenterKey = Tuple[Tuple[int, ...], tuple]


@dataclass
class CocenterBasis:
    """The monomials x^a e(nu) of T_gamma with the caps they obey."""
    gamma: GammaOrder
    elements: List[CocenterKey] = field(default_factory=list)
    caps: Dict[tuple, Tuple[int, ...]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, key: CocenterKey) -> bool:
        a, nu = key
        caps = self.caps.get(nu)
        return caps is not None and all(e < c for e, c in zip(a, caps))

    def to_json(self) -> dict:
        return {
            "gamma": list(self.gamma.gamma),
            "size": len(self.elements),
            "elements": [{"a": list(a), "nu": list(nu)} for a, nu in self.elements],
            "caps": [{"nu": list(nu), "caps": list(caps)} for nu, caps in self.caps.items()],
        }


@dataclass(frozen=True)
class CommutatorGenerator:
    """sign * (Q_{u,nu} f e(nu) - u.(Q_{u,nu} f e(nu)))."""
    u: Permutation
    nu: tuple
    f: PolyElement
    sign: int = 1

    def realize(self, ctx: CyclotomicContext) -> PolyVector:
        first = ctx.klr.q_u_nu(self.u, self.nu) * self.f * self.sign
        out = {self.nu: first}
        mu = act(self.u, self.nu)
        out[mu] = out.get(mu, ctx.ring.zero) - perm_action(self.u, first)
        return {nu: p for nu, p in out.items() if p}


def require_multiplicity_free(ctx: CyclotomicContext):
    if not ctx.beta.is_multiplicity_free:
        raise PreconditionError(f"{ctx.label}: the cocenter basis needs multiplicity-free beta")


def default_order(ctx: CyclotomicContext) -> GammaOrder:
    return GammaOrder(ctx.beta.content())


def add_vectors(*vectors: PolyVector) -> PolyVector:
    out: PolyVector = {}
    for vector in vectors:
        for nu, p in vector.items():
            total = out[nu] + p if nu in out else p
            if total:
                out[nu] = total
            else:
                out.pop(nu, None)
    return out


def scale_vector(vector: PolyVector, c) -> PolyVector:
    return {nu: p * c for nu, p in vector.items() if p * c}


# -- bounds -------------------------------------------------------------------


def k_nu_t(nu: Sequence, t: int, order: GammaOrder) -> Optional[int]:
    """Largest p < t with nu_p before nu_t in gamma, or None."""
    below = [p for p in range(t) if order.label_less(nu[p], nu[t])]
    return max(below) if below else None


def _pairing_sum(ctx: CyclotomicContext, nu: Sequence, t: int, positions) -> int:
    return sum(ctx.datum.a(nu[t], nu[l]) for l in positions)


def full_caps(ctx: CyclotomicContext, nu: Sequence) -> Tuple[int, ...]:
    """<alpha_{nu_t}^vee, Lambda> - sum_{l<t} a_{nu_t,nu_l}: the x_t-degree of g_{e,nu,t}."""
    return tuple(ctx.lam[nu[t]] - _pairing_sum(ctx, nu, t, range(t)) for t in range(len(nu)))


def cocenter_caps(ctx: CyclotomicContext, nu: Sequence, order: GammaOrder) -> Tuple[int, ...]:
    caps = []
    for t in range(len(nu)):
        k = k_nu_t(nu, t, order)
        if k is None:
            caps.append(ctx.lam[nu[t]] - _pairing_sum(ctx, nu, t, range(t)))
        else:
            caps.append(-_pairing_sum(ctx, nu, t, range(k, t)))
    return tuple(caps)


def d_bound(ctx: CyclotomicContext, nu: Sequence, u: Sequence[int], t: int, order: GammaOrder) -> int:
    """
    Cap on a_t for the commutator generators kept in the spanning basis, for
    u = s_p ... s_{q-1} (0-based: u moves positions p..q).
    """
    bounds = interval_bounds(u)
    if bounds is None:
        raise PreconditionError(f"u={tuple(u)} is not of the form s_p ... s_q-1")
    p, q = bounds[0], bounds[1] + 1
    lam = ctx.lam[nu[t]]
    if t > q:
        k = k_nu_t(nu, t, order)
        if k is None:
            return lam - _pairing_sum(ctx, nu, t, range(t))
        return -_pairing_sum(ctx, nu, t, range(k, t))
    if t == q:
        return lam - _pairing_sum(ctx, nu, t, range(p))
    return lam - _pairing_sum(ctx, nu, t, range(t))


def cocenter_basis(ctx: CyclotomicContext, order: Optional[GammaOrder] = None) -> CocenterBasis:
    require_multiplicity_free(ctx)
    order = order or default_order(ctx)
    basis = CocenterBasis(order)
    for nu in sorted(ctx.klr.sequences, key=order.key):
        caps = cocenter_caps(ctx, nu, order)
        basis.caps[nu] = caps
        basis.elements.extend((a, nu) for a in exponents_below(caps))
    logger.info(f"{ctx.label}: |T_gamma| = {len(basis)} for gamma={order.gamma}")
    return basis


# -- commutator generators ----------------------------------------------------


def commutator_generator(ctx: CyclotomicContext, u: Sequence[int], nu: Sequence, f: PolyElement) -> PolyVector:
    """P(u, nu, f) = Q_{u,nu} f e(nu) - u.(Q_{u,nu} f e(nu))."""
    return CommutatorGenerator(Permutation(tuple(u)), tuple(nu), f).realize(ctx)


def redind_expand(
    ctx: CyclotomicContext, u: Sequence[int], nu: Sequence, f: PolyElement, order: GammaOrder,
) -> List[CommutatorGenerator]:
    """
    Signed generators P(v, mu, g), each with v indecomposable relative to mu,
    summing to P(u, nu, f).
    """
    u, nu = Permutation(tuple(u)), tuple(nu)
    if is_identity(u):
        return []
    mu = act(u, nu)
    if not gamma_less(nu, mu, order):
        return [
            CommutatorGenerator(g.u, g.nu, g.f, -g.sign)
            for g in redind_expand(ctx, inverse(u), mu, perm_action(u, f), order)
        ]
    if is_indecomposable(u, nu, order):
        return [CommutatorGenerator(u, nu, f)]
    u1, u2 = decompose(u, nu, order)
    middle = act(u2, nu)
    q1 = perm_action(inverse(u2), ctx.klr.q_u_nu(u1, middle))
    q2 = ctx.klr.q_u_nu(u2, nu)
    return (
        redind_expand(ctx, u2, nu, q1 * f, order)
        + redind_expand(ctx, u1, middle, perm_action(u2, q2 * f), order)
    )


# -- reduction ----------------------------------------------------------------


def cocenter_reduce(
    ctx: CyclotomicContext, x: PolyVector, order: Optional[GammaOrder] = None,
) -> Dict[CocenterKey, object]:
    """
    Coordinates of a polynomial element in T_gamma modulo commutators and the
    cyclotomic ideal.

    The smallest monomial (earliest nu, then the anti-lexicographically largest
    exponent) is either kept, cancelled by g_{e,nu,t} x^b with t the last
    position at or above its full cap, or cancelled by P(v, nu, x^b) with
    v = s_k ... s_{t-1} for the last t at or above its cocenter cap. Every
    correction term is strictly larger, which bounds the loop.
    """
    require_multiplicity_free(ctx)
    order = order or default_order(ctx)
    work = {nu: p for nu, p in x.items() if p}
    caps = {nu: cocenter_caps(ctx, nu, order) for nu in ctx.klr.sequences}
    full = {nu: full_caps(ctx, nu) for nu in ctx.klr.sequences}
    out: Dict[CocenterKey, object] = {}
    steps = 0
    while work:
        steps += 1
        if steps > settings.REWRITE_GUARD:
            raise RewriteError(f"{ctx.label}: cocenter reduction exceeded {settings.REWRITE_GUARD} steps")
        nu = min(work, key=order.key)
        poly = work[nu]
        m = max(poly.keys(), key=antilex_key)
        c = poly[m]
        if all(e < cap for e, cap in zip(m, caps[nu])):
            out[(m, nu)] = out.get((m, nu), ctx.domain.zero) + c
            correction = {nu: monomial(ctx.ring, m, c)}
        else:
            over = [t for t in range(ctx.n) if m[t] >= full[nu][t]]
            if over:
                t = max(over)
                shift = list(m)
                shift[t] -= full[nu][t]
                g = ctx.g_generator(nu, t, nu)
                if degree_in(g, t) != full[nu][t]:
                    raise RewriteError(f"{ctx.label}: g_{t + 1} at {nu} has x{t + 1}-degree {degree_in(g, t)}")
                correction = {nu: monomial(ctx.ring, shift) * g}
            else:
                t = max(t for t in range(ctx.n) if m[t] >= caps[nu][t])
                k = k_nu_t(nu, t, order)
                shift = list(m)
                shift[t] -= caps[nu][t]
                v = interval_cycle(k, t - 1, ctx.n)
                correction = commutator_generator(ctx, v, nu, monomial(ctx.ring, shift))
            lead = correction[nu][m] if m in correction.get(nu, {}) else None
            if not lead:
                raise RewriteError(f"{ctx.label}: correction for x^{m} e{nu} misses its leading term")
            correction = scale_vector(correction, c / lead)
        work = add_vectors(work, scale_vector(correction, -ctx.domain.one))
    return {key: c for key, c in out.items() if c}


def to_klr(ctx: CyclotomicContext, x: PolyVector):
    e = identity(ctx.n)
    return ctx.klr.element({(e, nu): p for nu, p in x.items()})


# -- verifiers ----------------------------------------------------------------


def _dots(ctx: CyclotomicContext, max_dots: int):
    for total in range(max_dots + 1):
        yield from exponents_of_weight([1] * ctx.n, total)


def check_cocenter_basis(
    ctx: CyclotomicContext, order: GammaOrder, A: Optional[FiniteDimAlgebra] = None,
) -> Tuple[List[ClaimReport], CocenterBasis, int]:
    """|T_gamma| against dim A/[A, A], and independence of T_gamma modulo [A, A]."""
    A = A or ctx.structure_constants()
    basis = cocenter_basis(ctx, order)
    dim_cocenter = A.cocenter_dimension()
    commutators = A.commutator_rows()
    vectors = [ctx.to_vector(to_klr(ctx, {nu: monomial(ctx.ring, a)})) for a, nu in basis.elements]
    rank_comm = rank_of(commutators, A.dim, A.domain)
    independent = rank_of(commutators + vectors, A.dim, A.domain) == rank_comm + len(vectors)
    reports = [
        claim(ctx.label, "cocenter-basis-size", len(basis) == dim_cocenter,
              gamma=list(order.gamma), t_gamma_size=len(basis), dim_cocenter=dim_cocenter),
        claim(ctx.label, "cocenter-basis-independent", independent, t_gamma_size=len(basis)),
    ]
    return reports, basis, dim_cocenter


def check_reduce_consistent(
    ctx: CyclotomicContext, order: GammaOrder, A: Optional[FiniteDimAlgebra] = None,
    samples: Optional[int] = None, max_dots: int = 3,
) -> ClaimReport:
    """x - sum coords * T_gamma lies in [A, A] for random polynomial elements x."""
    A = A or ctx.structure_constants()
    rng = random.Random(settings.RANDOM_SEED)
    samples = samples or min(settings.ASSOCIATIVITY_SAMPLES, 16)
    failures = []
    commutators = A.commutator_rows()
    for _ in range(samples):
        x: PolyVector = {}
        for _ in range(3):
            nu = rng.choice(ctx.klr.sequences)
            exps = [rng.randint(0, max_dots) for _ in range(ctx.n)]
            x = add_vectors(x, {nu: monomial(ctx.ring, exps, ctx.domain(rng.randint(1, 5)))})
        coords = cocenter_reduce(ctx, x, order)
        residual = ctx.to_vector(to_klr(ctx, x))
        for (a, nu), c in coords.items():
            image = ctx.to_vector(to_klr(ctx, {nu: monomial(ctx.ring, a)}))
            residual = A.add(residual, image, -c)
        if any(residual) and not span_contains(commutators, [residual], A.dim, A.domain):
            failures.append({"x": {str(nu): str(p) for nu, p in x.items()}})
    return claim(ctx.label, "cocenter-reduce-consistent", not failures, samples=samples, failures=failures[:3])


def check_commutator_generators(ctx: CyclotomicContext, order: GammaOrder, max_dots: int = 2) -> List[ClaimReport]:
    """
    Indecomposable P(u, nu, x^a) reduce to zero; decomposable ones expand into
    indecomposable pieces with the same sum and also reduce to zero.
    """
    vanish, checked = [], 0
    for nu in ctx.klr.sequences:
        for u in enumerate_indecomposables(nu, order):
            for a in _dots(ctx, max_dots):
                checked += 1
                if cocenter_reduce(ctx, commutator_generator(ctx, u, nu, monomial(ctx.ring, a)), order):
                    vanish.append({"u": [i + 1 for i in u], "nu": nu, "a": a})
    expansion, expanded = [], 0
    for nu in ctx.klr.sequences:
        for u in all_permutations(ctx.n):
            if is_identity(u) or not gamma_less(nu, act(u, nu), order) or is_indecomposable(u, nu, order):
                continue
            f = ctx.ring.gens[0] + ctx.ring.one
            expanded += 1
            pieces = redind_expand(ctx, u, nu, f, order)
            total = add_vectors(*(g.realize(ctx) for g in pieces))
            target = commutator_generator(ctx, u, nu, f)
            pieces_ok = all(is_indecomposable(g.u, g.nu, order) for g in pieces)
            if total != target or not pieces_ok or cocenter_reduce(ctx, target, order):
                expansion.append({"u": [i + 1 for i in u], "nu": nu, "pieces": len(pieces)})
    return [
        claim(ctx.label, "commutator-generators-vanish", not vanish, instances=checked, failures=vanish[:5]),
        claim(ctx.label, "decomposition-identity", not expansion, instances=expanded, failures=expansion[:5]),
    ]


def check_leading_terms(ctx: CyclotomicContext, order: GammaOrder, max_dots: int = 4) -> ClaimReport:
    """
    Every monomial x^c e(nu) is exactly one of: in T_gamma, the leading term of
    an ideal element g_{e,nu,k} x^b, or the leading term of a kept commutator
    generator P(u, nu, x^a) with a_t < d_bound.
    """
    failures, checked = [], 0
    for nu in ctx.klr.sequences:
        caps = cocenter_caps(ctx, nu, order)
        full = full_caps(ctx, nu)
        generators = []
        for u in enumerate_indecomposables(nu, order):
            p, last = interval_bounds(u)
            q = last + 1
            generators.append((u, q, -_pairing_sum(ctx, nu, q, range(p, q))))
        for c in _dots(ctx, max_dots):
            checked += 1
            hits = int(all(e < cap for e, cap in zip(c, caps)))
            hits += sum(
                1 for k in range(ctx.n)
                if c[k] >= full[k] and all(c[s] < full[s] for s in range(k + 1, ctx.n))
            )
            for u, q, lead in generators:
                a = list(c)
                a[q] -= lead
                if a[q] >= 0 and all(a[t] < d_bound(ctx, nu, u, t, order) for t in range(ctx.n)):
                    hits += 1
            if hits != 1:
                failures.append({"nu": nu, "c": c, "hits": hits})
    return claim(ctx.label, "leading-term-partition", not failures, instances=checked, failures=failures[:5])


def iota_check(ctx: CyclotomicContext, order: GammaOrder, i) -> ClaimReport:
    """x^a e(nu) -> x^b e(nu), b_t = a_t + [nu_t = i], maps T_gamma into T_gamma at Lambda + Lambda_i."""
    require_multiplicity_free(ctx)
    if order.gamma[0] != i:
        raise PreconditionError(f"gamma must start with {i}, got {order.gamma}")
    raised = ctx.raised(i)
    source = cocenter_basis(ctx, order)
    target = cocenter_basis(raised, order)
    images, outside = set(), []
    for a, nu in source.elements:
        b = tuple(e + (1 if label == i else 0) for e, label in zip(a, nu))
        if (b, nu) not in target:
            outside.append({"a": a, "nu": nu, "b": b})
        images.add((b, nu))
    injective = not outside and len(images) == len(source)
    return claim(
        ctx.label, "iota-injective", injective, i=i, gamma=list(order.gamma),
        source_size=len(source), target_size=len(target), outside=outside[:5],
    )


def conjecture_verify(ctx: CyclotomicContext, order: Optional[GammaOrder] = None) -> Tuple[List[ClaimReport], Verdict]:
    """Center against the symmetric image, with the cocenter basis and the level-raising maps alongside."""
    require_multiplicity_free(ctx)
    order = order or default_order(ctx)
    A = ctx.structure_constants()
    reports, dim_center, dim_sym = check_center(ctx, A)
    cocenter_reports, basis, dim_cocenter = check_cocenter_basis(ctx, order, A)
    reports.extend(cocenter_reports)
    reports.append(claim(
        ctx.label, "center-cocenter-duality", dim_center == dim_cocenter,
        dim_center=dim_center, dim_cocenter=dim_cocenter,
    ))
    iota_reports = [iota_check(ctx, order.rotated_to(i), i) for i in ctx.beta.support]
    reports.extend(iota_reports)
    iota_injective = all(not r.failed for r in iota_reports)
    reports.append(conjecture_verify_via_iota(ctx, dim_center == dim_sym, iota_injective))
    verdict = Verdict(
        cartan=ctx.datum.name,
        lambda_={str(i): c for i, c in ctx.lam.coords},
        beta={str(i): k for i, k in ctx.beta.multiplicities},
        gamma=[str(label) for label in order.gamma],
        dim_center=dim_center,
        dim_sym_image=dim_sym,
        dim_cocenter=dim_cocenter,
        t_gamma_size=len(basis),
        iota_injective=iota_injective,
        verdict="surjective" if dim_center == dim_sym else "not-surjective",
    )
    logger.info(f"{ctx.label}: verdict {verdict.verdict} (Z={dim_center}, sym={dim_sym}, T={len(basis)})")
    return reports, verdict


def conjecture_verify_via_iota(ctx: CyclotomicContext, surjective: bool, iota_injective: bool) -> ClaimReport:
    """Surjectivity onto the center goes together with injectivity of the level-raising maps."""
    return claim(
        ctx.label, "iota-criterion-agrees", surjective == iota_injective,
        surjective=surjective, iota_injective=iota_injective, level=weight_label(ctx.lam),
    )
