"""
Exact sparse polynomials in x_1, ..., x_n for the KLR engine.

Polynomials are sympy ``PolyElement`` objects (a dict from exponent tuple to a
coefficient in QQ or GF(p)). Positions are 0-based: ``s_k`` swaps ``x_k`` and
``x_{k+1}`` and a permutation ``w`` (a tuple of images) acts by ``x_k -> x_{w[k]}``.

>>> R = polynomial_ring(2)
>>> x1, x2 = R.gens
>>> demazure(x1**2, 0)
-x1 - x2
"""
from __future__ import annotations

import functools
import itertools
import logging
from fractions import Fraction
from typing import Dict, Iterator, List, Sequence, Tuple

from sympy import isprime
from sympy.polys.domains import GF, QQ
from sympy.polys.orderings import lex
from sympy.polys.polyerrors import ExactQuotientFailed
from sympy.polys.rings import PolyElement, PolyRing

from klr_lab.core.errors import ConfigError, RewriteError

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]


def scalar_domain(field: str = "QQ", prime: int = 0):
    """The ground field: exact rationals, or F_p for a prime p."""
    if field.upper() == "QQ":
        return QQ
    if field.upper() == "GF":
        if prime < 2 or not isprime(prime):
            raise ConfigError(f"GF needs a prime modulus, got {prime}")
        return GF(prime)
    raise ConfigError(f"Unknown scalar field '{field}' (expected QQ or GF)")


def to_scalar(domain, value) -> object:
    """Convert an int, Fraction or 'num/den' string into a domain element."""
    value = Fraction(value)
    return domain(value.numerator) / domain(value.denominator)


def scalar_parts(domain, c) -> Tuple[int, int]:
    """Numerator/denominator pair of a domain element, for JSON output."""
    if domain.is_QQ:
        return int(c.numerator), int(c.denominator)
    return int(c), 1


@functools.lru_cache(maxsize=None)
def polynomial_ring(n: int, domain=QQ) -> PolyRing:
    if n < 1:
        raise ConfigError("polynomial rings need at least one variable")
    names = ",".join(f"x{k + 1}" for k in range(n))
    return PolyRing(names, domain, lex)


def monomial(ring: PolyRing, exponents: Sequence[int], coeff=None) -> PolyElement:
    coeff = ring.domain.one if coeff is None else coeff
    return ring.term_new(tuple(exponents), coeff)


def bivariate(ring: PolyRing, terms: Dict[Tuple[int, int], Fraction], k: int, l: int) -> PolyElement:
    """sum c_{p,q} x_k^p x_l^q for a coefficient map {(p, q): c}."""
    out = ring.zero
    for (p, q), c in terms.items():
        exps = [0] * ring.ngens
        exps[k] += p
        exps[l] += q
        out += monomial(ring, exps, to_scalar(ring.domain, c))
    return out


def univariate(ring: PolyRing, coeffs: Dict[int, Fraction], k: int) -> PolyElement:
    """sum c_m x_k^m for a coefficient map {m: c}."""
    out = ring.zero
    for m, c in coeffs.items():
        exps = [0] * ring.ngens
        exps[k] = m
        out += monomial(ring, exps, to_scalar(ring.domain, c))
    return out


def perm_action(w: Sequence[int], f: PolyElement) -> PolyElement:
    """Substitute x_k -> x_{w[k]}."""
    ring = f.ring
    out = {}
    for m, c in f.items():
        new = [0] * len(m)
        for k, e in enumerate(m):
            new[w[k]] = e
        out[tuple(new)] = c
    return ring.from_dict(out)


def swap_action(f: PolyElement, k: int) -> PolyElement:
    """s_k(f): exchange x_k and x_{k+1}."""
    out = {}
    for m, c in f.items():
        new = list(m)
        new[k], new[k + 1] = new[k + 1], new[k]
        out[tuple(new)] = c
    return f.ring.from_dict(out)


def exact_quotient(num: PolyElement, den: PolyElement) -> PolyElement:
    """num / den, which must divide exactly."""
    if not num:
        return num.ring.zero
    try:
        return num.exquo(den)
    except ExactQuotientFailed as e:
        raise RewriteError(f"inexact division ({num}) / ({den})") from e


def demazure(f: PolyElement, k: int) -> PolyElement:
    """The divided difference (f - s_k f) / (x_{k+1} - x_k)."""
    diff = f - swap_action(f, k)
    if not diff:
        return f.ring.zero
    gens = f.ring.gens
    return exact_quotient(diff, gens[k + 1] - gens[k])


def degree_in(f: PolyElement, k: int) -> int:
    """Degree in x_k, -1 for the zero polynomial."""
    if not f:
        return -1
    return max(m[k] for m in f.keys())


def leading_coefficient_in(f: PolyElement, k: int) -> PolyElement:
    """Coefficient of the top power of x_k, as a polynomial in the other variables."""
    return f.coeff_wrt(k, degree_in(f, k))


def antilex_key(m: Monomial) -> Monomial:
    # x^b < x^c iff b_k < c_k at the last position where they differ
    return tuple(reversed(m))


def sorted_terms(f: PolyElement) -> List[Tuple[Monomial, object]]:
    """Terms ordered from the anti-lexicographic leading term down."""
    return sorted(f.items(), key=lambda mc: antilex_key(mc[0]), reverse=True)


def serialize_poly(f: PolyElement) -> List[list]:
    domain = f.ring.domain
    return [[list(m), *scalar_parts(domain, c)] for m, c in sorted_terms(f)]


def deserialize_poly(ring: PolyRing, terms: List[list]) -> PolyElement:
    out = ring.zero
    for exps, num, den in terms:
        out += monomial(ring, exps, to_scalar(ring.domain, Fraction(num, den)))
    return out


def exponents_of_weight(weights: Sequence[int], total: int) -> Iterator[Monomial]:
    """All a in N^n with sum a_k * weights[k] == total (weights positive)."""
    n = len(weights)
    if total < 0:
        return
    if n == 0:
        if total == 0:
            yield ()
        return
    w = weights[-1]
    for last in range(total // w + 1):
        for head in exponents_of_weight(weights[:-1], total - last * w):
            yield head + (last,)


def exponents_below(caps: Sequence[int]) -> Iterator[Monomial]:
    """All a with 0 <= a_k < caps[k], in lexicographic order."""
    if any(c <= 0 for c in caps):
        return iter(())
    return itertools.product(*(range(c) for c in caps))
