"""
Permutations of [0, n) and the order combinatorics used by the cocenter basis.

A permutation ``w`` is the tuple of its images ``(w(0), ..., w(n-1))`` and
composition is ``(uv)(k) = u(v(k))``. The simple transposition ``s_k`` swaps
``k`` and ``k+1``, so ``w s_k`` swaps positions ``k, k+1`` of the tuple and
``s_k w`` swaps the values ``k, k+1``. A word ``(b_1, ..., b_m)`` stands for
``s_{b_1} ... s_{b_m}``.

Sequences are acted on by ``(w.nu)_k = nu_{w^{-1}(k)}``.

>>> act(from_word((1, 2, 1, 0), 4), (1, 4, 3, 2))
(4, 2, 3, 1)
>>> preferred_word((2, 1, 0))
(0, 1, 0)
"""
from __future__ import annotations

import collections
import functools
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, NewType, Optional, Sequence, Tuple

from klr_lab.core.errors import PreconditionError

logger = logging.getLogger(__name__)

# one-line notation, 0-based
Permutation = NewType('Permutation', tuple)

# a word in the simple transpositions, 0-based indices
Word = Tuple[int, ...]

Label = Hashable


def identity(n: int) -> Permutation:
    """
    >>> identity(3)
    (0, 1, 2)
    """
    return Permutation(tuple(range(n)))


def is_identity(w: Sequence[int]) -> bool:
    return all(w[k] == k for k in range(len(w)))


def is_permutation(w: Sequence[int]) -> bool:
    return sorted(w) == list(range(len(w)))


def compose(u: Sequence[int], v: Sequence[int]) -> Permutation:
    """(uv)(k) = u(v(k))."""
    return Permutation(tuple(u[v[k]] for k in range(len(v))))


def inverse(w: Sequence[int]) -> Permutation:
    inv = [0] * len(w)
    for k, image in enumerate(w):
        inv[image] = k
    return Permutation(tuple(inv))


def swap_positions(seq: Sequence, k: int) -> tuple:
    """Exchange entries k and k+1; for a permutation this is w s_k, for a sequence s_k.nu."""
    out = list(seq)
    out[k], out[k + 1] = out[k + 1], out[k]
    return tuple(out)


def swap_values(w: Sequence[int], i: int) -> Permutation:
    """s_i w."""
    return Permutation(tuple(i + 1 if x == i else i if x == i + 1 else x for x in w))


def from_word(word: Sequence[int], n: int) -> Permutation:
    w = list(range(n))
    for b in word:
        w[b], w[b + 1] = w[b + 1], w[b]
    return Permutation(tuple(w))


def length(w: Sequence[int]) -> int:
    """Number of inversions."""
    n = len(w)
    return sum(1 for k in range(n) for t in range(k + 1, n) if w[k] > w[t])


def inversions(w: Sequence[int]) -> List[Tuple[int, int]]:
    """Pairs k < t with w(k) > w(t)."""
    n = len(w)
    return [(k, t) for k in range(n) for t in range(k + 1, n) if w[k] > w[t]]


def left_descents(w: Sequence[int]) -> List[int]:
    """The i with l(s_i w) < l(w), i.e. i+1 appears before i in the tuple."""
    pos = inverse(w)
    return [i for i in range(len(w) - 1) if pos[i] > pos[i + 1]]


@functools.lru_cache(maxsize=None)
def preferred_word(w: Permutation) -> Word:
    """
    The lexicographically least reduced word (ShortLex normal form).

    >>> preferred_word((1, 2, 0))
    (0, 1)
    >>> preferred_word((0, 1, 2))
    ()
    """
    word = []
    w = tuple(w)
    while not is_identity(w):
        i = left_descents(w)[0]
        word.append(i)
        w = swap_values(w, i)
    return tuple(word)


def is_reduced(word: Sequence[int], n: int) -> bool:
    return length(from_word(word, n)) == len(word)


def act(w: Sequence[int], seq: Sequence) -> tuple:
    """(w.nu)_k = nu_{w^{-1}(k)}."""
    out = [None] * len(seq)
    for k, image in enumerate(w):
        out[image] = seq[k]
    return tuple(out)


def act_word(word: Sequence[int], seq: Sequence) -> tuple:
    """s_{b_1} ... s_{b_m} . nu, applying the rightmost letter first."""
    out = list(seq)
    for b in reversed(word):
        out[b], out[b + 1] = out[b + 1], out[b]
    return tuple(out)


@functools.lru_cache(maxsize=None)
def all_permutations(n: int) -> Tuple[Permutation, ...]:
    return tuple(Permutation(p) for p in itertools.permutations(range(n)))


@functools.lru_cache(maxsize=None)
def right_factors(u: Permutation) -> frozenset:
    """All v with u = u_1 v and l(u) = l(u_1) + l(v), including e and u."""
    factors = {tuple(u)}
    for i in left_descents(u):
        factors |= right_factors(swap_values(u, i))
    return frozenset(factors)


def braid_neighbours(word: Word) -> List[Tuple[int, str, Word]]:
    """Words one commutation or one braid move away: (position, kind, new word)."""
    out = []
    for p in range(len(word) - 1):
        a, b = word[p], word[p + 1]
        if abs(a - b) >= 2:
            out.append((p, "commute", word[:p] + (b, a) + word[p + 2:]))
        if p + 2 < len(word) and word[p + 2] == a and abs(a - b) == 1:
            out.append((p, "braid", word[:p] + (b, a, b) + word[p + 3:]))
    return out


@functools.lru_cache(maxsize=None)
def braid_steps(w: Permutation) -> Dict[Word, Tuple[int, str]]:
    """
    BFS tree over the reduced words of w rooted at the preferred word.

    Maps each reduced word to the move that takes it one step closer to the
    preferred word. Both move kinds are involutions, so the tree edge found
    from the root side is the step back towards it.
    """
    root = preferred_word(w)
    steps: Dict[Word, Tuple[int, str]] = {}
    seen = {root}
    queue = collections.deque([root])
    while queue:
        word = queue.popleft()
        for p, kind, nxt in braid_neighbours(word):
            if nxt not in seen:
                seen.add(nxt)
                steps[nxt] = (p, kind)
                queue.append(nxt)
    logger.debug(f"{len(seen)} reduced words for {w}")
    return steps


def braid_path(word: Word, n: int) -> List[Tuple[int, str]]:
    """Moves turning a reduced word into the preferred word of the same permutation."""
    w = from_word(word, n)
    steps = braid_steps(w)
    path = []
    current = tuple(word)
    while current != preferred_word(w):
        p, kind = steps[current]
        path.append((p, kind))
        current = apply_move(current, p, kind)
    return path


def apply_move(word: Word, p: int, kind: str) -> Word:
    if kind == "commute":
        return word[:p] + (word[p + 1], word[p]) + word[p + 2:]
    a, b = word[p], word[p + 1]
    return word[:p] + (b, a, b) + word[p + 3:]


def reduced_words(w: Permutation) -> List[Word]:
    """Every reduced word of w (Matsumoto: the braid graph is connected)."""
    return sorted([preferred_word(w)] + list(braid_steps(w).keys()))


def interval_cycle(k: int, t: int, n: int) -> Permutation:
    """s_k s_{k+1} ... s_t."""
    return from_word(tuple(range(k, t + 1)), n)


def interval_bounds(u: Sequence[int]) -> Optional[Tuple[int, int]]:
    """(k, t) when u = s_k ... s_t, else None."""
    moved = [p for p in range(len(u)) if u[p] != p]
    if not moved:
        return None
    k, last = moved[0], moved[-1]
    if tuple(u) == interval_cycle(k, last - 1, len(u)):
        return k, last - 1
    return None


@dataclass(frozen=True)
class GammaOrder:
    """
    Total order on the rearrangements of a sequence gamma with distinct entries.

    Labels are ordered by their position in gamma, and mu precedes nu when the
    permutation carrying gamma to mu precedes the one carrying gamma to nu in
    the lexicographic order on image tuples.
    """
    gamma: tuple
    rank: Dict[Label, int] = field(init=False, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if len(set(self.gamma)) != len(self.gamma):
            raise PreconditionError(f"gamma {self.gamma} has repeated labels")
        object.__setattr__(self, "rank", {label: p for p, label in enumerate(self.gamma)})

    def label_less(self, i: Label, j: Label) -> bool:
        return self.rank[i] < self.rank[j]

    def permutation_of(self, mu: Sequence) -> Permutation:
        """The u with u.gamma = mu, i.e. u(j) = position of gamma_j in mu."""
        if sorted(mu, key=self._label_key) != list(self.gamma):
            raise PreconditionError(f"{tuple(mu)} is not a rearrangement of {self.gamma}")
        where = {label: p for p, label in enumerate(mu)}
        return Permutation(tuple(where[label] for label in self.gamma))

    def key(self, mu: Sequence) -> Permutation:
        return self.permutation_of(mu)

    def _label_key(self, label):
        if label not in self.rank:
            raise PreconditionError(f"label {label} does not occur in gamma {self.gamma}")
        return self.rank[label]

    def rotated_to(self, i: Label) -> "GammaOrder":
        """Same relative order with i moved to the front."""
        rest = tuple(label for label in self.gamma if label != i)
        return GammaOrder((i,) + rest)


def gamma_less(mu: Sequence, nu: Sequence, order: GammaOrder) -> bool:
    """
    >>> gamma_less((1, 4, 3, 2), (4, 2, 3, 1), GammaOrder((1, 2, 3, 4)))
    True
    """
    return order.key(mu) < order.key(nu)


def gamma_less_prose(mu: Sequence, nu: Sequence, order: GammaOrder) -> bool:
    """
    Position-by-label description of the same order: the first label of gamma
    that sits at different positions in mu and nu sits earlier in mu.
    """
    for label in order.gamma:
        p, q = list(mu).index(label), list(nu).index(label)
        if p != q:
            return p < q
    return False


def _require_raising(u: Sequence[int], nu: Sequence, order: GammaOrder):
    if is_identity(u):
        raise PreconditionError("indecomposability is undefined for the identity")
    if not gamma_less(nu, act(u, nu), order):
        raise PreconditionError(f"{tuple(nu)} does not precede {act(u, nu)} for u={tuple(u)}")


def is_indecomposable(u: Sequence[int], nu: Sequence, order: GammaOrder) -> bool:
    """
    Closed form: u = s_k ... s_t with k the largest s <= t such that nu_s
    precedes nu_{t+1}.
    """
    _require_raising(u, nu, order)
    bounds = interval_bounds(u)
    if bounds is None:
        return False
    k, t = bounds
    below = [s for s in range(t + 1) if order.label_less(nu[s], nu[t + 1])]
    return bool(below) and max(below) == k


def is_indecomposable_by_search(u: Sequence[int], nu: Sequence, order: GammaOrder) -> bool:
    """Search every length-additive factorisation u = u_1 u_2 with u_1 != e."""
    _require_raising(u, nu, order)
    u = tuple(u)
    return not any(
        v != u and gamma_less(nu, act(v, nu), order)
        for v in right_factors(Permutation(u))
    )


def enumerate_indecomposables(nu: Sequence, order: GammaOrder) -> List[Permutation]:
    """At most one indecomposable u = s_k ... s_t per t."""
    n = len(nu)
    out = []
    for t in range(n - 1):
        below = [s for s in range(t + 1) if order.label_less(nu[s], nu[t + 1])]
        if not below:
            continue
        u = interval_cycle(max(below), t, n)
        if gamma_less(nu, act(u, nu), order):
            out.append(u)
    return out


def decompose(u: Sequence[int], nu: Sequence, order: GammaOrder) -> Tuple[Permutation, Permutation]:
    """
    A decomposition u = u_1 u_2 relative to nu.

    Among all valid u_2 the longest wins, then the one with the smallest
    preferred word.
    """
    _require_raising(u, nu, order)
    u = Permutation(tuple(u))
    candidates = [
        Permutation(v) for v in right_factors(u)
        if v != u and gamma_less(nu, act(v, nu), order)
    ]
    if not candidates:
        raise PreconditionError(f"{tuple(u)} is indecomposable relative to {tuple(nu)}")
    u2 = min(candidates, key=lambda v: (-length(v), preferred_word(v)))
    u1 = compose(u, inverse(u2))
    return u1, u2
