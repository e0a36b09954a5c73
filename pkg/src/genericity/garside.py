"""Positive braid monoid B_n+ with Garside's generators.

A permutation braid is stored as its permutation in one-line notation: the
Artin generator sigma_i swaps positions i and i+1, so ``213`` is sigma_1 and
``321`` is the half twist Delta in B_3.  Products of permutation braids whose
lengths add compose as permutations, ``perm(xy) = perm(x) o perm(y)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .automaton import Alphabet, Automaton, AutomatonError
from . import counting

MIN_STRANDS, MAX_STRANDS = 3, 5
# Left-weighting compares the starting set of y with the finishing set of x.
# "standard": starting set = left descents, finishing set = right descents of
# the one-line permutation; "mirrored" swaps the two.  Only the standard
# convention reproduces the greedy normal form (see tests).
CONVENTIONS = ("standard", "mirrored")


@dataclass(frozen=True, order=True)
class PermutationBraid:
    perm: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(1, len(self.perm) + 1)):
            raise ValueError(f"{self.perm} is not a permutation")

    @classmethod
    def parse(cls, text: str) -> PermutationBraid:
        return cls(tuple(int(ch) for ch in text.strip()))

    @property
    def n(self) -> int:
        return len(self.perm)

    @property
    def is_identity(self) -> bool:
        return all(v == i + 1 for i, v in enumerate(self.perm))

    @property
    def is_delta(self) -> bool:
        return self.perm == tuple(range(self.n, 0, -1))

    @property
    def length(self) -> int:
        p = self.perm
        return sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])

    def inverse(self) -> PermutationBraid:
        inv = [0] * self.n
        for i, v in enumerate(self.perm):
            inv[v - 1] = i + 1
        return PermutationBraid(tuple(inv))

    def right_descents(self) -> frozenset[int]:
        """{i : sigma_i right-divides the braid} = {i : perm(i) > perm(i+1)}."""
        p = self.perm
        return frozenset(i + 1 for i in range(self.n - 1) if p[i] > p[i + 1])

    def left_descents(self) -> frozenset[int]:
        return self.inverse().right_descents()

    def times_generator(self, i: int) -> PermutationBraid:
        """x . sigma_i (a permutation braid when i is not a right descent)."""
        p = list(self.perm)
        p[i - 1], p[i] = p[i], p[i - 1]
        return PermutationBraid(tuple(p))

    def strip_generator(self, i: int) -> PermutationBraid:
        """sigma_i^-1 . y (a permutation braid when i is a left descent)."""
        swap = {i: i + 1, i + 1: i}
        return PermutationBraid(tuple(swap.get(v, v) for v in self.perm))

    def reduced_word(self) -> tuple[int, ...]:
        """Lexicographically smallest word in the Artin generators."""
        word = []
        y = self
        while not y.is_identity:
            i = min(y.left_descents())
            word.append(i)
            y = y.strip_generator(i)
        return tuple(word)

    def __str__(self):
        return "".join(str(v) for v in self.perm)


GarsideNormalForm = tuple[PermutationBraid, ...]


def identity(n: int) -> PermutationBraid:
    return PermutationBraid(tuple(range(1, n + 1)))


def delta(n: int) -> PermutationBraid:
    return PermutationBraid(tuple(range(n, 0, -1)))


def artin(i: int, n: int) -> PermutationBraid:
    if not 1 <= i < n:
        raise ValueError(f"sigma_{i} does not exist in B_{n}")
    return identity(n).times_generator(i)


@lru_cache(maxsize=None)
def permutation_braids(n: int) -> tuple[PermutationBraid, ...]:
    """The n! - 1 nontrivial permutation braids, shortest first, Delta last."""
    braids = [PermutationBraid(p) for p in itertools.permutations(range(1, n + 1))]
    braids = [b for b in braids if not b.is_identity]
    return tuple(sorted(braids, key=lambda b: (b.length, b.reduced_word())))


def starting_set(y: PermutationBraid, convention: str = "standard") -> frozenset[int]:
    _check_convention(convention)
    return y.left_descents() if convention == "standard" else y.right_descents()


def finishing_set(x: PermutationBraid, convention: str = "standard") -> frozenset[int]:
    _check_convention(convention)
    return x.right_descents() if convention == "standard" else x.left_descents()


def _check_convention(convention: str) -> None:
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")


def is_left_weighted(x: PermutationBraid, y: PermutationBraid, convention: str = "standard") -> bool:
    return starting_set(y, convention) <= finishing_set(x, convention)


def _slide(x: PermutationBraid, y: PermutationBraid) -> tuple[PermutationBraid, PermutationBraid]:
    # move generators from the front of y to the back of x until (x, y) is left-weighted
    while True:
        movable = y.left_descents() - x.right_descents()
        if not movable:
            return x, y
        i = min(movable)
        x, y = x.times_generator(i), y.strip_generator(i)


def normal_form(factors: Iterable[PermutationBraid]) -> GarsideNormalForm:
    """Left-weighted factorization of the product of ``factors``.

    Adjacent pairs are slid until every pair is left-weighted; identity
    factors are dropped.
    """
    nf = [f for f in factors if not f.is_identity]
    if len({f.n for f in nf}) > 1:
        raise ValueError("factors have different numbers of strands")
    changed = True
    while changed:
        changed = False
        for j in range(len(nf) - 1):
            x, y = _slide(nf[j], nf[j + 1])
            if (x, y) != (nf[j], nf[j + 1]):
                nf[j], nf[j + 1] = x, y
                changed = True
        if changed:
            nf = [f for f in nf if not f.is_identity]
    return tuple(nf)


def from_artin_word(word: Sequence[int], n: int) -> GarsideNormalForm:
    return normal_form(artin(i, n) for i in word)


def _check_strands(n: int) -> None:
    if not MIN_STRANDS <= n <= MAX_STRANDS:
        raise AutomatonError(f"braid automata are built for {MIN_STRANDS} <= n <= {MAX_STRANDS}, got {n}")


@lru_cache(maxsize=None)
def build_automaton(n: int, convention: str = "standard") -> Automaton:
    """One accepting state per nontrivial permutation braid, plus start and fail.

    Reading g from state x leads to state g if (x, g) is left-weighted and to
    fail otherwise; from the start state every g leads to g.
    """
    _check_strands(n)
    _check_convention(convention)
    braids = permutation_braids(n)
    alphabet = Alphabet(tuple(str(b) for b in braids))
    # letter i is braids[i]; its state is i + 2
    transitions = [(0, g, g + 2) for g in range(len(braids))]
    for x, bx in enumerate(braids):
        for g, bg in enumerate(braids):
            if is_left_weighted(bx, bg, convention):
                transitions.append((x + 2, g, g + 2))
    names = ["start", "fail"] + [str(b) for b in braids]
    return Automaton.from_transitions(
        alphabet, len(braids) + 2, 0, 1, range(2, len(braids) + 2), transitions, names
    )


def word_to_factors(word: Sequence[int], n: int) -> GarsideNormalForm:
    """Letters of a braid-automaton word as permutation braids."""
    braids = permutation_braids(n)
    return tuple(braids[x] for x in word)


def factors_to_word(factors: Sequence[PermutationBraid]) -> tuple[int, ...]:
    if not factors:
        return ()
    braids = permutation_braids(factors[0].n)
    return tuple(braids.index(f) for f in factors)


def rigid_census(n: int, l: int) -> tuple[int, int]:
    """(sphere size, number of rigid normal forms) at canonical length ``l``."""
    aut = build_automaton(n)
    if l == 0:
        return 0, 0
    return counting.count_sphere(aut, l), counting.rigid_sphere_count(aut, l)


@dataclass(frozen=True)
class BallBound:
    n: int
    l: int
    sphere: int
    rigid: int

    @property
    def sphere_proportion(self) -> Fraction:
        return Fraction(self.rigid, self.sphere) if self.sphere else Fraction(0)

    @property
    def ball_bound(self) -> Fraction:
        """Lower bound on the proportion in the Cayley ball of B_n: each x in
        the sphere accounts for Delta^-k x, k = 0..l, and even k share the
        type of x, so at least half the sphere proportion survives."""
        return self.sphere_proportion / 2

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "l": self.l,
            "sphere": self.sphere,
            "rigid": self.rigid,
            "sphere_proportion": str(self.sphere_proportion),
            "ball_bound": str(self.ball_bound),
            "ball_bound_decimal": round(float(self.ball_bound), 12),
        }


def ball_bound_report(n: int, l: int) -> BallBound:
    total, rigid = rigid_census(n, l)
    return BallBound(n, l, total, rigid)
