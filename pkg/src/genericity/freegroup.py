"""Free group F_k acting on its Cayley tree.

Letter ``2g`` is the generator g and ``2g + 1`` its inverse, written with a
trailing prime: ``a``, ``a'``, ``b``, ``b'``, ...  The tree is 0-hyperbolic,
so the language of local geodesics is just the language of reduced words and
every question about rigidity and isometry type has a closed-form answer.
"""

from __future__ import annotations

import string
from typing import Sequence

from .automaton import Alphabet, Automaton, AutomatonError, Word
from .geometry import ActionBackend, Isometry

MAX_RANK = len(string.ascii_lowercase)


def _check_rank(k: int) -> None:
    if not 2 <= k <= MAX_RANK:
        raise AutomatonError(f"free group rank must be in 2..{MAX_RANK}, got {k}")


def alphabet(k: int) -> Alphabet:
    _check_rank(k)
    names = []
    for ch in string.ascii_lowercase[:k]:
        names += [ch, ch + "'"]
    return Alphabet(tuple(names))


def inv_letter(x: int) -> int:
    return x ^ 1


def inverse(w: Sequence[int]) -> Word:
    return tuple(inv_letter(x) for x in reversed(w))


def reduce(w: Sequence[int]) -> Word:
    """Free reduction, cancelling adjacent inverse pairs with a stack."""
    out: list[int] = []
    for x in w:
        if out and out[-1] == inv_letter(x):
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def is_reduced(w: Sequence[int]) -> bool:
    return all(w[i + 1] != inv_letter(w[i]) for i in range(len(w) - 1))


def is_cyclically_reduced(w: Sequence[int]) -> bool:
    return is_reduced(w) and (len(w) < 2 or w[0] != inv_letter(w[-1]))


def cyclically_reduce(w: Sequence[int]) -> tuple[Word, Word]:
    """Split a reduced word as conjugator . core . conjugator^-1."""
    w = reduce(w)
    i = 0
    while len(w) - 2 * i >= 2 and w[i] == inv_letter(w[len(w) - 1 - i]):
        i += 1
    return w[:i], w[i:len(w) - i]


def translation_length(w: Sequence[int]) -> int:
    """Translation length on the Cayley tree: the length of the cyclic core."""
    return len(cyclically_reduce(w)[1])


def classify_exact(w: Sequence[int]) -> Isometry:
    # F_k is torsion free: every nontrivial element has a nonempty core
    return Isometry.LOXODROMIC if translation_length(w) > 0 else Isometry.ELLIPTIC


def build_automaton(k: int) -> Automaton:
    """Reduced words: one state per last letter, inverse pairs go to fail."""
    alpha = alphabet(k)
    n = len(alpha)
    transitions = [(0, x, x + 2) for x in range(n)]
    transitions += [(s + 2, x, x + 2) for s in range(n) for x in range(n) if x != inv_letter(s)]
    names = ["start", "fail"] + list(alpha.names)
    return Automaton.from_transitions(alpha, n + 2, 0, 1, range(2, n + 2), transitions, names)


def tree_distance(u: Sequence[int], v: Sequence[int]) -> int:
    return len(reduce(inverse(u) + tuple(v)))


def tree_backend(k: int) -> ActionBackend:
    """F_k on its Cayley tree; points and group elements are reduced words."""
    alpha = alphabet(k)
    return ActionBackend(
        name=f"free:{k}",
        alphabet=alpha,
        base_point=(),
        letters=tuple((x,) for x in range(len(alpha))),
        compose=lambda g, h: reduce(g + h),
        identity=(),
        act=lambda g, p: reduce(g + p),
        dist=tree_distance,
        inverse=inverse,
        exact_classifier=classify_exact,
    )


def loxodromize(w: Sequence[int], k: int = 2) -> Word:
    """Nearby cyclically reduced word: ``w`` itself or ``w`` plus one letter.

    The appended letter avoids the inverses of the first and last letters,
    which leaves a choice as soon as there are at least four letters.
    """
    w = reduce(w)
    if not w:
        raise AutomatonError("loxodromize needs a nontrivial element")
    _check_rank(k)
    if max(w) >= 2 * k:
        raise AutomatonError(f"word uses letters outside F_{k}")
    if is_cyclically_reduced(w):
        return w
    banned = {inv_letter(w[0]), inv_letter(w[-1])}
    x = min(y for y in range(2 * k) if y not in banned)
    return w + (x,)
