"""Exact word counts, growth rates, proportions, enumeration and sampling.

Counts are Python integers throughout.  Floating point is confined to
:class:`GrowthEstimate`.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .automaton import Automaton, AutomatonError, Word, is_rigid_word, run

POWER_TOL = 1e-12
POWER_MAX_ITER = 100_000


class EmptySphereError(ValueError):
    """A proportion was requested over an empty set of words."""


@dataclass(frozen=True)
class CountMatrix:
    """Letter-count matrix of an automaton restricted to ``states``.

    ``entries[i][j]`` is the number of letters taking ``states[i]`` to
    ``states[j]``.
    """

    states: tuple[int, ...]
    entries: tuple[tuple[int, ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.states)

    def index(self, state: int) -> int:
        return self.states.index(state)

    def __matmul__(self, other: CountMatrix) -> CountMatrix:
        if self.states != other.states:
            raise ValueError("state index maps differ")
        cols = list(zip(*other.entries)) if other.entries else []
        entries = tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in self.entries
        )
        return CountMatrix(self.states, entries)

    def __pow__(self, l: int) -> CountMatrix:
        n = self.dimension
        result = CountMatrix(self.states, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))
        base = self
        while l:
            if l & 1:
                result = result @ base
            base = base @ base
            l >>= 1
        return result

    def is_positive(self) -> bool:
        return all(v > 0 for row in self.entries for v in row)

    def as_float(self) -> np.ndarray:
        return np.array(self.entries, dtype=float).reshape(self.dimension, self.dimension)


@dataclass(frozen=True)
class GrowthEstimate:
    rate: float
    residual: float
    iterations: int
    tol: float = POWER_TOL

    @property
    def converged(self) -> bool:
        return self.residual <= self.tol


def transition_matrix(aut: Automaton, states: Iterable[int]) -> CountMatrix:
    states = tuple(sorted(states))
    if aut.start in states or aut.fail in states:
        raise AutomatonError("count matrices exclude the start and fail states")
    pos = {s: i for i, s in enumerate(states)}
    rows = []
    for s in states:
        row = [0] * len(states)
        for t in aut.delta[s]:
            if t in pos:
                row[pos[t]] += 1
        rows.append(tuple(row))
    return CountMatrix(states, tuple(rows))


def _cyclic_components(m: CountMatrix) -> list[list[int]]:
    """Strongly connected components of the support of ``m`` that contain a cycle."""
    n = m.dimension
    succ = [[j for j in range(n) if m.entries[i][j]] for i in range(n)]
    reach = []
    for i in range(n):
        seen, stack = set(), list(succ[i])
        while stack:
            j = stack.pop()
            if j not in seen:
                seen.add(j)
                stack.extend(succ[j])
        reach.append(seen)
    comps, placed = [], set()
    for i in range(n):
        if i in placed or i not in reach[i]:
            continue
        comp = sorted(j for j in reach[i] if i in reach[j])
        placed.update(comp)
        comps.append(comp)
    return comps


def _power_iteration(a: np.ndarray, tol: float, max_iter: int) -> tuple[float, float, int]:
    x = np.ones(a.shape[0])
    rate, residual = 0.0, np.inf
    for it in range(1, max_iter + 1):
        y = a @ x
        rate = float(np.max(np.abs(y)))
        if rate == 0.0:
            return 0.0, 0.0, it
        y /= rate
        residual = float(np.max(np.abs(y - x)))
        x = y
        if residual <= tol:
            return rate, residual, it
    return rate, residual, max_iter


def _irreducible_rate(a: np.ndarray, tol: float, max_iter: int) -> tuple[float, float, int]:
    rate, residual, iters = _power_iteration(a, tol, max_iter)
    if residual <= tol:
        return rate, residual, iters
    # periodic: a + I is primitive with Perron root exactly one larger
    shifted, res2, iters2 = _power_iteration(a + np.eye(a.shape[0]), tol, max_iter)
    if res2 < residual:
        return shifted - 1.0, res2, iters + iters2
    return rate, residual, iters + iters2


def growth_rate(m: CountMatrix, tol: float = POWER_TOL, max_iter: int = POWER_MAX_ITER) -> GrowthEstimate:
    """Dominant eigenvalue of ``m`` by normalized power iteration.

    The spectral radius is the largest one among the strongly connected
    components, each of which is iterated on its own: a reducible matrix
    can carry Jordan blocks on which plain iteration converges only like
    1/n.  A matrix without cycles has rate 0.
    """
    comps = _cyclic_components(m)
    if not comps:
        return GrowthEstimate(0.0, 0.0, 0, tol)
    a = m.as_float()
    best = (0.0, 0.0)
    iterations = 0
    for comp in comps:
        rate, residual, iters = _irreducible_rate(a[np.ix_(comp, comp)], tol, max_iter)
        iterations += iters
        best = max(best, (rate, residual))
    return GrowthEstimate(best[0], best[1], iterations, tol)


def restricted_growth_rate(aut: Automaton, states: Iterable[int]) -> float:
    return growth_rate(transition_matrix(aut, states)).rate


def automaton_growth_rate(aut: Automaton) -> GrowthEstimate:
    """Growth rate of the whole automaton (all states but start and fail)."""
    return growth_rate(transition_matrix(aut, aut.inner_states))


# -- exact counting -------------------------------------------------------------


def _step(aut: Automaton, vec: Sequence[int]) -> list[int]:
    out = [0] * aut.n_states
    fail = aut.fail
    for s, c in enumerate(vec):
        if c:
            for t in aut.delta[s]:
                if t != fail:
                    out[t] += c
    return out


def forward_counts(aut: Automaton, state: int, steps: int) -> list[int]:
    """Number of length-``steps`` paths from ``state`` to each state (fail excluded)."""
    vec = [0] * aut.n_states
    vec[state] = 1
    for _ in range(steps):
        vec = _step(aut, vec)
    vec[aut.fail] = 0
    return vec


@lru_cache(maxsize=64)
def _accept_table(aut: Automaton, m: int) -> tuple[tuple[int, ...], ...]:
    # table[j][s] = number of words of length j leading from s into accept
    row = tuple(int(s in aut.accept) for s in range(aut.n_states))
    table = [row]
    for _ in range(m):
        prev = table[-1]
        table.append(tuple(sum(prev[t] for t in aut.delta[s]) for s in range(aut.n_states)))
    return tuple(table)


def paths_to_accept(aut: Automaton, state: int, length: int) -> int:
    return _accept_table(aut, length)[length][state]


def count_sphere(aut: Automaton, l: int) -> int:
    """Exact number of accepted words of length ``l``."""
    if l < 0:
        raise ValueError("length must be nonnegative")
    vec = forward_counts(aut, aut.start, l)
    return sum(vec[s] for s in aut.accept)


def count_ball(aut: Automaton, l: int) -> int:
    """Elements of normal-form length at most ``l``; the leading 1 is the identity."""
    if l < 0:
        raise ValueError("length must be nonnegative")
    total = 1
    vec = [0] * aut.n_states
    vec[aut.start] = 1
    for _ in range(l):
        vec = _step(aut, vec)
        total += sum(vec[s] for s in aut.accept)
    return total


def _prefix_state(aut: Automaton, p: Sequence[int], l: int) -> int:
    if l < len(p):
        raise ValueError(f"length {l} shorter than prefix of length {len(p)}")
    return run(aut, aut.start, p)


def prefix_count(aut: Automaton, p: Sequence[int], l: int) -> int:
    state = _prefix_state(aut, p, l)
    if state == aut.fail:
        return 0
    return paths_to_accept(aut, state, l - len(p))


def prefix_proportion(aut: Automaton, p: Sequence[int], l: int) -> Fraction:
    """Fraction of accepted words of length ``l`` that start with ``p``."""
    num = prefix_count(aut, p, l)
    den = count_sphere(aut, l)
    if den == 0:
        raise EmptySphereError(f"no accepted words of length {l}")
    return Fraction(num, den)


def end_state_proportion(aut: Automaton, p: Sequence[int], target: int, l: int) -> Fraction:
    """Among accepted length-``l`` words with prefix ``p``, the fraction ending at ``target``."""
    if target not in aut.accept:
        raise AutomatonError(f"target state {target} is not accepting")
    state = _prefix_state(aut, p, l)
    if state == aut.fail:
        raise EmptySphereError("prefix is rejected")
    vec = forward_counts(aut, state, l - len(p))
    den = sum(vec[s] for s in aut.accept)
    if den == 0:
        raise EmptySphereError(f"no accepted words of length {l} with this prefix")
    return Fraction(vec[target], den)


def transformation_counts(aut: Automaton, l: int) -> Counter:
    """Words of length ``l`` grouped by their state map s -> run(s, w).

    The number of distinct maps is bounded by the transition monoid, which is
    small for the automata used here, so this scales with ``l`` linearly.
    """
    identity = tuple(range(aut.n_states))
    counts: Counter = Counter({identity: 1})
    delta = aut.delta
    k = len(aut.alphabet)
    for _ in range(l):
        nxt: Counter = Counter()
        for f, c in counts.items():
            for x in range(k):
                nxt[tuple(delta[s][x] for s in f)] += c
        counts = nxt
    return counts


def _map_is_rigid(aut: Automaton, f: Sequence[int]) -> bool:
    state = f[aut.start]
    seen = set()
    while state in aut.accept:
        if state in seen:
            return True
        seen.add(state)
        state = f[state]
    return False


def rigid_sphere_count(aut: Automaton, l: int, method: str = "monoid") -> int:
    """Exact number of rigid accepted words of length ``l``.

    ``method="enumerate"`` tests every word of the sphere with
    :func:`is_rigid_word`; ``method="monoid"`` aggregates words by the state
    map they induce, which decides rigidity identically and avoids the
    exponential enumeration.
    """
    if l == 0:
        return 0
    if method == "enumerate":
        return sum(1 for w in enumerate_sphere(aut, l) if is_rigid_word(aut, w))
    if method != "monoid":
        raise ValueError(f"unknown method {method!r}")
    return sum(c for f, c in transformation_counts(aut, l).items() if _map_is_rigid(aut, f))


# -- factor avoidance -----------------------------------------------------------


def pattern_automaton(alphabet_size: int, pattern: Sequence[int]) -> list[list[int]]:
    """Failure-function matcher: ``table[k][x]`` is the matched length after reading x.

    State ``len(pattern)`` means the pattern has just occurred.
    """
    m = len(pattern)
    if m == 0:
        raise ValueError("empty pattern")
    border = [0] * (m + 1)
    k = 0
    for i in range(1, m):
        while k and pattern[i] != pattern[k]:
            k = border[k]
        if pattern[i] == pattern[k]:
            k += 1
        border[i + 1] = k
    table = [[0] * alphabet_size for _ in range(m + 1)]
    for state in range(m + 1):
        for x in range(alphabet_size):
            if state < m and pattern[state] == x:
                table[state][x] = state + 1
            elif state == 0:
                table[state][x] = 0
            else:
                table[state][x] = table[border[state]][x]
    return table


def avoidance_automaton(aut: Automaton, pattern: Sequence[int]) -> Automaton:
    """Product recognizer of accepted words that do not contain ``pattern`` as a factor."""
    pattern = tuple(pattern)
    for x in pattern:
        if not 0 <= x < len(aut.alphabet):
            raise AutomatonError(f"letter {x!r} not in alphabet")
    m = len(pattern)
    kmp = pattern_automaton(len(aut.alphabet), pattern)
    origin = (aut.start, 0)
    index = {origin: 0, "fail": 1}
    order = [origin]
    transitions = []
    i = 0
    while i < len(order):
        q, k = order[i]
        for x in range(len(aut.alphabet)):
            q2, k2 = aut.delta[q][x], kmp[k][x]
            if q2 == aut.fail or k2 == m:
                continue
            if (q2, k2) not in index:
                index[(q2, k2)] = len(index)
                order.append((q2, k2))
            transitions.append((index[(q, k)], x, index[(q2, k2)]))
        i += 1
    accept = [index[(q, k)] for (q, k) in order if q in aut.accept]
    names = ["start", "fail"] + [f"{aut.name(q)}|{k}" for (q, k) in order[1:]]
    return Automaton.from_transitions(aut.alphabet, len(index), 0, 1, accept, transitions, names)


def avoidance_growth_rate(aut: Automaton, pattern: Sequence[int]) -> GrowthEstimate:
    if len(pattern) == 0:
        raise ValueError("empty pattern")
    return automaton_growth_rate(avoidance_automaton(aut, pattern))


# -- enumeration and sampling -------------------------------------------------


def enumerate_sphere(aut: Automaton, l: int, prefix: Sequence[int] = ()) -> Iterator[Word]:
    """Accepted words of length ``l`` (optionally with a fixed prefix), lexicographically."""
    if l <= 0 or l < len(prefix):
        return
    table = _accept_table(aut, l)
    state = run(aut, aut.start, prefix)
    if state == aut.fail or table[l - len(prefix)][state] == 0:
        return
    k = len(aut.alphabet)
    delta = aut.delta
    word = list(prefix)

    def walk(s: int) -> Iterator[Word]:
        remaining = l - len(word) - 1
        if remaining < 0:
            yield tuple(word)
            return
        row = table[remaining]
        for x in range(k):
            t = delta[s][x]
            if row[t]:
                word.append(x)
                yield from walk(t)
                word.pop()

    yield from walk(state)


def sample_uniform(aut: Automaton, l: int, seed: int | str | random.Random | None = None) -> Word:
    """One exactly uniform accepted word of length ``l``.

    Backward path counts weight each letter choice, and big-integer
    ``randrange`` keeps the draw exact.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    table = _accept_table(aut, l)
    total = table[l][aut.start] if l > 0 else 0
    if total == 0:
        raise EmptySphereError(f"no accepted words of length {l}")
    state = aut.start
    word = []
    for remaining in range(l - 1, -1, -1):
        r = rng.randrange(table[remaining + 1][state])
        for x, t in enumerate(aut.delta[state]):
            weight = table[remaining][t]
            if r < weight:
                word.append(x)
                state = t
                break
            r -= weight
    return tuple(word)


def sample_many(aut: Automaton, l: int, count: int, seed: int | str | None = None) -> list[Word]:
    rng = random.Random(seed)
    return [sample_uniform(aut, l, rng) for _ in range(count)]

