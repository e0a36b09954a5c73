"""PSL(2,Z) acting on the Farey graph.

Letters are ``A``, ``a`` (inverse of A), ``B`` and ``b`` (inverse of B) with

    A = [[1, 1], [0, 1]],    B = [[1, 0], [-1, 1]].

Normal forms are the reduced words avoiding eight banned triples; the
recognizer is the factor-avoidance automaton of that list.  Distances in the
Farey graph are exact and computed on the ladder of Farey triangles crossed
by the hyperbolic geodesic between the two vertices.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .automaton import Alphabet, Automaton, AutomatonError, Word
from .geometry import ActionBackend, Isometry

ALPHABET = Alphabet(("A", "a", "B", "b"))
INVERSE = (1, 0, 3, 2)
BANNED_TRIPLES = ("ABA", "aba", "BAB", "bab", "ABa", "BAb", "abA", "baB")
# suffix-state names; X¬A means "any letter but A, or no letter"
_STATE_LABELS = {
    "A": "X¬B A",
    "a": "X¬b a",
    "B": "X¬A B",
    "b": "X¬a b",
}


@dataclass(frozen=True)
class ProjMatrix:
    """Element of PSL(2,Z): an integer matrix of determinant 1 up to sign.

    Construct through :meth:`make`, which picks the representative whose
    first nonzero entry is positive.
    """

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self} is not 1")
        first = next(v for v in (self.a, self.b, self.c, self.d) if v)
        if first < 0:
            raise ValueError("use ProjMatrix.make to normalize the sign")

    @classmethod
    def make(cls, a: int, b: int, c: int, d: int) -> ProjMatrix:
        first = next((v for v in (a, b, c, d) if v), 0)
        if first < 0:
            a, b, c, d = -a, -b, -c, -d
        return cls(a, b, c, d)

    def __matmul__(self, other: ProjMatrix) -> ProjMatrix:
        return ProjMatrix.make(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> ProjMatrix:
        return ProjMatrix.make(self.d, -self.b, -self.c, self.a)

    def __pow__(self, n: int) -> ProjMatrix:
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = IDENTITY
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    @property
    def trace(self) -> int:
        return self.a + self.d

    def apply(self, v: FareyVertex) -> FareyVertex:
        """Möbius action x -> (ax + b)/(cx + d) on a reduced fraction."""
        return FareyVertex.make(self.a * v.p + self.b * v.q, self.c * v.p + self.d * v.q)

    def __str__(self):
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


IDENTITY = ProjMatrix(1, 0, 0, 1)
GENERATORS = (
    ProjMatrix(1, 1, 0, 1),  # A
    ProjMatrix(1, -1, 0, 1),  # a
    ProjMatrix(1, 0, -1, 1),  # B
    ProjMatrix(1, 0, 1, 1),  # b
)


@dataclass(frozen=True, order=True)
class FareyVertex:
    """Reduced fraction p/q with q >= 0; ``1/0`` is the vertex at infinity."""

    p: int
    q: int

    def __post_init__(self):
        if self.q < 0 or math.gcd(self.p, self.q) != 1 or (self.q == 0 and self.p != 1):
            raise ValueError(f"{self.p}/{self.q} is not a normalized Farey vertex")

    @classmethod
    def make(cls, p: int, q: int) -> FareyVertex:
        if p == 0 and q == 0:
            raise ValueError("0/0 is not a vertex")
        g = math.gcd(p, q)
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        return cls(p, q)

    @classmethod
    def parse(cls, text: str) -> FareyVertex:
        try:
            if "/" in text:
                p, q = text.split("/")
                return cls.make(int(p), int(q))
            return cls.make(int(text), 1)
        except ValueError as exc:
            raise ValueError(f"cannot parse Farey vertex {text!r}: {exc}") from None

    @property
    def height(self) -> int:
        return abs(self.p) + self.q

    def __str__(self):
        return f"{self.p}/{self.q}"


ZERO = FareyVertex(0, 1)
INFINITY = FareyVertex(1, 0)


# -- normal forms ---------------------------------------------------------------


def _avoidance_dfa(alphabet: Alphabet, banned: list[Word], labels: dict[Word, str]) -> Automaton:
    """Recognizer of words with no banned factor; states are the longest
    suffix that is a proper prefix of some banned word."""
    prefixes = {()}
    for w in banned:
        for i in range(1, len(w)):
            prefixes.add(w[:i])
    banned_set = set(banned)

    def advance(u: Word, x: int) -> Word | None:
        v = u + (x,)
        for i in range(len(v)):
            if v[i:] in banned_set:
                return None
        for i in range(len(v) + 1):
            if v[i:] in prefixes:
                return v[i:]
        return ()

    order: list[Word] = sorted(prefixes - {()}, key=lambda u: (len(u), u))
    index = {u: i + 2 for i, u in enumerate(order)}
    transitions = []
    for u in [()] + order:
        src = 0 if u == () else index[u]
        for x in range(len(alphabet)):
            v = advance(u, x)
            if v is None:
                continue
            if v == ():
                raise AutomatonError("banned list must make every letter a pattern prefix")
            transitions.append((src, x, index[v]))
    names = ["start", "fail"] + [labels.get(u, alphabet.format(u)) for u in order]
    accept = range(2, len(order) + 2)
    return Automaton.from_transitions(alphabet, len(order) + 2, 0, 1, accept, transitions, names)


def banned_words() -> list[Word]:
    pairs = [(x, INVERSE[x]) for x in range(4)]
    triples = [ALPHABET.parse(t) for t in BANNED_TRIPLES]
    return pairs + triples


def build_automaton() -> Automaton:
    """Normal-form recognizer: reduced words avoiding the eight banned triples.

    Inverse pairs are banned alongside the triples; without them a word and
    its free reduction would both be accepted.
    """
    labels = {ALPHABET.parse(k): v for k, v in _STATE_LABELS.items()}
    return _avoidance_dfa(ALPHABET, banned_words(), labels)


def evaluate(w: Word) -> ProjMatrix:
    m = IDENTITY
    for x in w:
        if not 0 <= x < 4:
            raise AutomatonError(f"letter {x!r} not in PSL(2,Z) alphabet")
        m = m @ GENERATORS[x]
    return m


def classify_exact(m: ProjMatrix) -> Isometry:
    """Loxodromic iff |trace| > 2.  Finite-order and parabolic elements fix a
    Farey vertex or permute a bounded set, so they act elliptically."""
    return Isometry.LOXODROMIC if abs(m.trace) > 2 else Isometry.ELLIPTIC


# -- Farey graph ----------------------------------------------------------------


def farey_adjacent(u: FareyVertex, v: FareyVertex) -> bool:
    if u == v:
        raise ValueError("adjacency of a vertex with itself")
    return abs(u.p * v.q - u.q * v.p) == 1


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        k, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - k * x1
        y0, y1 = y1, y0 - k * y1
    return a, x0, y0


def _moving_to_infinity(u: FareyVertex) -> ProjMatrix:
    """An element of PSL(2,Z) taking ``u`` to 1/0."""
    if u == INFINITY:
        return IDENTITY
    # solve p*s - q*r = 1, so [[p, r], [q, s]] sends 1/0 to p/q
    g, s, t = _ext_gcd(u.p, u.q)
    if g == -1:
        s, t = -s, -t
    r = -t
    return ProjMatrix.make(u.p, r, u.q, s).inverse()


def continued_fraction(x: Fraction) -> list[int]:
    """Regular continued fraction [a0; a1, ..., an] with an >= 2 when n >= 1."""
    p, q = x.numerator, x.denominator
    out = []
    while q:
        a, r = divmod(p, q)
        out.append(a)
        p, q = q, r
    return out


def _distance_from_infinity(x: FareyVertex) -> int:
    if x == INFINITY:
        return 0
    if x.q == 1:
        return 1
    cf = continued_fraction(Fraction(x.p, x.q))
    # convergents, with index k stored at k + 2 (C_-2 = 0/1, C_-1 = 1/0)
    ps, qs = [0, 1], [1, 0]
    for a in cf:
        ps.append(a * ps[-1] + ps[-2])
        qs.append(a * qs[-1] + qs[-2])
    # Fan k (k = 1..n) pivots on C_{k-1}; its rim runs from C_{k-2} to C_k
    # through (p_{k-2} + t p_{k-1}) / (q_{k-2} + t q_{k-1}), t = 0..a_k.
    # A geodesic never walks three rim edges in a row (two steps through the
    # pivot are shorter), so only the rim vertices near either end are kept.
    adj: dict[tuple[int, int], set[tuple[int, int]]] = {}

    def link(u, v):
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)

    for k in range(1, len(cf)):
        a = cf[k]
        pivot = (ps[k + 1], qs[k + 1])
        ts = sorted({t for t in (0, 1, 2, 3, a - 3, a - 2, a - 1, a) if 0 <= t <= a})
        rim = [(ps[k] + t * ps[k + 1], qs[k] + t * qs[k + 1]) for t in ts]
        for t, vertex in zip(ts, rim):
            link(pivot, vertex)
        for (t1, v1), (t2, v2) in zip(zip(ts, rim), zip(ts[1:], rim[1:])):
            if t2 == t1 + 1:
                link(v1, v2)
    source, target = (1, 0), (x.p, x.q)
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        if u == target:
            return dist[u]
        for v in adj.get(u, ()):
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    raise AssertionError(f"ladder for {x} does not connect 1/0 to it")


def farey_distance(u: FareyVertex, v: FareyVertex) -> int:
    """Exact graph distance in the Farey graph.

    ``u`` is moved to 1/0 by an element of PSL(2,Z); the distance from 1/0
    to the image of ``v`` is a shortest path in the ladder of fans given by
    the continued fraction of that image.
    """
    if u == v:
        return 0
    return _distance_from_infinity(_moving_to_infinity(u).apply(v))


class BoundTooSmall(RuntimeError):
    """The height-bounded search did not reach its target."""


def _neighbours(p: int, q: int, height: int):
    """Farey neighbours r/s of p/q (as normalized pairs) with |r| + s <= height.

    All solutions of p*s - q*r = 1 form the family (r0 + t p, s0 + t q); the
    size |r| + |s| is convex in t, so the sweep starts at its minimizer.
    """
    if q == 0:
        for n in range(-(height - 1), height):
            yield (n, 1)
        return
    g, s0, r0 = _ext_gcd(p, q)
    r0 = -r0
    if g < 0:
        s0, r0 = -s0, -r0
    guesses = [0, (-s0) // q, (-s0) // q + 1]
    if p:
        guesses += [(-r0) // p, (-r0) // p + 1]
    centre = min(guesses, key=lambda t: abs(r0 + t * p) + abs(s0 + t * q))
    for t, step in ((centre, 1), (centre - 1, -1)):
        while True:
            r, s = r0 + t * p, s0 + t * q
            if abs(r) + abs(s) > height:
                break
            if s < 0 or (s == 0 and r < 0):
                r, s = -r, -s
            yield (r, s)
            t += step


def farey_neighbours(v: FareyVertex, height: int):
    """Farey neighbours of ``v`` with |p| + q <= ``height``."""
    for r, s in _neighbours(v.p, v.q, height):
        yield FareyVertex(r, s)


def default_oracle_height(u: FareyVertex, v: FareyVertex) -> int:
    return max(u.height, v.height)


def farey_distance_oracle(
    u: FareyVertex, v: FareyVertex, height: int | None = None, escalate: bool = True
) -> int:
    """Distance by breadth-first search among vertices with |p| + q <= ``height``.

    Searches from both ends.  The result is an upper bound on the true
    distance and equals it once ``height`` is large enough.  If the endpoints
    are not connected within the bound, the bound is doubled and the search
    retried, or :class:`BoundTooSmall` is raised when ``escalate`` is false.
    """
    if height is None:
        height = default_oracle_height(u, v)
    while True:
        if max(u.height, v.height) <= height:
            found = _bidirectional_bfs((u.p, u.q), (v.p, v.q), height)
            if found is not None:
                return found
        if not escalate:
            raise BoundTooSmall(f"{u} and {v} not connected within height {height}")
        height *= 2


def farey_distances_from(u: FareyVertex, height: int) -> dict[FareyVertex, int]:
    """Breadth-first distances from ``u`` to every vertex with |p| + q <= ``height``."""
    if u.height > height:
        raise BoundTooSmall(f"{u} exceeds height {height}")
    dist = {(u.p, u.q): 0}
    queue = deque([(u.p, u.q)])
    while queue:
        x = queue.popleft()
        d = dist[x] + 1
        for y in _neighbours(x[0], x[1], height):
            if y not in dist:
                dist[y] = d
                queue.append(y)
    return {FareyVertex(p, q): d for (p, q), d in dist.items()}


def _bidirectional_bfs(u: tuple[int, int], v: tuple[int, int], height: int) -> int | None:
    if u == v:
        return 0
    dist = [{u: 0}, {v: 0}]
    frontier = [[u], [v]]
    while frontier[0] and frontier[1]:
        side = 0 if len(frontier[0]) <= len(frontier[1]) else 1
        here, there = dist[side], dist[1 - side]
        nxt = []
        best = None
        for x in frontier[side]:
            d = here[x] + 1
            for y in _neighbours(x[0], x[1], height):
                if y in here:
                    continue
                here[y] = d
                if y in there:
                    total = d + there[y]
                    best = total if best is None else min(best, total)
                nxt.append(y)
        if best is not None:
            return best
        frontier[side] = nxt
    return None


def backend() -> ActionBackend:
    """PSL(2,Z) on the Farey graph with base point 0/1."""
    return ActionBackend(
        name="psl2z",
        alphabet=ALPHABET,
        base_point=ZERO,
        letters=GENERATORS,
        compose=lambda g, h: g @ h,
        identity=IDENTITY,
        act=lambda g, x: g.apply(x),
        dist=farey_distance,
        inverse=lambda g: g.inverse(),
        exact_classifier=classify_exact,
    )
