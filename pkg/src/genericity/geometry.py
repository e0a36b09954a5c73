"""Isometric actions with a base point, and the geometric certificates for
rigid words: displacement, translation length, classification, the
geodesic-words test and the elliptic/loxodromic bounds for rigid elements.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Sequence

from .automaton import Alphabet, Automaton, AutomatonError, Word, is_rigid_word

DEFAULT_HORIZON = 50
DEFAULT_KMAX = 5


class Isometry(str, enum.Enum):
    ELLIPTIC = "elliptic"
    LOXODROMIC = "loxodromic"
    UNDETERMINED = "undetermined"

    def __str__(self):
        return self.value


class Verdict(str, enum.Enum):
    CERTIFIED_LOXODROMIC = "certified-loxodromic"
    INCONCLUSIVE = "inconclusive"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ActionBackend:
    """A group acting by isometries on a metric space with base point P.

    ``letters[x]`` is the group element of letter ``x``; ``exact_classifier``,
    when present, maps an element to its isometry type without looking at
    orbits.
    """

    name: str
    alphabet: Alphabet
    base_point: Any
    letters: Sequence[Any]
    compose: Callable[[Any, Any], Any]
    identity: Any
    act: Callable[[Any, Any], Any]
    dist: Callable[[Any, Any], float]
    inverse: Callable[[Any], Any] | None = None
    exact_classifier: Callable[[Any], Isometry] | None = field(default=None, compare=False)

    def evaluate(self, w: Sequence[int]) -> Any:
        g = self.identity
        for x in w:
            if not 0 <= x < len(self.letters):
                raise AutomatonError(f"letter {x!r} not in the {self.name} alphabet")
            g = self.compose(g, self.letters[x])
        return g

    def power(self, g: Any, n: int) -> Any:
        if n < 0:
            if self.inverse is None:
                raise ValueError(f"{self.name} backend has no inverses")
            g, n = self.inverse(g), -n
        result, base = self.identity, g
        while n:
            if n & 1:
                result = self.compose(result, base)
            base = self.compose(base, base)
            n >>= 1
        return result

    def point(self, g: Any) -> Any:
        return self.act(g, self.base_point)

    @cached_property
    def c(self):
        """Largest displacement of the base point by a single letter."""
        return max(self.dist(self.base_point, self.point(g)) for g in self.letters)


@dataclass(frozen=True)
class IsometryClass:
    tag: Isometry
    translation_length: float
    evidence: tuple = ()


def displacement(b: ActionBackend, w: Sequence[int]):
    return b.dist(b.base_point, b.point(b.evaluate(w)))


def orbit_displacements(b: ActionBackend, w: Sequence[int], n_max: int) -> list:
    """d(P, w^n P) for n = 1..n_max."""
    g = b.evaluate(w)
    out, h = [], b.identity
    for _ in range(n_max):
        h = b.compose(h, g)
        out.append(b.dist(b.base_point, b.point(h)))
    return out


def translation_length_estimate(b: ActionBackend, w: Sequence[int], n: int) -> float:
    if n < 1:
        raise ValueError("horizon must be positive")
    g = b.power(b.evaluate(w), n)
    return b.dist(b.base_point, b.point(g)) / n


def classify(
    b: ActionBackend,
    w: Sequence[int],
    n: int = DEFAULT_HORIZON,
    rho: float | None = None,
    alpha: float | None = None,
) -> IsometryClass:
    """Isometry type of the element of ``w``.

    Backends with an exact classifier are trusted.  Otherwise the orbit of P
    up to ``n`` decides: Elliptic if it stays within ``rho`` (default 3c),
    Loxodromic if d(P, w^k P) >= alpha * k for every k <= n (default
    alpha = c/10), Undetermined in between.
    """
    if b.exact_classifier is not None:
        tag = b.exact_classifier(b.evaluate(w))
        if tag is Isometry.LOXODROMIC:
            # the orbit is only needed as evidence for bounded orbits
            return IsometryClass(tag, translation_length_estimate(b, w, n))
        evidence = tuple(orbit_displacements(b, w, n))
        return IsometryClass(tag, evidence[-1] / n if evidence else 0.0, evidence)
    evidence = tuple(orbit_displacements(b, w, n))
    estimate = evidence[-1] / n if evidence else 0.0
    rho = 3 * b.c if rho is None else rho
    alpha = b.c / 10 if alpha is None else alpha
    if max(evidence, default=0) <= rho:
        return IsometryClass(Isometry.ELLIPTIC, estimate, evidence)
    if alpha > 0 and all(d >= alpha * k for k, d in enumerate(evidence, start=1)):
        return IsometryClass(Isometry.LOXODROMIC, estimate, evidence)
    return IsometryClass(Isometry.UNDETERMINED, estimate, evidence)


def prefix_points(b: ActionBackend, w: Sequence[int]) -> list:
    """Points p_k = (first k letters of w) . P for k = 0..|w|."""
    points = [b.base_point]
    g = b.identity
    for x in w:
        g = b.compose(g, b.letters[x])
        points.append(b.point(g))
    return points


def check_geodesic_words(b: ActionBackend, w: Sequence[int], radius) -> bool:
    """Slack-triangle test: d(p_i,p_m) + d(p_m,p_j) <= d(p_i,p_j) + 2R for i < m < j.

    Every orbit point within R of a geodesic between p_i and p_j passes it,
    so a failure refutes the geodesic words hypothesis for ``w``.
    """
    points = prefix_points(b, w)
    n = len(points)
    d = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d[i][j] = d[j][i] = b.dist(points[i], points[j])
    return all(
        d[i][m] + d[m][j] <= d[i][j] + 2 * radius
        for i in range(n)
        for j in range(i + 2, n)
        for m in range(i + 1, j)
    )


def subword_displacements(b: ActionBackend, w: Sequence[int]):
    """Yield (i, j, d(P, w[i:j] . P)) for every nonempty contiguous subword."""
    for i in range(len(w)):
        g = b.identity
        for j in range(i, len(w)):
            g = b.compose(g, b.letters[w[j]])
            yield i, j + 1, b.dist(b.base_point, b.point(g))


def certify_loxodromic_rigid(b: ActionBackend, aut: Automaton, w: Sequence[int], radius) -> Verdict:
    """A rigid word with a subword moving P by more than 5R acts loxodromically.

    Rigid words never act parabolically, and an elliptic rigid word has all
    subword displacements at most 5R.
    """
    if not w or not is_rigid_word(aut, w):
        return Verdict.INCONCLUSIVE
    for _, _, d in subword_displacements(b, w):
        if d > 5 * radius:
            return Verdict.CERTIFIED_LOXODROMIC
    return Verdict.INCONCLUSIVE


@dataclass
class RigidGeometryReport:
    word: Word
    tag: Isometry
    checked: list[str] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_rigid_geometry(
    b: ActionBackend,
    aut: Automaton,
    w: Sequence[int],
    radius,
    k_max: int = DEFAULT_KMAX,
    n: int = DEFAULT_HORIZON,
) -> RigidGeometryReport:
    """Check the consequences of rigidity for the action of ``w``.

    Elliptic: d(P, w^k P) <= 3R for k <= n, and every subword moves P by
    at most 5R.  Loxodromic: P lies R-close to the axis in the necessary form
    d(w^-k P, P) + d(P, w^k P) <= d(w^-k P, w^k P) + 2R for k <= k_max
    (without inverses, the triple P, w^k P, w^2k P is used instead).
    """
    w = tuple(w)
    if not w or not is_rigid_word(aut, w):
        raise AutomatonError(f"{aut.format(w)!r} is not a rigid word")
    cls = classify(b, w, n)
    report = RigidGeometryReport(w, cls.tag)
    label = aut.format(w)
    if cls.tag is Isometry.ELLIPTIC:
        report.checked += ["orbit<=3R", "subwords<=5R"]
        for k, d in enumerate(cls.evidence, start=1):
            if d > 3 * radius:
                report.violations.append(f"{label}: d(P, w^{k} P) = {d} > 3R")
        for i, j, d in subword_displacements(b, w):
            if d > 5 * radius:
                report.violations.append(f"{label}: subword [{i}:{j}] moves P by {d} > 5R")
    elif cls.tag is Isometry.LOXODROMIC:
        report.checked.append("axis<=R")
        g = b.evaluate(w)
        P = b.base_point
        for k in range(1, k_max + 1):
            if b.inverse is not None:
                left = b.point(b.power(g, -k))
                right = b.point(b.power(g, k))
                lhs = b.dist(left, P) + b.dist(P, right)
                rhs = b.dist(left, right) + 2 * radius
            else:
                mid = b.point(b.power(g, k))
                far = b.point(b.power(g, 2 * k))
                lhs = b.dist(P, mid) + b.dist(mid, far)
                rhs = b.dist(P, far) + 2 * radius
            if lhs > rhs:
                report.violations.append(f"{label}: axis condition fails at k={k} ({lhs} > {rhs})")
    return report
