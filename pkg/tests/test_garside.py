import itertools
from collections import Counter, deque
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genericity import automaton as au
from genericity import counting as C
from genericity import garside as GS
from genericity.garside import PermutationBraid as PB


def s(i, n=3):
    return GS.artin(i, n)


# -- braid monoid word problem by relation moves --------------------------------


def relation_class(word, n):
    """All positive words equal to ``word`` in B_n+ (same length, braid relations)."""
    word = tuple(word)
    seen = {word}
    queue = deque([word])
    while queue:
        w = queue.popleft()
        for k in range(len(w) - 1):
            a, b = w[k], w[k + 1]
            if abs(a - b) >= 2:
                v = w[:k] + (b, a) + w[k + 2 :]
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        for k in range(len(w) - 2):
            a, b, c = w[k : k + 3]
            if a == c and abs(a - b) == 1:
                v = w[:k] + (b, a, b) + w[k + 3 :]
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
    return frozenset(seen)


def block_braid(block, n):
    """The permutation braid spelled by ``block``, or None if strands cross twice."""
    x = GS.identity(n)
    for i in block:
        if i in x.right_descents():
            return None
        x = x.times_generator(i)
    return x


def all_factorizations(word, n):
    """Every factorization into nontrivial permutation braids of the element of ``word``."""
    found = set()
    for w in relation_class(word, n):
        L = len(w)
        for cuts in itertools.product((0, 1), repeat=max(L - 1, 0)):
            blocks, start = [], 0
            for k, c in enumerate(cuts, start=1):
                if c:
                    blocks.append(w[start:k])
                    start = k
            blocks.append(w[start:])
            factors = tuple(block_braid(b, n) for b in blocks)
            if all(f is not None for f in factors):
                found.add(factors)
    return found


def left_weighted_search(word, n, convention):
    return {
        f
        for f in all_factorizations(word, n)
        if all(GS.is_left_weighted(f[k], f[k + 1], convention) for k in range(len(f) - 1))
    }


def artin_words(n, max_len):
    for L in range(1, max_len + 1):
        yield from itertools.product(range(1, n), repeat=L)


# -- basics -----------------------------------------------------------------


def test_permutation_braid_basics():
    d = GS.delta(3)
    assert d.is_delta and d.length == 3 and str(d) == "321"
    assert PB.parse("213") == s(1)
    assert s(1).right_descents() == {1} == s(1).left_descents()
    x = PB.parse("231")
    assert x.length == 2
    assert x.reduced_word() == (1, 2)
    assert x.inverse() == PB.parse("312")
    with pytest.raises(ValueError):
        PB((1, 1, 2))
    with pytest.raises(ValueError):
        GS.artin(3, 3)


def test_generator_lists():
    for n in (3, 4, 5):
        braids = GS.permutation_braids(n)
        assert len(braids) == len(set(braids)) == len(list(itertools.permutations(range(n)))) - 1
        assert braids[0] == s(1, n) and braids[-1] == GS.delta(n)


def test_reduced_words_spell_their_braid():
    for n in (3, 4):
        for b in GS.permutation_braids(n):
            assert block_braid(b.reduced_word(), n) == b
            assert len(b.reduced_word()) == b.length


def test_left_weighting_examples():
    assert GS.is_left_weighted(s(1), s(1))
    assert not GS.is_left_weighted(s(1), s(2))
    for y in GS.permutation_braids(4):
        assert GS.is_left_weighted(GS.delta(4), y)
    assert GS.is_left_weighted(GS.delta(3), GS.delta(3))
    with pytest.raises(ValueError):
        GS.is_left_weighted(s(1), s(1), "sideways")


def test_normal_form_examples():
    assert GS.normal_form([s(1), s(2)]) == (PB.parse("231"),)
    d = GS.delta(3)
    assert GS.normal_form([d, s(1)]) == (d, s(1))
    assert GS.normal_form([]) == ()
    assert GS.from_artin_word([1, 2, 1, 1], 3) == (d, s(1))
    assert GS.normal_form([GS.identity(3), s(1)]) == (s(1),)
    with pytest.raises(ValueError):
        GS.normal_form([s(1), s(1, 4)])


# -- oracles ----------------------------------------------------------------


@pytest.mark.parametrize("n", [3, 4])
def test_normal_form_matches_left_weighted_search(n):
    for word in artin_words(n, 4):
        found = left_weighted_search(word, n, "standard")
        assert found == {GS.from_artin_word(word, n)}, word


def test_mirrored_convention_fails_the_oracle():
    failures = 0
    for word in artin_words(3, 4):
        if left_weighted_search(word, 3, "mirrored") != {GS.from_artin_word(word, 3)}:
            failures += 1
    assert failures > 0


def test_mirrored_automaton_differs():
    assert GS.build_automaton(3, "mirrored").delta != GS.build_automaton(3).delta


def braid_elements_by_canonical_length(n, max_artin):
    """Elements of B_n+ up to Artin length ``max_artin``, keyed by normal form."""
    elements = {(): 0}
    front = [()]
    gens = [GS.artin(i, n) for i in range(1, n)]
    for _ in range(max_artin):
        nxt = []
        for nf in front:
            for g in gens:
                m = GS.normal_form(nf + (g,))
                if m not in elements:
                    elements[m] = 1
                    nxt.append(m)
        front = nxt
    return Counter(len(nf) for nf in elements)


def test_sphere_counts_equal_distinct_elements():
    aut = GS.build_automaton(3)
    # canonical length l needs at most 3l Artin generators
    by_length = braid_elements_by_canonical_length(3, 18)
    for l in range(1, 7):
        assert C.count_sphere(aut, l) == by_length[l]


def test_automaton_language_is_normal_forms():
    aut = GS.build_automaton(3)
    for l in range(1, 5):
        for w in itertools.product(range(5), repeat=l):
            factors = GS.word_to_factors(w, 3)
            assert au.accepts(aut, w) == (GS.normal_form(factors) == factors)


def test_rigidity_agrees_with_squares():
    aut = GS.build_automaton(3)
    for l in range(1, 5):
        for w in C.enumerate_sphere(aut, l):
            f = GS.word_to_factors(w, 3)
            assert au.is_rigid_word(aut, w) == (GS.normal_form(f + f) == f + f)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(1, 3), max_size=10), st.lists(st.integers(1, 3), max_size=10))
def test_normal_form_is_associative(u, v):
    whole = GS.from_artin_word(u + v, 4)
    assert GS.normal_form(GS.from_artin_word(u, 4) + GS.from_artin_word(v, 4)) == whole
    assert all(GS.is_left_weighted(whole[k], whole[k + 1]) for k in range(len(whole) - 1))
    assert sum(f.length for f in whole) == len(u) + len(v)
    assert GS.factors_to_word(whole) == tuple(GS.permutation_braids(4).index(f) for f in whole)


# -- automaton facts --------------------------------------------------------


@pytest.mark.parametrize("n,states,accessible", [(3, 5, 4), (4, 23, 22)])
def test_automaton_facts(n, states, accessible):
    aut = GS.build_automaton(n)
    assert len(aut.inner_states) == states
    acc = au.accessible_subautomaton(aut)
    assert len(acc) == accessible
    assert aut.state_named(str(GS.delta(n))) not in acc
    index = au.recurrence_index(aut, acc)
    assert index is not None and index <= 5
    assert (C.transition_matrix(aut, acc) ** 5).is_positive()
    report = au.check_anf_hypothesis(aut)
    assert report.dominated
    assert aut.format(report.witness) == str(s(1, n))


def test_minimal_recurrence_indices():
    got = {}
    for n in (3, 4, 5):
        aut = GS.build_automaton(n)
        got[n] = au.recurrence_index(aut, au.accessible_subautomaton(aut))
    assert got == {3: 2, 4: 4, 5: 5}


def test_strand_range():
    with pytest.raises(au.AutomatonError):
        GS.build_automaton(2)
    with pytest.raises(au.AutomatonError):
        GS.build_automaton(6)


def test_census_and_ball_bound():
    assert GS.rigid_census(3, 0) == (0, 0)
    total, rigid = GS.rigid_census(3, 1)
    aut = GS.build_automaton(3)
    assert total == 5
    assert rigid == sum(au.is_rigid_word(aut, (x,)) for x in range(5))
    ratios = []
    for l in range(5, 13):
        total, rigid = GS.rigid_census(3, l)
        if l <= 8:
            assert rigid == C.rigid_sphere_count(aut, l, "enumerate")
        ratios.append(Fraction(rigid, total))
    assert min(ratios) > Fraction(1, 5)
    report = GS.ball_bound_report(3, 8)
    assert 0 < report.ball_bound <= report.sphere_proportion
    assert report.ball_bound == report.sphere_proportion / 2
    d = report.to_dict()
    assert d["sphere"] == report.sphere and Fraction(d["ball_bound"]) == report.ball_bound
