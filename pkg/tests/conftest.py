import itertools

from hypothesis import strategies as st

from genericity.automaton import Alphabet, Automaton

# lines printed by the acceptance suite, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@st.composite
def automata(draw, max_inner=5, max_letters=3):
    """Random valid automata: state 0 is start, 1 is fail."""
    k = draw(st.integers(1, max_letters))
    inner = draw(st.integers(1, max_inner))
    n = inner + 2
    targets = st.integers(1, n - 1)  # anything but the start
    delta = [tuple(draw(targets) for _ in range(k)) for _ in range(n)]
    delta[1] = (1,) * k
    accept = draw(st.sets(st.integers(2, n - 1), min_size=1))
    alphabet = Alphabet(tuple("xyz"[:k]))
    return Automaton(alphabet, n, 0, 1, frozenset(accept), tuple(delta))


def all_words(k, l):
    return itertools.product(range(k), repeat=l)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
