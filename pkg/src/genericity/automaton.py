"""Deterministic finite-state recognizers of normal-form languages.

Words are tuples of letter indices into an :class:`Alphabet`.  An
:class:`Automaton` is immutable; everything else in this module is a pure
function of it.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

Word = tuple[int, ...]


class AutomatonError(ValueError):
    """Malformed automaton or invalid input word."""


@dataclass(frozen=True)
class Alphabet:
    """Finite set of letter names; a letter is its index in ``names``."""

    names: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise AutomatonError(f"duplicate letter names in {self.names!r}")
        if any(not name or any(ch.isspace() for ch in name) for name in self.names):
            raise AutomatonError("letter names must be nonempty and contain no whitespace")

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(range(len(self.names)))

    @property
    def compact(self) -> bool:
        # single-character names can be written without separators
        return all(len(name) == 1 for name in self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise AutomatonError(f"letter {name!r} not in alphabet {self.names!r}") from None

    def parse(self, text: str) -> Word:
        """Parse ``text`` into a word.

        Whitespace separates letters.  When every letter name is a single
        character, a token may also be a run of letters (``"Ab"``).
        """
        word = []
        for token in text.split():
            if token in self.names:
                word.append(self.index(token))
            elif self.compact:
                word.extend(self.index(ch) for ch in token)
            else:
                raise AutomatonError(f"letter {token!r} not in alphabet {self.names!r}")
        return tuple(word)

    def format(self, word: Sequence[int]) -> str:
        sep = "" if self.compact else " "
        return sep.join(self.names[x] for x in word)


@dataclass(frozen=True)
class Automaton:
    """Deterministic recognizer with a start state and an absorbing fail state.

    ``delta[s][x]`` is the target of state ``s`` on letter ``x``.
    """

    alphabet: Alphabet
    n_states: int
    start: int
    fail: int
    accept: frozenset[int]
    delta: tuple[tuple[int, ...], ...]
    state_names: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        n, k = self.n_states, len(self.alphabet)
        if n < 2:
            raise AutomatonError("need at least a start and a fail state")
        if not (0 <= self.start < n and 0 <= self.fail < n) or self.start == self.fail:
            raise AutomatonError("start and fail must be distinct valid states")
        if len(self.delta) != n or any(len(row) != k for row in self.delta):
            raise AutomatonError("transition table must be total: one target per (state, letter)")
        for s, row in enumerate(self.delta):
            for x, t in enumerate(row):
                if not 0 <= t < n:
                    raise AutomatonError(f"transition ({s}, {x}) -> {t} out of range")
                if t == self.start:
                    raise AutomatonError("the start state must not be the target of any arrow")
        if any(t != self.fail for t in self.delta[self.fail]):
            raise AutomatonError("the fail state must be absorbing")
        if not self.accept <= set(range(n)):
            raise AutomatonError("accept states out of range")
        if self.start in self.accept or self.fail in self.accept:
            raise AutomatonError("start and fail states cannot accept")
        if self.state_names is not None and len(self.state_names) != n:
            raise AutomatonError("state_names must name every state")

    @classmethod
    def from_transitions(
        cls,
        alphabet: Alphabet | Sequence[str],
        n_states: int,
        start: int,
        fail: int,
        accept: Iterable[int],
        transitions: Iterable[tuple[int, int, int]],
        state_names: Sequence[str] | None = None,
    ) -> Automaton:
        """Build from a sparse transition list; omitted transitions go to ``fail``."""
        if not isinstance(alphabet, Alphabet):
            alphabet = Alphabet(tuple(alphabet))
        table = [[fail] * len(alphabet) for _ in range(n_states)]
        for s, x, t in transitions:
            if not (0 <= s < n_states and 0 <= x < len(alphabet)):
                raise AutomatonError(f"bad transition ({s}, {x}, {t})")
            table[s][x] = t
        return cls(
            alphabet=alphabet,
            n_states=n_states,
            start=start,
            fail=fail,
            accept=frozenset(accept),
            delta=tuple(tuple(row) for row in table),
            state_names=tuple(state_names) if state_names is not None else None,
        )

    @property
    def inner_states(self) -> list[int]:
        """All states other than start and fail."""
        return [s for s in range(self.n_states) if s not in (self.start, self.fail)]

    def name(self, state: int) -> str:
        if self.state_names is not None:
            return self.state_names[state]
        return str(state)

    def state_named(self, name: str) -> int:
        if self.state_names is None or name not in self.state_names:
            raise AutomatonError(f"no state named {name!r}")
        return self.state_names.index(name)

    def parse(self, text: str) -> Word:
        return self.alphabet.parse(text)

    def format(self, word: Sequence[int]) -> str:
        return self.alphabet.format(word)


def _check_word(aut: Automaton, w: Sequence[int]) -> None:
    k = len(aut.alphabet)
    for x in w:
        if not (isinstance(x, int) and 0 <= x < k):
            raise AutomatonError(f"letter {x!r} not in alphabet of size {k}")


def run(aut: Automaton, state: int, w: Sequence[int]) -> int:
    """State reached from ``state`` after reading ``w``."""
    _check_word(aut, w)
    delta = aut.delta
    for x in w:
        state = delta[state][x]
    return state


def trace(aut: Automaton, w: Sequence[int]) -> list[int]:
    _check_word(aut, w)
    states = [aut.start]
    for x in w:
        states.append(aut.delta[states[-1]][x])
    return states


def accepts(aut: Automaton, w: Sequence[int]) -> bool:
    return run(aut, aut.start, w) in aut.accept


def forward_reach(aut: Automaton, source: int) -> set[int]:
    """States reachable from ``source`` in zero or more steps."""
    seen = {source}
    queue = deque([source])
    while queue:
        s = queue.popleft()
        for t in aut.delta[s]:
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return seen


def accessible_subautomaton(aut: Automaton) -> frozenset[int]:
    """States reachable from every state other than start and fail."""
    sources = aut.inner_states
    if not sources:
        return frozenset()
    common = set(range(aut.n_states))
    for s in sources:
        common &= forward_reach(aut, s)
        if not common:
            break
    common.discard(aut.start)
    common.discard(aut.fail)
    return frozenset(common)


def _bool_rows(aut: Automaton, states: Sequence[int]) -> list[int]:
    # row i as a bitmask over positions in `states`
    pos = {s: i for i, s in enumerate(states)}
    rows = []
    for s in states:
        mask = 0
        for t in aut.delta[s]:
            if t in pos:
                mask |= 1 << pos[t]
        rows.append(mask)
    return rows


def _bool_mul(a: list[int], b: list[int]) -> list[int]:
    out = []
    for row in a:
        acc = 0
        j = 0
        while row:
            if row & 1:
                acc |= b[j]
            row >>= 1
            j += 1
        out.append(acc)
    return out


def recurrence_index(aut: Automaton, states: Iterable[int]) -> int | None:
    """Smallest l with the restricted count matrix power A**l entrywise positive.

    Searches up to Wielandt's bound n*n - 2n + 2; ``None`` if the restriction
    is not primitive.
    """
    states = sorted(states)
    if not states:
        raise AutomatonError("recurrence index of an empty state set")
    n = len(states)
    full = (1 << n) - 1
    base = _bool_rows(aut, states)
    power = base
    for l in range(1, n * n - 2 * n + 3):
        if all(row == full for row in power):
            return l
        power = _bool_mul(power, base)
    return None


def is_rigid_word(aut: Automaton, w: Sequence[int]) -> bool:
    """True iff every power w**n (n >= 1) is accepted.

    The map "read w" on states is iterated from the end of the first copy;
    the orbit is eventually periodic, so it suffices to see a repeat.  The
    fail state is absorbing and non-accepting, so a copy whose run touches
    fail ends outside ``accept``.
    """
    if len(w) == 0:
        raise AutomatonError("rigidity is defined for nonempty words")
    _check_word(aut, w)
    state = run(aut, aut.start, w)
    seen = set()
    while state in aut.accept:
        if state in seen:
            return True
        seen.add(state)
        state = run(aut, state, w)
    return False


def find_rigid_word(aut: Automaton) -> tuple[Word, int] | None:
    """Shortest ``w`` with run(start, w) = E = run(E, w), E accessible and accepting.

    Breadth-first search over pairs (run from start, run from E) for each
    candidate E.  Ties are broken by candidate order, then letter order.
    """
    best = None
    for end in sorted(accessible_subautomaton(aut) & aut.accept):
        found = _pair_search(aut, end)
        if found is not None and (best is None or len(found) < len(best[0])):
            best = (found, end)
    return best


def _pair_search(aut: Automaton, end: int) -> Word | None:
    origin = (aut.start, end)
    parent: dict[tuple[int, int], tuple[tuple[int, int], int] | None] = {origin: None}
    queue = deque([origin])
    fail = aut.fail
    while queue:
        pair = queue.popleft()
        for x in range(len(aut.alphabet)):
            nxt = (aut.delta[pair[0]][x], aut.delta[pair[1]][x])
            if fail in nxt or nxt in parent:
                continue
            parent[nxt] = (pair, x)
            if nxt == (end, end):
                word = []
                node = nxt
                while parent[node] is not None:
                    node, letter = parent[node]
                    word.append(letter)
                return tuple(reversed(word))
            queue.append(nxt)
    return None


@dataclass(frozen=True)
class StructureReport:
    accessible: frozenset[int]
    recurrence_index: int | None
    accessible_rate: float
    complement_rate: float
    dominated: bool
    witness: Word | None = None
    witness_state: int | None = None

    @property
    def anf_holds(self) -> bool:
        """Automatic normal form hypothesis: dominated and a rigid witness exists."""
        return self.dominated and self.witness is not None

    def to_dict(self, aut: Automaton | None = None) -> dict:
        out = {
            "accessible": sorted(self.accessible),
            "recurrence_index": self.recurrence_index,
            "accessible_rate": round(self.accessible_rate, 12),
            "complement_rate": round(self.complement_rate, 12),
            "dominated": self.dominated,
            "witness": None,
            "witness_state": self.witness_state,
            "anf_holds": self.anf_holds,
        }
        if self.witness is not None:
            out["witness"] = aut.format(self.witness) if aut else list(self.witness)
        if aut is not None and aut.state_names is not None:
            out["accessible_names"] = [aut.name(s) for s in sorted(self.accessible)]
            if self.witness_state is not None:
                out["witness_state_name"] = aut.name(self.witness_state)
        return out


def is_dominated(aut: Automaton) -> StructureReport:
    from .counting import restricted_growth_rate

    acc = accessible_subautomaton(aut)
    rest = [s for s in aut.inner_states if s not in acc]
    index = recurrence_index(aut, acc) if acc else None
    acc_rate = restricted_growth_rate(aut, acc)
    rest_rate = restricted_growth_rate(aut, rest)
    dominated = bool(acc) and index is not None and acc_rate > rest_rate
    return StructureReport(acc, index, acc_rate, rest_rate, dominated)


def check_anf_hypothesis(aut: Automaton) -> StructureReport:
    report = is_dominated(aut)
    found = find_rigid_word(aut)
    if found is None:
        return report
    word, end = found
    return StructureReport(
        report.accessible,
        report.recurrence_index,
        report.accessible_rate,
        report.complement_rate,
        report.dominated,
        witness=word,
        witness_state=end,
    )


# -- interchange format -------------------------------------------------------


def to_dict(aut: Automaton) -> dict:
    transitions = [
        [s, aut.alphabet.names[x], t]
        for s in range(aut.n_states)
        for x, t in enumerate(aut.delta[s])
        if t != aut.fail
    ]
    out = {
        "alphabet": list(aut.alphabet.names),
        "states": aut.n_states,
        "start": aut.start,
        "fail": aut.fail,
        "accept": sorted(aut.accept),
        "transitions": transitions,
    }
    if aut.state_names is not None:
        out["state_names"] = list(aut.state_names)
    return out


def from_dict(data: dict) -> Automaton:
    try:
        alphabet = Alphabet(tuple(data["alphabet"]))
        transitions = [(int(s), alphabet.index(x), int(t)) for s, x, t in data["transitions"]]
        return Automaton.from_transitions(
            alphabet,
            int(data["states"]),
            int(data["start"]),
            int(data["fail"]),
            [int(s) for s in data["accept"]],
            transitions,
            data.get("state_names"),
        )
    except (KeyError, TypeError) as exc:
        raise AutomatonError(f"malformed automaton file: {exc}") from exc


def dumps(aut: Automaton) -> str:
    return json.dumps(to_dict(aut), indent=1, ensure_ascii=False) + "\n"


def loads(text: str) -> Automaton:
    return from_dict(json.loads(text))


def load(path: str | Path) -> Automaton:
    return loads(Path(path).read_text(encoding="utf-8"))


def save(aut: Automaton, path: str | Path) -> None:
    Path(path).write_text(dumps(aut), encoding="utf-8")
