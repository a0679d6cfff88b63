"""Free-product normal forms and an exact word-search falsifier."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import BudgetExhausted, InvalidInput
from .exact import QMatrix


@dataclass(frozen=True)
class ReducedWord:
    """Alternating syllables ``(player, exponent vector)``, none of them zero."""

    syllables: tuple

    def __post_init__(self):
        for (p, e), (q, _) in zip(self.syllables, self.syllables[1:]):
            if p == q:
                raise InvalidInput("adjacent syllables of a reduced word share a player")
        if any(not any(e) for _, e in self.syllables):
            raise InvalidInput("reduced word has a zero syllable")

    def __len__(self):
        return len(self.syllables)

    def __iter__(self):
        return iter(self.syllables)

    @property
    def letters(self):
        return sum(sum(abs(x) for x in e) for _, e in self.syllables)

    def inverse(self):
        return ReducedWord(tuple((p, tuple(-x for x in e)) for p, e in reversed(self.syllables)))

    def __str__(self):
        return format_word(self.syllables)


def _syllable(s):
    pid, e = s
    if isinstance(e, int):
        e = (e,)
    return pid, tuple(int(x) for x in e)


def reduce_word(word, players=None) -> ReducedWord:
    """Merge adjacent same-player syllables and drop trivial ones, to a fixpoint.

    ``players`` optionally maps player ids to their generator count and is
    used to reject unknown ids and malformed exponent vectors.
    """
    stack = []
    for s in word:
        pid, e = _syllable(s)
        if players is not None:
            if pid not in players:
                raise InvalidInput(f"unknown player id {pid!r}")
            if len(e) != players[pid]:
                raise InvalidInput(f"syllable for {pid!r} has {len(e)} exponents, expected {players[pid]}")
        if stack and stack[-1][0] == pid:
            merged = tuple(a + b for a, b in zip(stack[-1][1], e))
            stack.pop()
            if any(merged):
                stack.append((pid, merged))
        elif any(e):
            stack.append((pid, e))
    return ReducedWord(tuple(stack))


def format_word(syllables):
    parts = []
    for pid, e in syllables:
        if len(e) == 1:
            parts.append(f"{pid}^{e[0]}" if e[0] != 1 else f"{pid}")
        else:
            parts.append(f"{pid}^({','.join(str(x) for x in e)})")
    return " ".join(parts) if parts else "1"


class WordEvaluator:
    """Evaluates words on generator matrices; ``gens`` maps player id to a
    list of commuting matrices."""

    def __init__(self, gens):
        self.gens = {p: [m if isinstance(m, QMatrix) else QMatrix(m) for m in ms]
                     for p, ms in gens.items()}
        self.dim = next(iter(self.gens.values()))[0].shape[0]
        self._cache = {}

    def syllable(self, pid, e):
        key = (pid, tuple(e))
        m = self._cache.get(key)
        if m is None:
            if pid not in self.gens:
                raise InvalidInput(f"unknown player id {pid!r}")
            m = QMatrix.identity(self.dim)
            for g, k in zip(self.gens[pid], e):
                if k:
                    m = m @ (g ** k)
            self._cache[key] = m
        return m

    def __call__(self, word):
        m = QMatrix.identity(self.dim)
        for s in word:
            pid, e = _syllable(s)
            m = m @ self.syllable(pid, e)
        return m


def evaluate_word(word, gens):
    return WordEvaluator(gens)(word)


@dataclass(frozen=True)
class Witness:
    word: ReducedWord
    matrix: QMatrix
    mode: str


def _projective_key(m):
    first = next((x for r in m.rows for x in r if x != 0), 1)
    return m if first > 0 else -m


def falsify_relations(gens, max_syllables, mode="exact", exponent_bound=2, max_words=2_000_000,
                      collect=False):
    """Search reduced words of at most ``max_syllables`` syllables for a relation.

    Each syllable exponent vector ranges over the nonzero points of
    ``[-exponent_bound, exponent_bound]^r``.  Meet in the middle: a word of
    ``L`` syllables is a prefix of ``ceil(L/2)`` and a suffix of ``floor(L/2)``
    syllables, and it evaluates to the identity iff the prefix equals the
    inverse of the suffix (up to sign in projective mode).  Returns the
    shortest, then lexicographically smallest, witness, or None.  None is not
    a proof of freeness.  With ``collect=True`` every relation in the search
    space is returned instead, as a sorted list of witnesses.
    """
    if mode not in ("exact", "projective"):
        raise InvalidInput(f"unknown mode {mode!r}")
    ev = WordEvaluator(gens)
    order = {p: i for i, p in enumerate(gens)}
    alphabet = []
    for pid, ms in gens.items():
        for e in product(range(-exponent_bound, exponent_bound + 1), repeat=len(ms)):
            if any(e):
                alphabet.append((pid, e))
    alphabet.sort(key=lambda s: (order[s[0]], s[1]))
    syl = {s: (ev.syllable(*s), ev.syllable(s[0], tuple(-x for x in s[1]))) for s in alphabet}
    ident = QMatrix.identity(ev.dim)
    key = _projective_key if mode == "projective" else (lambda m: m)

    # levels[l] = list of (syllables, matrix, inverse matrix) with exactly l syllables
    levels = {0: [((), ident, ident)]}
    generated = [0]

    def level(l, L):
        if l in levels:
            return levels[l]
        prev = level(l - 1, L)
        est = sum(sum(1 for s in alphabet if not w or s[0] != w[-1][0]) for w, _, _ in prev[:1]) * len(prev)
        if generated[0] + est > max_words:
            raise BudgetExhausted(f"budget exhausted at length {L}", L)
        out = []
        for w, m, inv in prev:
            for s in alphabet:
                if w and s[0] == w[-1][0]:
                    continue
                sm, sinv = syl[s]
                out.append((w + (s,), m @ sm, sinv @ inv))
        generated[0] += len(out)
        levels[l] = out
        return out

    index = {}

    def prefix_index(l, L):
        if l not in index:
            table = {}
            for w, m, _ in level(l, L):
                table.setdefault(key(m), []).append(w)
            index[l] = table
        return index[l]

    def sort_key(w):
        return tuple((order[p], e) for p, e in w)

    all_found = []
    for L in range(1, max_syllables + 1):
        p, s = (L + 1) // 2, L // 2
        found = []
        if s == 0:
            for w, m, _ in level(1, L):
                if key(m) == key(ident):
                    found.append(w)
        else:
            table = prefix_index(p, L)
            for sw, _, sinv in level(s, L):
                for pw in table.get(key(sinv), ()):
                    if pw[-1][0] != sw[0][0]:
                        found.append(pw + sw)
        if found and not collect:
            found = [min(found, key=sort_key)]
        witnesses = []
        for w in sorted(found, key=sort_key):
            m = ev(w)
            ok = m == ident or (mode == "projective" and m == -ident)
            assert ok, "meet-in-the-middle produced a non-relation"
            witnesses.append(Witness(ReducedWord(w), m, mode))
        if witnesses and not collect:
            return witnesses[0]
        all_found.extend(witnesses)
    return all_found if collect else None
