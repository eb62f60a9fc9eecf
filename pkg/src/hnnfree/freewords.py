"""
Free-group words, Magnus rewriting, the subscript shift, and Stallings folding.

A word is a freely reduced tuple of letters ``(generator, sign)``.  Two
alphabets are used throughout:

* ``TWO_GEN``: generators ``a, b`` with inverses ``A, B``;
* ``RANK6``: generators ``b0 .. b4`` and ``u`` (the parabolic), inverses
  ``B0 .. B4`` and ``U``.  Indices 0-4 are the ``b_k``, index 5 is ``u``.

Magnus rewriting against the character a -> 1, b -> 0 replaces every
``b`` letter by ``b_k`` where ``k`` is the exponent sum of ``a`` over the
letters strictly before it.
"""

from __future__ import annotations

import re
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

__all__ = [
    "Word", "SubscriptedWord", "Alphabet", "TWO_GEN", "RANK6", "MU",
    "Presentation", "DEFAULT_RELATOR", "BadToken", "NonzeroExponentSum",
    "EmptyWord", "ExtremeRepeats", "FreeOfRank", "ExtremesRepeat",
    "free_reduce", "cyclic_reduce", "apply_character", "magnus_rewrite",
    "kernel_rank", "solve_for_extremal", "KernelRewriter", "shift_rewrite",
    "StallingsGraph", "stallings_fold", "membership", "parse_word", "format_word",
]


class BadToken(ValueError):
    def __init__(self, text: str, position: int):
        self.text = text
        self.position = position
        super().__init__(f"bad token at index {position} in {text!r}")


class NonzeroExponentSum(ValueError):
    pass


class EmptyWord(ValueError):
    pass


class ExtremeRepeats(ValueError):
    pass


def _reduce(letters: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    stack: list[tuple[int, int]] = []
    for g, s in letters:
        if stack and stack[-1][0] == g and stack[-1][1] == -s:
            stack.pop()
        else:
            stack.append((g, s))
    return tuple(stack)


@dataclass(frozen=True)
class Word:
    """A freely reduced word; construction reduces its input."""

    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", _reduce((int(g), int(s)) for g, s in self.letters))

    @classmethod
    def gen(cls, g: int, sign: int = 1):
        return cls(((g, sign),))

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __bool__(self):
        return bool(self.letters)

    def __mul__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return type(self)(self.letters + other.letters)

    def __pow__(self, k: int):
        base = self if k >= 0 else self.inverse()
        return type(self)(base.letters * abs(k))

    def inverse(self):
        return type(self)(tuple((g, -s) for g, s in reversed(self.letters)))

    def generators(self) -> set[int]:
        return {g for g, _ in self.letters}

    def rotate(self, i: int):
        return type(self)(self.letters[i:] + self.letters[:i])

    def substitute(self, images, cls=None):
        """Apply the endomorphism sending generator g to ``images[g]``."""
        out: list[tuple[int, int]] = []
        for g, s in self.letters:
            img = images[g]
            out.extend(img.letters if s > 0 else img.inverse().letters)
        return (cls or Word)(tuple(out))


@dataclass(frozen=True)
class SubscriptedWord(Word):
    """A word in the letters b_k; the generator slot holds the subscript k."""

    def shift(self, k: int) -> "SubscriptedWord":
        return SubscriptedWord(tuple((j + k, s) for j, s in self.letters))

    def subscripts(self) -> list[int]:
        return [j for j, _ in self.letters]

    def to_rank6(self, lo: int = 0) -> Word:
        return Word(tuple((j - lo, s) for j, s in self.letters))

    def __str__(self):
        return " ".join(("b" if s > 0 else "B") + str(j) for j, s in self.letters)


def free_reduce(w) -> Word:
    if isinstance(w, Word):
        return type(w)(w.letters)
    return Word(tuple(w))


def cyclic_reduce(w: Word) -> Word:
    letters = list(free_reduce(w).letters)
    i, j = 0, len(letters) - 1
    while i < j and letters[i][0] == letters[j][0] and letters[i][1] == -letters[j][1]:
        i += 1
        j -= 1
    return type(w)(tuple(letters[i:j + 1]))


# -- alphabets and parsing ----------------------------------------------------

@dataclass(frozen=True)
class Alphabet:
    names: tuple[str, ...]
    inverse_names: tuple[str, ...]
    compact: bool = True

    def name(self, g: int) -> str:
        return self.names[g]

    def token(self, g: int, s: int) -> str:
        return self.names[g] if s > 0 else self.inverse_names[g]

    @property
    def rank(self) -> int:
        return len(self.names)

    def parse(self, text: str) -> Word:
        table = {n: (i, 1) for i, n in enumerate(self.names)}
        table.update({n: (i, -1) for i, n in enumerate(self.inverse_names)})
        tokens = sorted(table, key=len, reverse=True)
        pattern = re.compile("|".join(re.escape(t) for t in tokens))
        letters = []
        pos = 0
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
                continue
            m = pattern.match(text, pos)
            if m is None:
                raise BadToken(text, pos)
            letters.append(table[m.group(0)])
            pos = m.end()
        return Word(tuple(letters))

    def format(self, w: Word) -> str:
        sep = "" if self.compact else " "
        return sep.join(self.token(g, s) for g, s in w.letters)


TWO_GEN = Alphabet(("a", "b"), ("A", "B"), compact=True)
RANK6 = Alphabet(("b0", "b1", "b2", "b3", "b4", "u"), ("B0", "B1", "B2", "B3", "B4", "U"), compact=False)
MU = 5


def parse_word(text: str, alphabet: Alphabet = TWO_GEN) -> Word:
    return alphabet.parse(text)


def format_word(w: Word, alphabet: Alphabet = TWO_GEN) -> str:
    if isinstance(w, SubscriptedWord):
        return str(w)
    return alphabet.format(w)


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...]

    def __post_init__(self):
        object.__setattr__(self, "relators", tuple(cyclic_reduce(r) for r in self.relators))


DEFAULT_RELATOR = "aabbaaBAbaBabAABBAbAAB"


# -- characters and Magnus rewriting -----------------------------------------

def apply_character(chi: Sequence[int], w: Word) -> int:
    return sum(chi[g] * s for g, s in w.letters)


def magnus_rewrite(relator: Word, stable: int = 0) -> SubscriptedWord:
    """Rewrite a word with zero ``stable``-exponent sum in the letters b_k.

    Only two-generator words are supported; the non-stable generator becomes
    b, and each of its letters gets the stable exponent sum of the strict
    prefix before it.
    """
    other = set(relator.generators()) - {stable}
    if len(other) > 1:
        raise ValueError("magnus_rewrite handles two-generator words only")
    chi = [0] * (max(relator.generators() | {stable}) + 1)
    chi[stable] = 1
    if apply_character(chi, relator) != 0:
        raise NonzeroExponentSum(f"stable letter exponent sum is {apply_character(chi, relator)}")
    k = 0
    out = []
    for g, s in relator.letters:
        if g == stable:
            k += s
        else:
            out.append((k, s))
    return SubscriptedWord(tuple(out))


@dataclass(frozen=True)
class FreeOfRank:
    rank: int
    basis: tuple[int, ...]

    def __str__(self):
        return f"FreeOfRank({self.rank})"


@dataclass(frozen=True)
class ExtremesRepeat:
    min_subscript: int
    max_subscript: int
    min_count: int
    max_count: int

    def __str__(self):
        return (f"ExtremesRepeat(min b{self.min_subscript} x{self.min_count}, "
                f"max b{self.max_subscript} x{self.max_count})")


def _extremes(sw: SubscriptedWord):
    subs = sw.subscripts()
    counts = Counter(subs)
    lo, hi = min(subs), max(subs)
    return lo, hi, counts[lo], counts[hi]


def kernel_rank(sw: SubscriptedWord):
    sw = cyclic_reduce(sw)
    if not sw:
        raise EmptyWord("subscripted relator is empty")
    lo, hi, nlo, nhi = _extremes(sw)
    if nlo == 1 and nhi == 1:
        return FreeOfRank(hi - lo, tuple(range(lo, hi)))
    return ExtremesRepeat(lo, hi, nlo, nhi)


def solve_for_extremal(sw: SubscriptedWord, end: str = "max") -> SubscriptedWord:
    """Express the extremal letter through the others using the relation sw = 1.

    With sw = u x^e v (x the unique letter of extreme subscript), the relation
    gives x^e = u^-1 v^-1.
    """
    sw = cyclic_reduce(sw)
    if not sw:
        raise EmptyWord("subscripted relator is empty")
    lo, hi, nlo, nhi = _extremes(sw)
    target, count = (hi, nhi) if end == "max" else (lo, nlo)
    if end not in ("max", "min"):
        raise ValueError("end must be 'max' or 'min'")
    if count != 1 or lo == hi:
        raise ExtremeRepeats(f"extremal subscript {target} occurs {count} times")
    i = next(i for i, (j, _) in enumerate(sw.letters) if j == target)
    eps = sw.letters[i][1]
    u = SubscriptedWord(sw.letters[:i])
    v = SubscriptedWord(sw.letters[i + 1:])
    x = u.inverse() * v.inverse()
    return x if eps > 0 else x.inverse()


class KernelRewriter:
    """Rewrites words in the b_k into the basis b_lo .. b_{hi-1}.

    ``lo`` and ``hi`` are the extremal subscripts of the relator; letters
    outside the basis range are eliminated using the relator solved for its
    maximal (resp. minimal) letter, shifted as needed.  Each substitution
    moves subscripts strictly toward the range, so the recursion terminates.
    """

    def __init__(self, relator_sw: SubscriptedWord):
        rk = kernel_rank(relator_sw)
        if not isinstance(rk, FreeOfRank) or rk.rank == 0:
            raise ExtremeRepeats("relator extremes repeat; no finite basis via Magnus")
        self.relator = cyclic_reduce(relator_sw)
        self.lo = rk.basis[0]
        self.hi = rk.basis[-1] + 1
        self.top = solve_for_extremal(self.relator, "max")
        self.bottom = solve_for_extremal(self.relator, "min")
        self._memo: dict[int, SubscriptedWord] = {}

    @property
    def rank(self) -> int:
        return self.hi - self.lo

    def letter(self, j: int) -> SubscriptedWord:
        """The basis expression for b_j."""
        if self.lo <= j < self.hi:
            return SubscriptedWord(((j, 1),))
        if j in self._memo:
            return self._memo[j]
        if j >= self.hi:
            raw = self.top.shift(j - self.hi)
        else:
            raw = self.bottom.shift(j - self.lo)
        out = self.normalize(raw)
        self._memo[j] = out
        return out

    def normalize(self, sw: SubscriptedWord) -> SubscriptedWord:
        out: list[tuple[int, int]] = []
        for j, s in sw.letters:
            expr = self.letter(j)
            out.extend(expr.letters if s > 0 else expr.inverse().letters)
        return SubscriptedWord(tuple(out))

    def shift_rewrite(self, w: SubscriptedWord, shift: int) -> SubscriptedWord:
        return self.normalize(w.shift(shift))


_DEFAULT_REWRITER = None


def _default_rewriter() -> KernelRewriter:
    global _DEFAULT_REWRITER
    if _DEFAULT_REWRITER is None:
        _DEFAULT_REWRITER = KernelRewriter(magnus_rewrite(TWO_GEN.parse(DEFAULT_RELATOR)))
    return _DEFAULT_REWRITER


def shift_rewrite(w: SubscriptedWord, shift: int, rewriter: KernelRewriter | None = None) -> SubscriptedWord:
    """Shift subscripts by ``shift`` (conjugation by a^shift) and rewrite into the basis."""
    return (rewriter or _default_rewriter()).shift_rewrite(w, shift)


# -- Stallings folding ----------------------------------------------------------

@dataclass(frozen=True)
class StallingsGraph:
    """A folded core graph; vertex 0 is the base, edges are (src, label, dst)."""

    num_vertices: int
    edges: tuple[tuple[int, int, int], ...]
    base: int = 0
    folded: bool = True
    _out: dict = field(default=None, compare=False, repr=False)
    _in: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        out, inn = {}, {}
        for u, g, v in self.edges:
            out[(u, g)] = v
            inn[(v, g)] = u
        object.__setattr__(self, "_out", out)
        object.__setattr__(self, "_in", inn)

    def step(self, v: int, g: int, s: int):
        return self._out.get((v, g)) if s > 0 else self._in.get((v, g))

    def rank(self) -> int:
        return len(self.edges) - self.num_vertices + 1


class _Folder:
    def __init__(self):
        self.parent: list[int] = []
        self.out: list[dict[int, set[int]]] = []
        self.inn: list[dict[int, set[int]]] = []

    def new_vertex(self) -> int:
        self.parent.append(len(self.parent))
        self.out.append({})
        self.inn.append({})
        return len(self.parent) - 1

    def find(self, v: int) -> int:
        while self.parent[v] != v:
            self.parent[v] = self.parent[self.parent[v]]
            v = self.parent[v]
        return v

    def add_edge(self, u: int, g: int, v: int, work: deque):
        self.out[u].setdefault(g, set()).add(v)
        self.inn[v].setdefault(g, set()).add(u)
        if len(self.out[u][g]) > 1:
            work.append((u, g, 1))
        if len(self.inn[v][g]) > 1:
            work.append((v, g, -1))

    def merge(self, x: int, y: int, work: deque):
        x, y = self.find(x), self.find(y)
        if x == y:
            return
        if y < x:
            x, y = y, x
        self.parent[y] = x
        outs = [(g, t) for g, ts in self.out[y].items() for t in ts]
        ins = [(g, u) for g, us in self.inn[y].items() for u in us]
        self.out[y], self.inn[y] = {}, {}
        for g, t in outs:
            self.inn[t].get(g, set()).discard(y)
        for g, u in ins:
            self.out[u].get(g, set()).discard(y)
        for g, t in outs:
            self.add_edge(x, g, self.find(t), work)
        for g, u in ins:
            self.add_edge(self.find(u), g, x, work)

    def fold(self, work: deque):
        while work:
            v, g, s = work.popleft()
            v = self.find(v)
            adj = self.out[v] if s > 0 else self.inn[v]
            targets = {self.find(t) for t in adj.get(g, ())}
            adj[g] = targets
            if len(targets) > 1:
                first, *rest = sorted(targets)
                for r in rest:
                    self.merge(first, r, work)
                work.append((v, g, s))


def stallings_fold(generators: Sequence[Word]) -> StallingsGraph:
    """Fold the wedge of generator loops into the core graph of the subgroup."""
    f = _Folder()
    base = f.new_vertex()
    work: deque = deque()
    for w in generators:
        w = free_reduce(w)
        if not w:
            continue
        cur = base
        for i, (g, s) in enumerate(w.letters):
            nxt = base if i == len(w) - 1 else f.new_vertex()
            if s > 0:
                f.add_edge(cur, g, nxt, work)
            else:
                f.add_edge(nxt, g, cur, work)
            cur = nxt
    f.fold(work)

    edges = set()
    for u in range(len(f.parent)):
        if f.find(u) != u:
            continue
        for g, ts in f.out[u].items():
            for t in ts:
                edges.add((u, g, f.find(t)))

    # prune hanging trees down to the core
    while True:
        deg = Counter()
        for u, _, v in edges:
            deg[u] += 1
            deg[v] += 1
        leaves = {v for v, d in deg.items() if d == 1 and v != base}
        if not leaves:
            break
        edges = {e for e in edges if e[0] not in leaves and e[2] not in leaves}

    # canonical relabelling by breadth-first search from the base
    adj: dict[int, list] = {}
    for u, g, v in edges:
        adj.setdefault(u, []).append((g, 1, v))
        adj.setdefault(v, []).append((g, -1, u))
    order = {base: 0}
    queue = deque([base])
    while queue:
        u = queue.popleft()
        for g, s, v in sorted(adj.get(u, ())):
            if v not in order:
                order[v] = len(order)
                queue.append(v)
    relabelled = tuple(sorted((order[u], g, order[v]) for u, g, v in edges))
    return StallingsGraph(len(order), relabelled)


def membership(w: Word, g: StallingsGraph) -> bool:
    v = g.base
    for gen, s in free_reduce(w).letters:
        v = g.step(v, gen, s)
        if v is None:
            return False
    return v == g.base
