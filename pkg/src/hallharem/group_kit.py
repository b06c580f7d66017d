"""Free groups as computable permutation actions on the naturals.

Reduced words over rank-m generators are enumerated shortlex with letter
order a < A < b < B < ... (lowercase generators, uppercase inverses), so
index 0 is the empty word and the bijection with the naturals is cheap in
both directions.  Left multiplication by a fixed word then acts on indices
as a computable permutation, which is what the matching machinery and the
decomposition layer consume.

Also here: the step metric generated by a symmetric word set, partial
bijections with the usual closure operations, exact boundary-ratio tests
used by the amenability searches, and the commutation test deciding which
finite word sets witness paradoxicality in a free group.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import EmptySetError, DisjointnessViolation, RankMismatch, SizeGuardError


@dataclass(frozen=True)
class Word:
    """A freely reduced word; letters are +g for generators, -g for inverses."""

    rank: int
    letters: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        for l in self.letters:
            if l == 0 or abs(l) > self.rank:
                raise ValueError(f"letter {l} out of range for rank {self.rank}")
        for x, y in zip(self.letters, self.letters[1:]):
            if x == -y:
                raise ValueError("word is not freely reduced")

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "e"
        out = []
        for l in self.letters:
            base = ord("a") if l > 0 else ord("A")
            out.append(chr(base + abs(l) - 1))
        return "".join(out)

    def is_identity(self) -> bool:
        return not self.letters


def identity(rank: int) -> Word:
    return Word(rank, ())


def generator(rank: int, g: int, sign: int = 1) -> Word:
    return Word(rank, (g if sign > 0 else -g,))


def reduce(rank: int, letters: Iterable[int]) -> Word:
    """Freely reduce a letter sequence (stack cancellation)."""
    stack: list[int] = []
    for l in letters:
        if stack and stack[-1] == -l:
            stack.pop()
        else:
            stack.append(l)
    return Word(rank, tuple(stack))


def mul(x: Word, y: Word) -> Word:
    if x.rank != y.rank:
        raise RankMismatch(f"rank {x.rank} vs {y.rank}")
    return reduce(x.rank, x.letters + y.letters)


def inv(x: Word) -> Word:
    return Word(x.rank, tuple(-l for l in reversed(x.letters)))


def parse_word(rank: int, text: str) -> Word:
    """Parse the a/A syntax; "e" is the empty word.  Input is reduced."""
    text = text.strip()
    if text in ("", "e"):
        return identity(rank)
    letters = []
    for ch in text:
        if "a" <= ch <= "z":
            g = ord(ch) - ord("a") + 1
        elif "A" <= ch <= "Z":
            g = -(ord(ch) - ord("A") + 1)
        else:
            raise ValueError(f"bad character {ch!r} in word {text!r}")
        if abs(g) > rank:
            raise ValueError(f"letter {ch!r} exceeds rank {rank}")
        letters.append(g)
    return reduce(rank, letters)


class Enumeration:
    """The shortlex bijection between reduced words and the naturals."""

    def __init__(self, rank: int):
        if rank < 1:
            raise ValueError("rank must be >= 1")
        self.rank = rank
        self.q = 2 * rank - 1  # choices per letter after the first
        self._cum = [1]  # number of words of length < L+1, starting at L=0

    def _extend_cum(self, length: int) -> None:
        while len(self._cum) <= length:
            level = len(self._cum)
            self._cum.append(self._cum[-1] + 2 * self.rank * self.q ** (level - 1))

    @staticmethod
    def _pos(letter: int) -> int:
        return 2 * (letter - 1) if letter > 0 else 2 * (-letter) - 1

    @staticmethod
    def _letter(pos: int) -> int:
        return pos // 2 + 1 if pos % 2 == 0 else -((pos + 1) // 2)

    def word_to_index(self, w: Word) -> int:
        if w.rank != self.rank:
            raise RankMismatch(f"rank {w.rank} vs {self.rank}")
        length = len(w.letters)
        if length == 0:
            return 0
        self._extend_cum(length)
        rank_in_level = self._pos(w.letters[0]) * self.q ** (length - 1)
        for i in range(1, length):
            banned = self._pos(-w.letters[i - 1])
            p = self._pos(w.letters[i])
            r = p if p < banned else p - 1
            rank_in_level += r * self.q ** (length - 1 - i)
        return self._cum[length - 1] + rank_in_level

    def index_to_word(self, n: int) -> Word:
        if n < 0:
            raise ValueError("index must be >= 0")
        if n == 0:
            return identity(self.rank)
        length = 1
        self._extend_cum(length)
        while n >= self._cum[length]:
            length += 1
            self._extend_cum(length)
        r = n - self._cum[length - 1]
        first, r = divmod(r, self.q ** (length - 1))
        letters = [self._letter(first)]
        for i in range(1, length):
            d, r = divmod(r, self.q ** (length - 1 - i))
            banned = self._pos(-letters[-1])
            p = d if d < banned else d + 1
            letters.append(self._letter(p))
        return Word(self.rank, tuple(letters))


_ENUMS: dict[int, Enumeration] = {}


def enumeration(rank: int) -> Enumeration:
    if rank not in _ENUMS:
        _ENUMS[rank] = Enumeration(rank)
    return _ENUMS[rank]


def act(w: Word, n: int) -> int:
    """Left multiplication by w, as a permutation of word indices."""
    e = enumeration(w.rank)
    return e.word_to_index(mul(w, e.index_to_word(n)))


@dataclass(frozen=True)
class GeneratorSet:
    """A finite symmetric set of words containing the identity, kept in
    shortlex order; the step metric and balls below are taken over it."""

    rank: int
    elements: tuple[Word, ...]

    def __post_init__(self) -> None:
        if not self.elements:
            raise ValueError("generator set must be non-empty")
        e = enumeration(self.rank)
        indices = [e.word_to_index(w) for w in self.elements]
        if indices != sorted(indices) or len(set(indices)) != len(indices):
            raise ValueError("elements must be distinct and in shortlex order")
        if 0 not in indices:
            raise ValueError("generator set must contain the identity")
        have = set(indices)
        for w in self.elements:
            if e.word_to_index(inv(w)) not in have:
                raise ValueError(f"generator set not symmetric: missing {inv(w)}")

    @staticmethod
    def symmetrized(rank: int, words: Iterable[Word]) -> "GeneratorSet":
        e = enumeration(rank)
        pool = {0}
        for w in words:
            if w.rank != rank:
                raise RankMismatch(f"rank {w.rank} vs {rank}")
            pool.add(e.word_to_index(w))
            pool.add(e.word_to_index(inv(w)))
        return GeneratorSet(
            rank, tuple(e.index_to_word(i) for i in sorted(pool))
        )

    @staticmethod
    def standard(rank: int) -> "GeneratorSet":
        return GeneratorSet.symmetrized(
            rank, [generator(rank, g) for g in range(1, rank + 1)]
        )

    def power(self, n: int) -> "GeneratorSet":
        """All products of n elements (contains lower powers: 1 is here)."""
        if n < 1:
            raise ValueError("power must be >= 1")
        e = enumeration(self.rank)
        current = {e.word_to_index(w) for w in self.elements}
        for _ in range(n - 1):
            current = {
                e.word_to_index(mul(x, e.index_to_word(i)))
                for x in self.elements
                for i in current
            }
        return GeneratorSet(
            self.rank, tuple(e.index_to_word(i) for i in sorted(current))
        )

    def max_length(self) -> int:
        return max(len(w) for w in self.elements)


class OverCap:
    """Sentinel: the distance exceeds the requested cap (possibly infinite)."""

    _instance: "OverCap | None" = None

    def __new__(cls) -> "OverCap":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "OverCap"


OVER_CAP = OverCap()


def d_r(r_set: GeneratorSet, x: int, y: int, cap: int) -> int | OverCap:
    """Least number of applications of elements of ``r_set`` mapping x to y,
    computed by breadth-first search; OVER_CAP if more than ``cap``."""
    if cap < 0:
        raise ValueError("cap must be >= 0")
    if x == y:
        return 0
    frontier = {x}
    seen = {x}
    for dist in range(1, cap + 1):
        nxt = set()
        for z in frontier:
            for g in r_set.elements:
                w = act(g, z)
                if w == y:
                    return dist
                if w not in seen:
                    seen.add(w)
                    nxt.add(w)
        frontier = nxt
        if not frontier:
            break
    return OVER_CAP


def ball(r_set: GeneratorSet, center: int, radius: int) -> tuple[int, ...]:
    """All points within ``radius`` steps of ``center``, sorted."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    seen = {center}
    frontier = {center}
    for _ in range(radius):
        nxt = set()
        for z in frontier:
            for g in r_set.elements:
                w = act(g, z)
                if w not in seen:
                    seen.add(w)
                    nxt.add(w)
        frontier = nxt
        if not frontier:
            break
    return tuple(sorted(seen))


# -- partial bijections ---------------------------------------------------


@dataclass(frozen=True)
class PartialBijection:
    """A bijection between two subsets of the naturals, given by membership
    tests and mutually inverse maps.  ``displacement_bound`` is a declared
    (not verified) bound on how far points move, in metric steps; verifying
    it is only possible pointwise, so spot checks live in the test suite.
    """

    domain_test: Callable[[int], bool]
    map: Callable[[int], int]
    inverse_map: Callable[[int], int]
    range_test: Callable[[int], bool]
    displacement_bound: int | None = None


def identity_pb() -> PartialBijection:
    return PartialBijection(
        domain_test=lambda n: True,
        map=lambda n: n,
        inverse_map=lambda n: n,
        range_test=lambda n: True,
        displacement_bound=0,
    )


def compose_pb(p: PartialBijection, q: PartialBijection) -> PartialBijection:
    """Apply p, then q; defined where p lands inside q's domain."""
    bound = None
    if p.displacement_bound is not None and q.displacement_bound is not None:
        bound = p.displacement_bound + q.displacement_bound
    return PartialBijection(
        domain_test=lambda n: p.domain_test(n) and q.domain_test(p.map(n)),
        map=lambda n: q.map(p.map(n)),
        inverse_map=lambda n: p.inverse_map(q.inverse_map(n)),
        range_test=lambda n: q.range_test(n) and p.range_test(q.inverse_map(n)),
        displacement_bound=bound,
    )


def invert_pb(p: PartialBijection) -> PartialBijection:
    return PartialBijection(
        domain_test=p.range_test,
        map=p.inverse_map,
        inverse_map=p.map,
        range_test=p.domain_test,
        displacement_bound=p.displacement_bound,
    )


def restrict_pb(p: PartialBijection, s: Callable[[int], bool]) -> PartialBijection:
    return PartialBijection(
        domain_test=lambda n: p.domain_test(n) and s(n),
        map=p.map,
        inverse_map=p.inverse_map,
        range_test=lambda n: p.range_test(n) and s(p.inverse_map(n)),
        displacement_bound=p.displacement_bound,
    )


def piecewise_pb(parts: Sequence[PartialBijection]) -> PartialBijection:
    """Glue finitely many partial bijections with pairwise disjoint domains
    and ranges.  Disjointness is checked lazily at each queried point."""
    parts = tuple(parts)
    bounds = [p.displacement_bound for p in parts]
    bound = None if any(b is None for b in bounds) or not bounds else max(bounds)

    def owner(n: int) -> PartialBijection | None:
        claims = [p for p in parts if p.domain_test(n)]
        if len(claims) > 1:
            raise DisjointnessViolation(n, "domain")
        return claims[0] if claims else None

    def co_owner(n: int) -> PartialBijection | None:
        claims = [p for p in parts if p.range_test(n)]
        if len(claims) > 1:
            raise DisjointnessViolation(n, "range")
        return claims[0] if claims else None

    def map_fn(n: int) -> int:
        p = owner(n)
        if p is None:
            raise ValueError(f"{n} not in piecewise domain")
        return p.map(n)

    def inverse_fn(n: int) -> int:
        p = co_owner(n)
        if p is None:
            raise ValueError(f"{n} not in piecewise range")
        return p.inverse_map(n)

    return PartialBijection(
        domain_test=lambda n: owner(n) is not None,
        map=map_fn,
        inverse_map=inverse_fn,
        range_test=lambda n: co_owner(n) is not None,
        displacement_bound=bound,
    )


# -- boundary ratios and paradox witnesses --------------------------------


def is_folner(k_words: Sequence[Word], n: int, f_set: Iterable[int]) -> bool:
    """True iff n * |F \\ kF| < |F| for every k (exact integer arithmetic)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    f = frozenset(f_set)
    if not f:
        raise EmptySetError("F must be non-empty")
    for k in k_words:
        image = {act(k, x) for x in f}
        if n * len(f - image) >= len(f):
            return False
    return True


FOLNER_MAX_GROUND = 24
FOLNER_MAX_SIZE = 8


def folner_search(
    k_words: Sequence[Word],
    n: int,
    ground: Iterable[int],
    max_size: int,
) -> frozenset[int] | None:
    """First subset of ``ground`` (smallest size, then lexicographic over
    the sorted ground) whose boundary ratio beats 1/n for every k, or None.
    """
    base = tuple(sorted(set(ground)))
    if len(base) > FOLNER_MAX_GROUND:
        raise SizeGuardError(f"ground capped at {FOLNER_MAX_GROUND}, got {len(base)}")
    if max_size > FOLNER_MAX_SIZE:
        raise SizeGuardError(f"max_size capped at {FOLNER_MAX_SIZE}, got {max_size}")
    for size in range(1, min(max_size, len(base)) + 1):
        for combo in itertools.combinations(base, size):
            if is_folner(k_words, n, combo):
                return frozenset(combo)
    return None


def wbt_free(k_words: Sequence[Word]) -> tuple[Word, Word] | None:
    """The first non-commuting pair of a finite word set, in shortlex order,
    or None if all pairs commute.

    In a free group a finite set generates a non-amenable subgroup exactly
    when two of its members fail to commute, so this single test decides
    whether the set witnesses a paradoxical decomposition.
    """
    if not k_words:
        return None
    rank = k_words[0].rank
    for w in k_words:
        if w.rank != rank:
            raise RankMismatch(f"rank {w.rank} vs {rank}")
    e = enumeration(rank)
    pool = sorted({e.word_to_index(w) for w in k_words})
    words = [e.index_to_word(i) for i in pool]
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            x, y = words[i], words[j]
            if mul(x, y) != mul(y, x):
                return x, y
    return None
