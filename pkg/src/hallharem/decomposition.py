"""Doubling decompositions of free-group actions, built and verified.

The action graph of a free group acting on itself by left multiplication
joins index x to every index in K∘x for a fixed symmetric word set K
containing the identity.  Driving the lazy matcher on this graph at k = 2
yields a two-to-one assignment whose two branches psi1/psi2 split the
naturals into two computable halves, each carried back onto the whole set
by translations theta drawn from K; the resulting piece families (indexed
by K) are what ``verify_decomposition`` checks on finite windows.

``ClassicF2Decomp`` is the hand-built rank-2 decomposition along initial
letters (with the usual adjustment absorbing the negative powers of the
first generator), used as an engine-independent oracle for the verifier.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Protocol, Sequence

from .core_graph import BipartiteOracle
from .errors import EmptySetError, InternalError
from .group_kit import GeneratorSet, Word, act, enumeration, identity, inv
from .harem_engine import DEFAULT_MAX_BALL, EngineState, identity_witness

TIGHT_EXPANSION_N = 2  # any finite set loses half its size under some generator


@dataclass(frozen=True)
class ActionGraphSpec:
    """Recipe for the action graph of a rank-m free group.

    In tight mode the edge set K is the generating ball itself (n1 = 1);
    corollary mode takes the n1-fold product K = R^n1 where n1 satisfies
    (1 + 1/n)^n1 >= 3 exactly, trading a denser graph for the generic
    expansion argument.
    """

    rank: int
    r_set: GeneratorSet
    n: int
    n1: int
    mode: str
    k_set: GeneratorSet

    def __post_init__(self) -> None:
        if self.mode not in ("tight", "corollary"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.n < 1 or self.n1 < 1:
            raise ValueError("n and n1 must be >= 1")
        if self.mode == "corollary":
            if (1 + Fraction(1, self.n)) ** self.n1 < 3:
                raise ValueError(f"(1 + 1/{self.n})^{self.n1} < 3")
            if self.k_set != self.r_set.power(self.n1):
                raise ValueError("corollary mode requires k_set = r_set^n1")
        elif self.k_set != self.r_set:
            raise ValueError("tight mode requires k_set = r_set")


def tight_spec(rank: int = 2) -> ActionGraphSpec:
    r = GeneratorSet.standard(rank)
    return ActionGraphSpec(
        rank=rank, r_set=r, n=TIGHT_EXPANSION_N, n1=1, mode="tight", k_set=r
    )


def corollary_spec(rank: int = 2, n: int = 1) -> ActionGraphSpec:
    r = GeneratorSet.standard(rank)
    n1 = 1
    while (1 + Fraction(1, n)) ** n1 < 3:
        n1 += 1
    return ActionGraphSpec(
        rank=rank, r_set=r, n=n, n1=n1, mode="corollary", k_set=r.power(n1)
    )


def build_action_graph(spec: ActionGraphSpec) -> BipartiteOracle:
    """Both sides are the word indices; x and y are adjacent iff y lies in
    K∘x.  K is symmetric with identity, so adjacency is symmetric and every
    index is its own neighbor."""
    memo: dict[int, tuple[int, ...]] = {}
    k_words = spec.k_set.elements

    def row(i: int) -> tuple[int, ...]:
        cached = memo.get(i)
        if cached is None:
            cached = tuple(sorted({act(k, i) for k in k_words}))
            memo[i] = cached
        return cached

    return BipartiteOracle(
        neighbors=lambda v: row(v.index),
        degree=lambda v: len(row(v.index)),
        name=f"action(rank={spec.rank},mode={spec.mode})",
    )


class DecompProvider(Protocol):
    def psi(self, m: int) -> tuple[int, int]: ...

    def theta(self, m: int, which: int) -> Word: ...


class ParadoxDecomp:
    """Engine-backed doubling decomposition of a free-group action.

    psi(m) is the sorted pair of right partners of left vertex m under the
    lazy (1,2)-matching; theta(m, i) is the first word of K carrying m to
    psi_i(m).  Pieces follow: m belongs to A_k iff theta(m, 1) = k and to
    B_k iff theta(m, 2) = k.  Queries run engine steps on demand and are
    practical only for small indices.
    """

    def __init__(self, spec: ActionGraphSpec, max_ball_size: int = DEFAULT_MAX_BALL):
        self.spec = spec
        self.oracle = build_action_graph(spec)
        self.engine = EngineState(
            self.oracle, k=2, h=identity_witness(), max_ball_size=max_ball_size
        )

    def psi(self, m: int) -> tuple[int, int]:
        star = self.engine.match_left(m)
        return star[0], star[1]

    def theta(self, m: int, which: int) -> Word:
        if which not in (1, 2):
            raise ValueError("which must be 1 or 2")
        target = self.psi(m)[which - 1]
        for k in self.spec.k_set.elements:
            if act(k, m) == target:
                return k
        raise InternalError(f"no word of K maps {m} to its partner {target}")

    def a_member(self, k: Word, m: int) -> bool:
        return self.theta(m, 1) == k

    def b_member(self, k: Word, m: int) -> bool:
        return self.theta(m, 2) == k

    def committed_lefts(self) -> tuple[int, ...]:
        return tuple(sorted(self.engine.stars))

    def run_steps(self, count: int) -> None:
        for _ in range(count):
            self.engine.run_step()


_TRUNK = "trunk"
_WA, _WAI, _WB, _WBI = "W(a)", "W(A)", "W(b)", "W(B)"


class ClassicF2Decomp:
    """The textbook rank-2 doubling along initial letters.

    Words are split by first letter into W(a), W(A), W(b), W(B) plus the
    trunk {e, A, AA, ...}, which is absorbed into the a-side piece.  With
    P1 = W(a) ∪ trunk, the two exact identities are
    X = P1 ⊔ a·(X ∖ P1) and X = W(b) ⊔ b·(X ∖ W(b)), giving a four-piece
    decomposition with translations drawn from {e, A, B}.
    """

    def __init__(self) -> None:
        self.rank = 2
        self.k_set = GeneratorSet.standard(2)
        self._enum = enumeration(2)
        self._id = identity(2)
        self._a_inv = Word(2, (-1,))
        self._b_inv = Word(2, (-2,))
        self._pieces: dict[int, str] = {}

    def piece(self, m: int) -> str:
        got = self._pieces.get(m)
        if got is None:
            w = self._enum.index_to_word(m)
            if all(l == -1 for l in w.letters):
                got = _TRUNK
            else:
                got = {1: _WA, -1: _WAI, 2: _WB, -2: _WBI}[w.letters[0]]
            self._pieces[m] = got
        return got

    def in_adjusted_wa(self, m: int) -> bool:
        return self.piece(m) in (_WA, _TRUNK)

    def in_wb(self, m: int) -> bool:
        return self.piece(m) == _WB

    def psi(self, m: int) -> tuple[int, int]:
        p1 = m if self.in_adjusted_wa(m) else act(self._a_inv, m)
        p2 = m if self.in_wb(m) else act(self._b_inv, m)
        return p1, p2

    def theta(self, m: int, which: int) -> Word:
        if which == 1:
            return self._id if self.in_adjusted_wa(m) else self._a_inv
        if which == 2:
            return self._id if self.in_wb(m) else self._b_inv
        raise ValueError("which must be 1 or 2")

    def a_member(self, k: Word, m: int) -> bool:
        return k == self.theta(m, 1)

    def b_member(self, k: Word, m: int) -> bool:
        return k == self.theta(m, 2)


def planted_defect_classifier(
    base: Callable[[Word, int], bool], index: int, wrong: Word
) -> Callable[[Word, int], bool]:
    """Misclassify one index into the piece of ``wrong`` (test fixture)."""

    def classify(k: Word, m: int) -> bool:
        if m == index:
            return k == wrong
        return base(k, m)

    return classify


@dataclass(frozen=True)
class DecompViolation:
    kind: str
    index: int
    detail: tuple

    def __str__(self) -> str:
        return f"{self.kind}@{self.index}{self.detail}"


@dataclass(frozen=True)
class DecompReport:
    violations: tuple[DecompViolation, ...]
    checked: int

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_decomposition(
    classify_a: Callable[[Word, int], bool],
    classify_b: Callable[[Word, int], bool],
    k_set: GeneratorSet,
    window: int | Iterable[int],
) -> DecompReport:
    """Mechanical check of the doubling identities on a finite window.

    For every m in the window: m must lie in exactly one A-piece and
    exactly one B-piece, and m must be hit by exactly one translate among
    {k∘A_k} ∪ {k∘B_k}.  The preimage of m under k is k⁻¹∘m, so the second
    check runs over |K| candidate sources per side.  Violations are data.
    """
    indices = range(window) if isinstance(window, int) else window
    inverses = [(k, inv(k)) for k in k_set.elements]
    violations: list[DecompViolation] = []
    checked = 0
    for m in indices:
        checked += 1
        a_homes = tuple(str(k) for k in k_set.elements if classify_a(k, m))
        if len(a_homes) != 1:
            violations.append(DecompViolation("a-pieces", m, a_homes))
        b_homes = tuple(str(k) for k in k_set.elements if classify_b(k, m))
        if len(b_homes) != 1:
            violations.append(DecompViolation("b-pieces", m, b_homes))
        hits: list[tuple[str, str, int]] = []
        for k, k_inv in inverses:
            x = act(k_inv, m)
            if classify_a(k, x):
                hits.append(("A", str(k), x))
            if classify_b(k, x):
                hits.append(("B", str(k), x))
        if len(hits) != 1:
            violations.append(DecompViolation("translates", m, tuple(hits)))
    return DecompReport(tuple(violations), checked)


def verify_engine_window(decomp: ParadoxDecomp) -> DecompReport:
    """Check the doubling identities on the portion an engine has committed.

    Every committed left vertex must carry two distinct partners reachable
    through K (theta-soundness, one A-home and one B-home each), and every
    removed right vertex must be claimed by exactly one branch of exactly
    one committed star.
    """
    engine = decomp.engine
    k_words = decomp.spec.k_set.elements
    violations: list[DecompViolation] = []
    claimed: dict[int, list[tuple[int, int]]] = {}
    committed = sorted(engine.stars)
    for m in committed:
        p1, p2 = decomp.psi(m)
        if not p1 < p2:
            violations.append(DecompViolation("psi-order", m, (p1, p2)))
        for which, target in ((1, p1), (2, p2)):
            claimed.setdefault(target, []).append((m, which))
            homes = [k for k in k_words if act(k, m) == target]
            if not homes:
                violations.append(DecompViolation("theta-unsound", m, (which, target)))
                continue
            theta = decomp.theta(m, which)
            if act(theta, m) != target or theta not in k_words:
                violations.append(DecompViolation("theta-unsound", m, (which, str(theta))))
    removed = frozenset(engine.removed_right)
    for target, owners in sorted(claimed.items()):
        if len(owners) != 1:
            violations.append(DecompViolation("translates", target, tuple(owners)))
        if target not in removed:
            violations.append(DecompViolation("image-not-removed", target, ()))
    for target in sorted(removed - set(claimed)):
        violations.append(DecompViolation("removed-unclaimed", target, ()))
    return DecompReport(tuple(violations), len(committed))


@dataclass(frozen=True)
class ExpansionEntry:
    f_set: tuple[int, ...]
    expanded: bool
    witness: Word | None


def folner_failure_certificate(
    spec: ActionGraphSpec, family: Sequence[Iterable[int]]
) -> list[ExpansionEntry]:
    """For each finite set F, report whether some generator k of R satisfies
    n * |F ∖ kF| >= |F| (exact arithmetic), with the first such witness."""
    entries: list[ExpansionEntry] = []
    for f_raw in family:
        f = frozenset(f_raw)
        if not f:
            raise EmptySetError("family members must be non-empty")
        witness = None
        for k in spec.r_set.elements:
            image = {act(k, x) for x in f}
            if spec.n * len(f - image) >= len(f):
                witness = k
                break
        entries.append(ExpansionEntry(tuple(sorted(f)), witness is not None, witness))
    return entries


TSV_HEADER = "index\tword\tpsi1\tpsi1_word\tpsi2\tpsi2_word\ttheta1\ttheta2"


def tsv_rows(provider: DecompProvider, window: range, rank: int = 2) -> Iterable[str]:
    """Deterministic TSV dump of a decomposition over an index window."""
    e = enumeration(rank)
    yield TSV_HEADER
    for m in window:
        p1, p2 = provider.psi(m)
        yield "\t".join(
            (
                str(m),
                str(e.index_to_word(m)),
                str(p1),
                str(e.index_to_word(p1)),
                str(p2),
                str(e.index_to_word(p2)),
                str(provider.theta(m, 1)),
                str(provider.theta(m, 2)),
            )
        )
