"""
Classification of almost strongly quasipositive 4-braids.

Input: K = g^-1 beta where g is band(1,2) or band(1,3) and beta is a positive
band word in B_4.  The outcome is one of

  * quasipositive       -- an explicit conjugate-shaped quasipositive word,
  * destabilizable      -- a negative destabilization to a strongly
                           quasipositive word on at most 3 strands,
  * flype-destabilize   -- a negative flype followed by such a
                           destabilization,

each carried by a replayable certificate.

The engine enumerates the reachable class of the word under the
length-preserving moves actually used in the case analysis: rotation,
band commutations, the triple relations

    band(j,k) band(i,j) = band(i,j) band(i,k) = band(i,k) band(j,k),

slides of positive letters across the negative one, conjugation by the
cycling element d = s(3) s(2) s(1) (which permutes all band generators), and
free cancellation.  Positive or destabilizable states are accepted directly;
otherwise the minimal-complexity standard representative

    band(1,2)^-1 R_1 S_1 R_2 ... S_{m-1} R_m

(R blocks over {band(2,3), band(3,4), band(2,4)}, S blocks over the two
remaining strand-1 bands) is classified by the case analysis, emitting
explicit quasipositive productions or the negative-flype chain.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from itertools import product as iproduct
from typing import Iterable, Optional, Sequence

from . import garside
from .certificates import (
    Certificate,
    Step,
    conjugation,
    cycling,
    destabilization,
    flype_step,
    rewrite,
    strand_destabilization,
)
from .positivity import ShapeError, is_qp
from .words import (
    BraidWord,
    Factor,
    Group,
    GroupedWord,
    Letter,
    Plain,
    band,
    band_std_letters,
    cycle,
    find_flypes,
    s,
    split_destabilize,
    strand_destabilize,
    word,
)

BANDS4: tuple[tuple[int, int], ...] = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))

DEFAULT_BUDGET = 40_000


class ClassifierError(RuntimeError):
    """The case analysis reached a state its dichotomies rule out."""


@dataclass
class FourBraidOutcome:
    variant: str  # "quasipositive" | "destabilizable" | "flype_destabilize"
    certificate: Certificate
    result: Optional[BraidWord] = None       # SQP word on <= 3 strands
    qp_word: Optional[GroupedWord] = None    # conjugate-shaped QP word


# ---------------------------------------------------------------------------
# Precomputed band tables for B_4
# ---------------------------------------------------------------------------


def _bw(*pairs: tuple[int, int], signs: Optional[Sequence[int]] = None) -> BraidWord:
    signs = signs or [1] * len(pairs)
    return BraidWord(4, tuple(band(i, j, sg) for (i, j), sg in zip(pairs, signs)))


@lru_cache(maxsize=None)
def _pair_nf() -> dict:
    """Normal-form key of every ordered product of two positive bands."""
    table = {}
    for p, q in iproduct(BANDS4, BANDS4):
        table[(p, q)] = str(garside.normal_form(_bw(p, q)))
    return table


@lru_cache(maxsize=None)
def _conj_band(g: tuple[int, int], x: tuple[int, int], left: bool) -> Optional[tuple[int, int]]:
    """g x g^-1 (left) or g^-1 x g (not left) when the result is a band."""
    gw = _bw(g)
    xw = _bw(x)
    target = gw * xw * gw.inverse() if left else gw.inverse() * xw * gw
    for y in BANDS4:
        if garside.equal(target, _bw(y)):
            return y
    return None


@lru_cache(maxsize=None)
def _neg_pass_right(g: tuple[int, int], x: tuple[int, int]) -> list:
    """Solutions (y, h) of g^-1 x = y h^-1, i.e. g y = x h in the monoid."""
    nf = _pair_nf()
    out = []
    for y, h in iproduct(BANDS4, BANDS4):
        if nf[(g, y)] == nf[(x, h)]:
            out.append((y, h))
    return out


@lru_cache(maxsize=None)
def _neg_pass_left(g: tuple[int, int], x: tuple[int, int]) -> list:
    """Solutions (h, y) of x g^-1 = h^-1 y, i.e. h x = y g in the monoid."""
    nf = _pair_nf()
    out = []
    for h, y in iproduct(BANDS4, BANDS4):
        if nf[(h, x)] == nf[(y, g)]:
            out.append((h, y))
    return out


_DELTA_SHIFT = {
    (1, 2): (2, 3), (2, 3): (3, 4), (3, 4): (1, 4), (1, 4): (1, 2),
    (1, 3): (2, 4), (2, 4): (1, 3),
}


def _delta_conj_word(w: BraidWord) -> BraidWord:
    letters = tuple(
        band(*_DELTA_SHIFT[(l.i, l.j)], l.sign) for l in w.letters
    )
    return BraidWord(4, letters)


def _bands_commute(p: tuple[int, int], q: tuple[int, int]) -> bool:
    (a, b), (c, d) = p, q
    if b < c or d < a:
        return True
    return (a < c and d < b) or (c < a and b < d)


def _triple_partners(x: tuple[int, int], y: tuple[int, int]) -> list:
    """Other two spellings of the product x y under the triple relations."""
    sx, sy = set(x), set(y)
    shared = sx & sy
    if len(shared) != 1:
        return []
    a, b, c = sorted(sx | sy)
    forms = [((b, c), (a, b)), ((a, b), (a, c)), ((a, c), (b, c))]
    if (x, y) not in forms:
        return []
    return [f for f in forms if f != (x, y)]


# ---------------------------------------------------------------------------
# Reachable class exploration
# ---------------------------------------------------------------------------


def _as_band_word(w: BraidWord) -> BraidWord:
    letters = []
    for l in w.letters:
        letters.append(band(l.i, l.j, l.sign))
    return BraidWord(w.strands, tuple(letters))


def _state_neighbors(w: BraidWord):
    letters = w.letters
    L = len(letters)
    if L:
        yield cycle(w, 1), cycling(1)
    dshift = _delta_conj_word(w)
    yield dshift, None  # caller expands into conjugation + rewrite
    for t in range(L - 1):
        x, y = letters[t], letters[t + 1]
        px, py = (x.i, x.j), (y.i, y.j)
        head, tail = letters[:t], letters[t + 2:]
        if x.sign > 0 and y.sign > 0:
            if _bands_commute(px, py):
                out = BraidWord(4, head + (y, x) + tail)
                yield out, rewrite(out, note="band commutation")
            for (u, v) in _triple_partners(px, py):
                out = BraidWord(4, head + (band(*u), band(*v)) + tail)
                yield out, rewrite(out, note="triple relation")
        elif x.sign > 0 and y.sign < 0:
            g = py
            if px == g:
                out = BraidWord(4, head + tail)
                yield out, rewrite(out, note="free cancellation")
                continue
            conj = _conj_band(g, px, True)
            if conj is not None:
                out = BraidWord(4, head + (y, band(*conj)) + tail)
                yield out, rewrite(out, note="slide across negative")
            for (h, u) in _neg_pass_left(g, px):
                out = BraidWord(4, head + (band(*h, -1), band(*u)) + tail)
                yield out, rewrite(out, note="negative exchange")
        elif x.sign < 0 and y.sign > 0:
            g = px
            if py == g:
                out = BraidWord(4, head + tail)
                yield out, rewrite(out, note="free cancellation")
                continue
            conj = _conj_band(g, py, False)
            if conj is not None:
                out = BraidWord(4, head + (band(*conj), x) + tail)
                yield out, rewrite(out, note="slide across negative")
            for (u, h) in _neg_pass_right(g, py):
                out = BraidWord(4, head + (band(*u), band(*h, -1)) + tail)
                yield out, rewrite(out, note="negative exchange")


def _explore(K: BraidWord, budget: int, early: bool = False):
    """BFS closure of K under the moves; returns parents map for replay.

    With ``early`` the search stops as soon as a terminal state (positive,
    destabilizable, or with a positive partner of the negative band) has been
    enqueued, since the scanning passes accept those outright.
    """
    start = K.letters
    parents: dict[tuple, tuple[Optional[tuple], tuple[Step, ...], BraidWord]] = {
        start: (None, (), K)
    }
    order = [K]
    queue = deque([K])
    nodes = 0
    dword = word(4, 3, 2, 1)

    def terminal(state: BraidWord) -> bool:
        if all(l.sign > 0 for l in state.letters):
            return True
        if _destab_scan(state) is not None:
            return True
        return _immediate_qp(state) is not None

    if early and terminal(K):
        return parents, order
    while queue and nodes < budget:
        cur = queue.popleft()
        nodes += 1
        for nxt, step in _state_neighbors(cur):
            if nxt.letters in parents:
                continue
            if step is None:
                steps = (
                    conjugation(dword, note="band cycling element"),
                    rewrite(nxt, note="shift all bands"),
                )
            else:
                steps = (step,)
            parents[nxt.letters] = (cur.letters, steps, nxt)
            queue.append(nxt)
            order.append(nxt)
            if early and terminal(nxt):
                return parents, order
    return parents, order


def _steps_to(parents, key) -> list[Step]:
    steps: list[Step] = []
    while parents[key][0] is not None:
        prev, st, _ = parents[key]
        steps.extend(reversed(st))
        key = prev
    steps.reverse()
    return steps


# ---------------------------------------------------------------------------
# Standard form parsing and block classes
# ---------------------------------------------------------------------------

_R_ALPHABET = {(2, 3), (3, 4), (2, 4)}
_S1_ALPHABET = {(1, 3), (1, 4)}  # case 1 S blocks
_S2_ALPHABET = {(1, 2), (1, 4)}  # case 2 S blocks


def _block_class(letters: tuple) -> set:
    """All spellings of a positive band block under commutation and the
    triple relations (finite: the moves preserve length)."""
    seen = {letters}
    queue = deque([letters])
    while queue:
        cur = queue.popleft()
        for t in range(len(cur) - 1):
            x, y = cur[t], cur[t + 1]
            cands = []
            if _bands_commute(x, y):
                cands.append((y, x))
            cands.extend(_triple_partners(x, y))
            for u, v in cands:
                nxt = cur[:t] + (u, v) + cur[t + 2:]
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    return seen


def _block_contains(letters: tuple, target: tuple[int, int]) -> bool:
    return any(target in cls for cls in _block_class(letters))


def _block_sorted(letters: tuple, order: Sequence[tuple[int, int]]) -> Optional[tuple]:
    """A spelling of the block matching the run pattern order[0]^* order[1]^* ...,
    or None."""
    for cls in _block_class(letters):
        idx = 0
        ok = True
        for p in cls:
            while idx < len(order) and p != order[idx]:
                idx += 1
            if idx == len(order):
                ok = False
                break
        if ok:
            return cls
    return None


@dataclass
class StandardForm:
    """sigma^-1 R_1 S_1 R_2 ... S_{m-1} R_m as letter tuples of band pairs."""

    neg: tuple[int, int]
    rs: list[tuple]      # R blocks (possibly empty first/last)
    ss: list[tuple]      # S blocks, all nonempty

    @property
    def m(self) -> int:
        return len(self.rs)

    def complexity(self) -> tuple:
        return (self.m,) + tuple(-len(r) for r in self.rs)


def _parse_standard(state: BraidWord, neg_pair: tuple[int, int], s_alpha: set) -> Optional[StandardForm]:
    letters = state.letters
    if not letters or letters[0].sign > 0 or (letters[0].i, letters[0].j) != neg_pair:
        return None
    rs: list[tuple] = []
    ss: list[tuple] = []
    cur_r: list[tuple[int, int]] = []
    cur_s: list[tuple[int, int]] = []
    in_r = True
    for l in letters[1:]:
        if l.sign < 0:
            return None
        p = (l.i, l.j)
        if p in _R_ALPHABET:
            if not in_r:
                ss.append(tuple(cur_s))
                cur_s = []
                in_r = True
            cur_r.append(p)
        elif p in s_alpha:
            if in_r:
                rs.append(tuple(cur_r))
                cur_r = []
                in_r = False
            cur_s.append(p)
        else:
            return None
    if in_r:
        rs.append(tuple(cur_r))
    else:
        ss.append(tuple(cur_s))
        rs.append(())
    return StandardForm(neg_pair, rs, ss)


# ---------------------------------------------------------------------------
# Quasipositive word builder
# ---------------------------------------------------------------------------


class QPBuilder:
    """Accumulates factors conj * band * conj^-1 and emits both the flattened
    braid word and the conjugate-shaped grouped word."""

    def __init__(self, strands: int = 4):
        self.strands = strands
        self.letters: list[Letter] = []
        self.factors: list[Factor] = []

    def add(self, conj: Sequence[Letter], core: tuple[int, int]):
        conj = list(conj)
        inv = [l.inverse() for l in reversed(conj)]
        self.letters.extend(conj + [band(*core)] + inv)
        head: list[int] = []
        for l in conj:
            head.extend(self._letter_ints(l))
        body = head + self._band_ints(core) + [-x for x in reversed(head)]
        if len(body) == 1:
            self.factors.append(Plain(body[0]))
        else:
            self.factors.append(Group(tuple(body)))

    def _letter_ints(self, l: Letter) -> list[int]:
        """Signed standard-generator expansion of one letter."""
        if l.std:
            return [l.i * l.sign]
        return [
            ll.i * ll.sign for ll in band_std_letters(l.i, l.j, l.sign)
        ]

    def _band_ints(self, core: tuple[int, int]) -> list[int]:
        i, j = core
        head = list(range(j - 1, i, -1))
        if not head:
            return [i]
        return head + [i] + [-x for x in reversed(head)]

    def word(self) -> BraidWord:
        return BraidWord(self.strands, tuple(self.letters))

    def grouped(self) -> GroupedWord:
        return GroupedWord(self.strands, tuple(self.factors))


def _qp_from_segments(segments: Sequence[tuple[Sequence[Letter], Sequence[tuple[int, int]]]]) -> QPBuilder:
    """Each segment is (conjugator letters, band cores); cores share the
    conjugator."""
    qb = QPBuilder()
    for conj, cores in segments:
        for core in cores:
            qb.add(conj, core)
    return qb


def _pairs(letters: Iterable[Letter]) -> list[tuple[int, int]]:
    return [(l.i, l.j) for l in letters]


# ---------------------------------------------------------------------------
# Bracketed quasipositive productions
# ---------------------------------------------------------------------------


@dataclass
class C:
    """A conjugated bracket: conj letters, then contents, then the inverse."""

    conj: tuple[Letter, ...]
    contents: tuple


@dataclass
class B:
    """A bare positive band core."""

    pair: tuple[int, int]


def _flatten_brackets(items: Sequence, prefix: tuple[Letter, ...], qb: QPBuilder):
    for item in items:
        if isinstance(item, B):
            qb.add(prefix, item.pair)
        else:
            _flatten_brackets(item.contents, prefix + tuple(item.conj), qb)


def _production(state: BraidWord, pre_steps: list[Step], items: Sequence) -> FourBraidOutcome:
    qb = QPBuilder()
    _flatten_brackets(items, (), qb)
    out = qb.word()
    steps = list(pre_steps) + [rewrite(out, note="quasipositive production")]
    cert = Certificate(state, out, steps)
    grouped = qb.grouped()
    if not is_qp(grouped):
        raise ClassifierError("production did not emit a conjugate-shaped word")
    return FourBraidOutcome("quasipositive", cert, qp_word=grouped)


def _cores(pairs: Iterable[tuple[int, int]]) -> list:
    return [B(p) for p in pairs]


def _nb(i: int, j: int, sign: int = +1) -> Letter:
    return band(i, j, sign)


# ---------------------------------------------------------------------------
# State scans
# ---------------------------------------------------------------------------


def _positive_outcome(state, steps) -> FourBraidOutcome:
    from .positivity import sqp_word_to_qp_shape

    grouped = GroupedWord(
        4, tuple(_band_factor(l) for l in state.letters)
    )
    cert = Certificate(state, state, list(steps))
    return FourBraidOutcome(
        "quasipositive", cert, qp_word=sqp_word_to_qp_shape(grouped)
    )


def _band_factor(l: Letter):
    from .words import BandFactor

    return BandFactor(l.i, l.j, l.sign)


def _destab_scan(state: BraidWord) -> Optional[tuple[int, BraidWord]]:
    """A strand touched exactly once, by the negative letter, with a positive
    remainder: the negative destabilization of the case analysis."""
    for k in range(1, 5):
        touching = [l for l in state.letters if l.i == k or l.j == k]
        if len(touching) == 1 and touching[0].sign < 0:
            got = strand_destabilize(state, k)
            assert got is not None
            out, sign = got
            if all(l.sign > 0 for l in out.letters):
                return k, out
    return None


def _immediate_qp(state: BraidWord) -> Optional[tuple[list[Step], list]]:
    """Negative band with a positive partner elsewhere: conjugate absorption."""
    neg = next(t for t, l in enumerate(state.letters) if l.sign < 0)
    g = (state.letters[neg].i, state.letters[neg].j)
    rotated = cycle(state, neg)
    rest = rotated.letters[1:]
    partner = next((t for t, l in enumerate(rest) if (l.i, l.j) == g and l.sign > 0), None)
    if partner is None:
        return None
    steps = [cycling(neg, note="negative letter to front")] if neg else []
    beta1, beta2 = rest[:partner], rest[partner + 1:]
    # sigma^-1 beta1 sigma beta2 = (sigma^-1 beta1 sigma) beta2
    items = [C((_nb(*g, -1),), tuple(_cores(_pairs(beta1))))] + _cores(_pairs(beta2))
    return steps, items


# ---------------------------------------------------------------------------
# Case chains on the minimal standard representative
# ---------------------------------------------------------------------------


def _respell_block(state: BraidWord, block_start: int, block_letters: tuple, spelled: tuple) -> tuple[BraidWord, Optional[Step]]:
    if block_letters == spelled:
        return state, None
    letters = (
        state.letters[:block_start]
        + tuple(band(*p) for p in spelled)
        + state.letters[block_start + len(block_letters):]
    )
    out = BraidWord(4, letters)
    return out, rewrite(out, note="respell block")


def _block_positions(form: StandardForm) -> tuple[list[int], list[int]]:
    """Start positions (in the state word) of the R and S blocks."""
    r_pos, s_pos = [], []
    pos = 1
    for idx, r in enumerate(form.rs):
        r_pos.append(pos)
        pos += len(r)
        if idx < len(form.ss):
            s_pos.append(pos)
            pos += len(form.ss[idx])
    return r_pos, s_pos


def _spelling_with(block: tuple, target: tuple[int, int], where: str) -> Optional[tuple]:
    for cls in sorted(_block_class(block)):
        if where == "start" and cls and cls[0] == target:
            return cls
        if where == "end" and cls and cls[-1] == target:
            return cls
        if where == "any" and target in cls:
            return cls
    return None


def _case1_chain(state: BraidWord, pre_steps: list[Step], form: StandardForm) -> FourBraidOutcome:
    m = form.m
    if m == 1:
        raise ClassifierError("single-block standard form escaped the destabilization scan")
    if not form.rs[-1]:
        raise ClassifierError("minimal standard form has an empty final R block")
    r_pos, s_pos = _block_positions(form)

    # claim: S_i containing band(1,d) with a later R_j containing band(2,d)
    for d in (3, 4):
        for i, sblock in enumerate(form.ss):
            if (1, d) not in sblock:
                continue
            for j in range(i + 1, m):
                if not _block_contains(form.rs[j], (2, d)):
                    continue
                spelled = _spelling_with(form.rs[j], (2, d), "any")
                state2, step = _respell_block(state, r_pos[j], form.rs[j], spelled)
                steps = pre_steps + ([step] if step else [])
                k = spelled.index((2, d))
                s_at = s_pos[i] + sblock.index((1, d))
                r_at = r_pos[j] + k
                beta = _pairs(state2.letters[1:s_at])
                beta1 = _pairs(state2.letters[s_at + 1: r_at])
                beta2 = _pairs(state2.letters[r_at + 1:])
                items = [
                    C((_nb(1, 2, -1),), tuple(_cores(beta) + [B((2, d))])),
                    C((_nb(2, d, -1),), tuple(_cores(beta1))),
                ] + _cores(beta2)
                return _production(state2, steps, items)

    if any((1, 4) in sblock for sblock in form.ss):
        raise ClassifierError("band(1,4) survived in an S block at minimal complexity")

    for j in range(1, m):
        if _block_contains(form.rs[j], (2, 3)):
            raise ClassifierError("band(2,3) in a later R block at minimal complexity")

    if not _block_contains(form.rs[-1], (2, 4)):
        raise ClassifierError("final R block lacks band(2,4) at minimal complexity")

    # claim: band(3,4) in an earlier R block forces quasipositivity
    for i in range(0, m - 1):
        if not _block_contains(form.rs[i], (3, 4)):
            continue
        spelled_i = _spelling_with(form.rs[i], (3, 4), "any")
        state2, step1 = _respell_block(state, r_pos[i], form.rs[i], spelled_i)
        form2 = _parse_standard(state2, (1, 2), _S1_ALPHABET)
        r_pos2, s_pos2 = _block_positions(form2)
        spelled_m = _spelling_with(form2.rs[-1], (2, 4), "end")
        if spelled_m is None:
            raise ClassifierError("cannot spell final R block ending in band(2,4)")
        state3, step2 = _respell_block(state2, r_pos2[-1], form2.rs[-1], spelled_m)
        steps = pre_steps + [st for st in (step1, step2) if st]
        at34 = r_pos2[i] + spelled_i.index((3, 4))
        # first band(1,3) after the chosen band(3,4)
        at13 = next(
            t for t in range(at34 + 1, len(state3.letters))
            if (state3.letters[t].i, state3.letters[t].j) == (1, 3)
        )
        at24 = len(state3.letters) - 1
        beta = _pairs(state3.letters[1:at34])
        beta1 = _pairs(state3.letters[at34 + 1: at13])
        beta2 = _pairs(state3.letters[at13 + 1: at24])
        items = [
            C((_nb(1, 2, -1),), tuple(
                _cores(beta)
                + [C((_nb(3, 4),), tuple(_cores(beta1)))]
                + [B((1, 3))]
            )),
            B((1, 4)),
            C((_nb(2, 4, -1),), tuple(_cores(beta2))),
        ]
        return _production(state3, steps, items)

    if m > 2:
        if _block_contains(form.rs[0], (2, 3)):
            return _case1_b2(state, pre_steps, form, r_pos, s_pos)
        for r in form.rs:
            if any(p != (2, 4) for p in r):
                raise ClassifierError("non-band(2,4) letter in an R block with m > 2")
        for sb in form.ss:
            if any(p != (1, 3) for p in sb):
                raise ClassifierError("impure S block with m > 2")
        rs = [len(r) for r in form.rs]
        ss = [len(sb) for sb in form.ss]
        r1, s1, r2 = rs[0], ss[0], rs[1]
        if r1 == 0:
            raise ClassifierError("empty leading R block with m > 2")
        flat_tail: list[tuple[int, int]] = [(1, 3)] * (ss[1] - 1)
        for idx in range(2, m):
            flat_tail += [(2, 4)] * rs[idx]
            if idx < len(ss):
                flat_tail += [(1, 3)] * ss[idx]
        items = (
            _cores([(1, 4)] * (r1 - 1))
            + [
                C(
                    (_nb(1, 4),),
                    tuple(
                        _cores(
                            [(1, 3)]
                            + [(1, 2)] * (s1 - 1)
                            + [(2, 4)]
                            + [(2, 3)] * (r2 - 1)
                            + [(1, 3)]
                        )
                    ),
                )
            ]
            + _cores(flat_tail)
        )
        return _production(state, list(pre_steps), items)

    # m == 2: the negative flype chain
    return _case1_flype(state, pre_steps, form)


def _case1_b2(state: BraidWord, pre_steps: list[Step], form: StandardForm, r_pos, s_pos) -> FourBraidOutcome:
    """band(2,3) in R_1 with at least three R blocks: the exchange production."""
    spelled = _spelling_with(form.rs[0], (2, 3), "any")
    state2, step = _respell_block(state, r_pos[0], form.rs[0], spelled)
    steps = pre_steps + ([step] if step else [])
    at23 = r_pos[0] + spelled.index((2, 3))
    form2 = _parse_standard(state2, (1, 2), _S1_ALPHABET)
    r_pos2, s_pos2 = _block_positions(form2)
    at24_r2 = r_pos2[1]
    at13_s2 = s_pos2[1]
    at24_r3 = r_pos2[2]
    letters = state2.letters
    beta0 = _pairs(letters[1:at23])
    beta1 = _pairs(letters[at23 + 1: at24_r2])
    beta2 = _pairs(letters[at24_r2 + 1: at13_s2])
    beta3 = _pairs(letters[at13_s2 + 1: at24_r3])
    beta4 = _pairs(letters[at24_r3 + 1:])
    items = [
        C(
            (_nb(3, 4),),
            (
                C(
                    (_nb(1, 2, -1),),
                    tuple(
                        [C((_nb(3, 4, -1),), tuple(
                            _cores(beta0) + [C((_nb(2, 3),), tuple(_cores(beta1)))]
                        ))]
                        + [B((2, 3))]
                        + _cores(beta2)
                        + [B((2, 3))]
                    ),
                ),
                C((_nb(2, 3, -1),), tuple(_cores(beta3) + [B((3, 4))])),
            ),
        ),
    ] + _cores(beta4)
    return _production(state2, steps, items)


def _pow(pair: tuple[int, int], k: int) -> list[Letter]:
    return [band(*pair)] * k


def _case1_flype(state: BraidWord, pre_steps: list[Step], form: StandardForm) -> FourBraidOutcome:
    """m = 2: sort into band(1,2)^-1 24^v 23^w 13^x 34^y 24^z, flype, destabilize."""
    r_pos, s_pos = _block_positions(form)
    sorted_r1 = _block_sorted(form.rs[0], [(2, 4), (2, 3)])
    sorted_r2 = _block_sorted(form.rs[1], [(3, 4), (2, 4)])
    if sorted_r1 is None or sorted_r2 is None or any(p != (1, 3) for p in form.ss[0]):
        raise ClassifierError("two-block standard form is not in the expected shape")
    v = sum(1 for p in sorted_r1 if p == (2, 4))
    w = len(sorted_r1) - v
    x = len(form.ss[0])
    y = sum(1 for p in sorted_r2 if p == (3, 4))
    z = len(sorted_r2) - y
    if z == 0:
        raise ClassifierError("final R block lacks band(2,4) in the flype case")
    steps = list(pre_steps)
    state1, st = _respell_block(state, r_pos[0], form.rs[0], sorted_r1)
    if st:
        steps.append(st)
    form1 = _parse_standard(state1, (1, 2), _S1_ALPHABET)
    rp1, _ = _block_positions(form1)
    state2, st = _respell_block(state1, rp1[1], form1.rs[1], sorted_r2)
    if st:
        steps.append(st)
    # flype chain; band(3,4) letters are spelled s(3) so the flype move applies
    t3 = lambda k: [s(3)] * k
    b = lambda pair, k: [band(*pair)] * k

    w1 = BraidWord(4, tuple(
        b((2, 4), v) + b((2, 3), w) + b((1, 3), x) + b((3, 4), y) + b((2, 4), z)
        + [band(1, 2, -1)]
    ))
    steps.append(cycling(1, note="negative letter to the tail"))
    w2 = BraidWord(4, tuple(
        b((2, 4), v) + b((2, 3), w) + b((1, 3), x) + b((3, 4), y) + b((2, 4), z - 1)
        + [band(1, 4, -1), band(2, 4)]
    ))
    steps.append(rewrite(w2, note="exchange the negative band to band(1,4)"))
    w3 = BraidWord(4, tuple(
        b((2, 4), v) + b((2, 3), w) + b((1, 3), x) + t3(y + 1) + b((2, 3), z - 1)
        + [band(1, 3, -1), band(2, 3), s(3, -1)]
    ))
    steps.append(rewrite(w3, note="move the twist to band(3,4)"))
    steps.append(cycling(len(w3.letters) - 1, note="negative twist to the front"))
    w4 = BraidWord(4, tuple(
        b((2, 3), v) + [s(3, -1)] + b((2, 3), w) + b((1, 3), x) + t3(y + 1)
        + b((2, 3), z - 1) + [band(1, 3, -1), band(2, 3)]
    ))
    steps.append(rewrite(w4, note="pull the twist through band(2,4) powers"))
    sites = [
        t for t in find_flypes(w4)
        if t.top and t.eps == -1 and t.m == y + 1
    ]
    if not sites:
        raise ClassifierError("expected negative flype site is missing")
    site = sites[0]
    steps.append(flype_step(site, note="negative flype"))
    w5 = BraidWord(4, tuple(
        t3(y + 1) + b((2, 3), w) + b((1, 3), x) + [s(3, -1)] + b((2, 3), z - 1)
        + [band(1, 3, -1), band(2, 3)] + b((2, 3), v)
    ))
    from .words import apply_flype

    if apply_flype(w4, site).letters != w5.letters:
        raise ClassifierError("flype did not produce the predicted word")
    w6 = BraidWord(4, tuple(
        t3(y) + b((2, 4), w) + b((1, 4), x) + b((2, 3), z - 1)
        + [band(1, 3, -1)] + b((2, 3), v + 1)
    ))
    steps.append(rewrite(w6, note="cancel the twist pair"))
    w7 = BraidWord(4, tuple(
        t3(y) + b((2, 4), w) + b((2, 3), z - 1)
        + [band(1, 3, -1)] + b((3, 4), x) + b((2, 3), v + 1)
    ))
    steps.append(rewrite(w7, note="slide band(1,4) powers across the negative"))
    got = split_destabilize(w7, 1)
    if got is None or got[1] != -1:
        raise ClassifierError("flype result is not negatively destabilizable")
    steps.append(destabilization(1, -1, note="bottom strand"))
    out = got[0]
    cert = Certificate(state, out, steps)
    return FourBraidOutcome("flype_destabilize", cert, result=out)


# ---------------------------------------------------------------------------
# Case 2 chain
# ---------------------------------------------------------------------------


def _parse_standard2(state: BraidWord) -> Optional[StandardForm]:
    letters = state.letters
    if len(letters) < 2:
        return None
    head = letters[0]
    if head.sign > 0 or (head.i, head.j) != (1, 3):
        return None
    second = letters[1]
    if second.sign < 0 or (second.i, second.j) != (2, 4):
        return None
    inner = _parse_standard(
        BraidWord(4, (band(1, 3, -1),) + letters[2:]), (1, 3), _S2_ALPHABET
    )
    return inner


def _case2_chain(state: BraidWord, pre_steps: list[Step], form: StandardForm) -> FourBraidOutcome:
    """Standard case-2 representative band(1,3)^-1 band(2,4) R_1 S_1 ... R_m."""
    m = form.m
    letters = state.letters
    r_pos, s_pos = _block_positions(form)
    # positions were computed without the fixed band(2,4); shift by one
    r_pos = [p + 1 for p in r_pos]
    s_pos = [p + 1 for p in s_pos]

    # band(3,4) in a later R block
    for i in range(1, m):
        if not _block_contains(form.rs[i], (3, 4)):
            continue
        d_pair = form.ss[i - 1][-1]
        d_at = s_pos[i - 1] + len(form.ss[i - 1]) - 1
        spelled = _spelling_with(form.rs[i], (3, 4), "any")
        state2, st = _respell_block(state, r_pos[i], form.rs[i], spelled)
        steps = pre_steps + ([st] if st else [])
        at34 = r_pos[i] + spelled.index((3, 4))
        beta1 = _pairs(state2.letters[2:d_at])
        beta2 = _pairs(state2.letters[d_at + 1: at34])
        beta3 = _pairs(state2.letters[at34 + 1:])
        if d_pair == (1, 4):
            items = [
                C((_nb(1, 3, -1),), tuple(_cores([(2, 4)] + beta1) + [B((3, 4))])),
                C((_nb(3, 4, -1),), tuple(_cores(beta2))),
            ] + _cores(beta3)
        else:
            items = [
                B((2, 3)),
                C((_nb(3, 4, -1),), (
                    C((_nb(1, 2, -1),), tuple(
                        [C((_nb(3, 4), _nb(2, 3, -1)), (B((3, 4)),))]
                        + _cores(beta1)
                    )),
                    *_cores(beta2),
                )),
            ] + _cores(beta3)
        return _production(state2, steps, items)

    # band(1,2) in an S block together with band(3,4) in R_1
    has12 = any((1, 2) in sb for sb in form.ss)
    if has12 and _block_contains(form.rs[0], (3, 4)):
        spelled = _spelling_with(form.rs[0], (3, 4), "any")
        state2, st = _respell_block(state, r_pos[0], form.rs[0], spelled)
        steps = pre_steps + ([st] if st else [])
        at34 = r_pos[0] + spelled.index((3, 4))
        at12 = next(
            t for t in range(at34 + 1, len(state2.letters))
            if (state2.letters[t].i, state2.letters[t].j) == (1, 2)
        )
        beta1 = _pairs(state2.letters[2:at34])
        beta2 = _pairs(state2.letters[at34 + 1: at12])
        beta3 = _pairs(state2.letters[at12 + 1:])
        items = [
            B((2, 3)),
            C((_nb(1, 2, -1),), (
                C((_nb(2, 3, -1),), (B((3, 4)),)),
                C((_nb(3, 4, -1),), tuple(_cores(beta1))),
                *_cores(beta2),
            )),
        ] + _cores(beta3)
        return _production(state2, steps, items)

    if has12:
        # no band(3,4) anywhere; the first band(1,2) splits the word
        at12 = next(
            t for t in range(2, len(letters))
            if (letters[t].i, letters[t].j) == (1, 2)
        )
        beta0 = letters[2:at12]
        # find a band(2,3) before the first band(1,2), respelling if needed
        for bi in range(m):
            if r_pos[bi] >= at12:
                break
            if not _block_contains(form.rs[bi], (2, 3)):
                continue
            spelled = _spelling_with(form.rs[bi], (2, 3), "any")
            state2, st = _respell_block(state, r_pos[bi], form.rs[bi], spelled)
            steps = pre_steps + ([st] if st else [])
            at23 = r_pos[bi] + spelled.index((2, 3))
            at12b = next(
                t for t in range(at23 + 1, len(state2.letters))
                if (state2.letters[t].i, state2.letters[t].j) == (1, 2)
            )
            beta1 = _pairs(state2.letters[2:at23])
            beta2 = _pairs(state2.letters[at23 + 1: at12b])
            beta3 = _pairs(state2.letters[at12b + 1:])
            items = [
                B((2, 3)),
                C((_nb(1, 2, -1),), (
                    C((_nb(2, 3, -1),), tuple(_cores([(2, 4)] + beta1))),
                    *_cores(beta2),
                )),
            ] + _cores(beta3)
            return _production(state2, steps, items)
        raise ClassifierError(
            "case 2 with band(1,2) but no band(2,3) witness escaped the scans"
        )
    raise ClassifierError("case 2 chain exhausted its dichotomies")


# ---------------------------------------------------------------------------
# Top-level classifier
# ---------------------------------------------------------------------------


def four_braid_classify(
    negband: Letter, beta: BraidWord, budget: int = DEFAULT_BUDGET
) -> FourBraidOutcome:
    """Classify K = negband . beta per the almost strongly quasipositive
    4-braid trichotomy.  negband must be band(1,2)^-1 or band(1,3)^-1 and
    beta a positive band word in B_4."""
    if negband.sign > 0 or (negband.i, negband.j) not in ((1, 2), (1, 3)):
        raise ShapeError("negative band must be band(1,2)^-1 or band(1,3)^-1")
    if beta.strands != 4:
        raise ShapeError("beta must live in the 4-strand braid group")
    if any(l.sign < 0 for l in beta.letters):
        raise ShapeError("beta must be a positive band word")
    K = _as_band_word(BraidWord(4, (negband,) + beta.letters))
    parents, order = _explore(K, budget, early=True)

    # pass 1: syntactically positive states
    for state in order:
        if all(l.sign > 0 for l in state.letters):
            steps = _steps_to(parents, state.letters)
            outcome = _positive_outcome(state, steps)
            outcome.certificate.input = K
            outcome.certificate.validate()
            return outcome

    # pass 2: negative destabilizations
    for state in order:
        got = _destab_scan(state)
        if got is None:
            continue
        k, out = got
        steps = _steps_to(parents, state.letters) + [
            strand_destabilization(k, -1, note="negative destabilization")
        ]
        cert = Certificate(K, out, steps)
        cert.validate()
        return FourBraidOutcome("destabilizable", cert, result=out)

    # pass 3: a positive partner of the negative band
    for state in order:
        got = _immediate_qp(state)
        if got is None:
            continue
        pre, items = got
        steps = _steps_to(parents, state.letters) + pre
        outcome = _production(cycle(state, _neg_at(state)), steps, items)
        outcome.certificate.input = K
        outcome.certificate.validate()
        return outcome

    # pass 4: claim chains on standard representatives, best complexity first
    case1: list[tuple[tuple, BraidWord, StandardForm]] = []
    case2: list[tuple[tuple, BraidWord, StandardForm]] = []
    for state in order:
        f1 = _parse_standard(state, (1, 2), _S1_ALPHABET)
        if f1 is not None:
            case1.append((f1.complexity() + (state.letters,), state, f1))
        f2 = _parse_standard2(state)
        if f2 is not None:
            case2.append((f2.complexity() + (state.letters,), state, f2))
    errors: list[str] = []
    for key, state, form in sorted(case1, key=lambda t: _ckey(t[0])) + sorted(
        case2, key=lambda t: _ckey(t[0])
    ):
        chain = _case1_chain if form.neg == (1, 2) else _case2_chain
        try:
            steps = _steps_to(parents, state.letters)
            outcome = chain(state, steps, form)
            outcome.certificate.input = K
            outcome.certificate.validate()
            return outcome
        except ClassifierError as exc:
            errors.append(str(exc))
            continue
    raise ClassifierError(
        "no outcome for K = " + str(K) + "; chain failures: " + "; ".join(errors[:4])
    )


def _neg_at(state: BraidWord) -> int:
    return next(t for t, l in enumerate(state.letters) if l.sign < 0)


def _ckey(key: tuple):
    comp = key[:-1]
    letters = key[-1]
    return (comp, tuple((l.i, l.j, l.sign) for l in letters))
