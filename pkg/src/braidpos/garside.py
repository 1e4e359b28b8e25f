"""
Left-canonical (Garside) normal form for the braid groups B_n.

A braid is written Delta^d P_1 ... P_k where Delta is the positive half
twist, each P_i is a permutation braid (a positive braid in which each pair
of strands crosses at most once) different from the identity and from Delta,
and each adjacent pair is left-weighted: the starting set of P_{i+1} is
contained in the finishing set of P_i.  Two words represent the same element
of B_n iff their normal forms coincide, which is the equality oracle used by
the rest of the package.

Permutations are stored as 0-indexed image tuples; the word convention is
that concatenation applies letters left to right, so perm(AB) = perm(B) o
perm(A) read as functions on positions.

Negative letters embed via s(i)^-1 = Delta^-1 (Delta s(i)^-1), the second
factor being a permutation braid.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .words import BraidWord, Letter, band_to_std

Perm = tuple[int, ...]


def identity_perm(n: int) -> Perm:
    return tuple(range(n))


def transposition(n: int, i: int) -> Perm:
    """Adjacent transposition swapping 0-indexed positions i, i+1."""
    img = list(range(n))
    img[i], img[i + 1] = img[i + 1], img[i]
    return tuple(img)


def delta_perm(n: int) -> Perm:
    return tuple(n - 1 - k for k in range(n))


def compose(p: Perm, q: Perm) -> Perm:
    """Permutation of the braid pq (p first): x -> q[p[x]]."""
    return tuple(q[p[x]] for x in range(len(p)))


def invert(p: Perm) -> Perm:
    inv = [0] * len(p)
    for x, y in enumerate(p):
        inv[y] = x
    return tuple(inv)


def inversions(p: Perm) -> int:
    n = len(p)
    return sum(1 for a in range(n) for b in range(a + 1, n) if p[a] > p[b])


def starting_set(p: Perm) -> set[int]:
    """Generators s(i) (1-indexed) left-dividing the permutation braid."""
    return {i + 1 for i in range(len(p) - 1) if p[i] > p[i + 1]}


def finishing_set(p: Perm) -> set[int]:
    """Generators s(i) (1-indexed) right-dividing the permutation braid."""
    q = invert(p)
    return {i + 1 for i in range(len(p) - 1) if q[i] > q[i + 1]}


def perm_braid_word(p: Perm) -> list[int]:
    """A reduced word (1-indexed generator list) for the permutation braid."""
    seq = list(p)
    out: list[int] = []
    n = len(seq)
    # bubble sort seq to the identity, recording swaps; each swap composes on
    # the left in the word convention, so the swap list in order spells p
    changed = True
    while changed:
        changed = False
        for i in range(n - 1):
            if seq[i] > seq[i + 1]:
                seq[i], seq[i + 1] = seq[i + 1], seq[i]
                out.append(i + 1)
                changed = True
    return out


@dataclass(frozen=True)
class NormalForm:
    """Left-weighted form Delta^delta_power . factors (permutation braids)."""

    strands: int
    delta_power: int
    factors: tuple[Perm, ...]

    def __str__(self) -> str:
        parts = [f"d:{self.delta_power}"]
        for f in self.factors:
            parts.append(",".join(str(x + 1) for x in f))
        return "|".join(parts)

    @property
    def canonical_length(self) -> int:
        return len(self.factors)

    def is_trivial(self) -> bool:
        return self.delta_power == 0 and not self.factors

    def to_word(self) -> BraidWord:
        """Reconstruct a braid word (Delta spelled positively or negatively)."""
        from .words import s as _s

        letters: list[Letter] = []
        dword = perm_braid_word(delta_perm(self.strands))
        if self.delta_power >= 0:
            for _ in range(self.delta_power):
                letters.extend(_s(i) for i in dword)
        else:
            for _ in range(-self.delta_power):
                letters.extend(_s(i, -1) for i in reversed(dword))
        for f in self.factors:
            letters.extend(_s(i) for i in perm_braid_word(f))
        return BraidWord(self.strands, tuple(letters))


def _tau(p: Perm) -> Perm:
    """Conjugation by Delta: flip positions and values."""
    n = len(p)
    return tuple(n - 1 - p[n - 1 - x] for x in range(n))


def _left_weight(n: int, factors: list[Perm]) -> tuple[int, list[Perm]]:
    """Left-weight a factor list; returns absorbed Delta power and factors."""
    ident = identity_perm(n)
    delta = delta_perm(n)
    factors = [f for f in factors if f != ident]
    changed = True
    while changed:
        changed = False
        k = 0
        while k < len(factors) - 1:
            a, b = factors[k], factors[k + 1]
            moved = False
            while True:
                pending = starting_set(b) - finishing_set(a)
                if not pending:
                    break
                i = min(pending) - 1
                a = compose(a, transposition(n, i))
                b = compose(transposition(n, i), b)
                moved = True
            if moved:
                factors[k] = a
                factors[k + 1] = b
                changed = True
                if b == ident:
                    del factors[k + 1]
                # recheck the previous pair after any transfer
                k = max(k - 1, 0)
            else:
                k += 1
    # after weighting, a pair (X, Delta) is left-weighted only when X = Delta,
    # so Delta factors form a prefix; strip and count them
    power = 0
    while factors and factors[0] == delta:
        power += 1
        factors.pop(0)
    assert all(f not in (ident, delta) for f in factors)
    return power, factors


def _collect(n: int, w: BraidWord) -> tuple[int, list[Perm]]:
    """Rewrite the word as Delta^d (factor list), not yet left-weighted."""
    delta = delta_perm(n)
    atoms: list[tuple[int, Perm]] = []
    for ell in w.letters:
        t = transposition(n, ell.i - 1)
        if ell.sign > 0:
            atoms.append((0, t))
        else:
            atoms.append((-1, compose(delta, t)))
    total = sum(d for d, _ in atoms)
    factors: list[Perm] = []
    suffix_power = 0
    for d, p in reversed(atoms):
        if suffix_power % 2 == 1:
            p = _tau(p)
        factors.append(p)
        suffix_power += d
    factors.reverse()
    return total, factors


def normal_form(w: BraidWord) -> NormalForm:
    """Left-canonical normal form; band letters are expanded first."""
    w = band_to_std(w)
    n = w.strands
    if n == 1 or not w.letters:
        return NormalForm(n, 0, ())
    base_power, factors = _collect(n, w)
    extra, weighted = _left_weight(n, factors)
    return NormalForm(n, base_power + extra, tuple(weighted))


def equal(a: BraidWord, b: BraidWord) -> bool:
    """Word-problem equality via normal forms."""
    if a.strands != b.strands:
        raise ValueError("strand mismatch")
    return normal_form(a) == normal_form(b)


def permutation_factorization(w: BraidWord) -> list[Perm]:
    """Left-weighted permutation-braid factorization of a positive word.

    The product of the returned factors equals w; Delta powers are returned
    as explicit half-twist factors.
    """
    if any(l.sign < 0 for l in w.letters):
        raise ValueError("word must be positive")
    nf = normal_form(w)
    assert nf.delta_power >= 0
    return [delta_perm(w.strands)] * nf.delta_power + list(nf.factors)


def is_permutation_braid(w: BraidWord) -> bool:
    """True iff the positive word has each strand pair crossing at most once."""
    if any(l.sign < 0 for l in w.letters):
        return False
    w = band_to_std(w)
    return inversions(permutation_of_word(w)) == len(w.letters)


def permutation_of_word(w: BraidWord) -> Perm:
    p = identity_perm(w.strands)
    for ell in band_to_std(w).letters:
        p = compose(p, transposition(w.strands, ell.i - 1))
    return p
