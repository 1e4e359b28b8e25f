"""
Braid words in the standard and band generator alphabets.

A braid word on n strands is a sequence of signed letters.  A letter is
either a standard Artin generator ``s(i)`` (crossing strands i and i+1) or a
band generator ``band(i, j)`` with 1 <= i < j <= n, defined in terms of the
standard generators by

    band(i, j) = (s(j-1) s(j-2) ... s(i+1)) s(i) (s(j-1) ... s(i+1))^-1.

Words from the bundled tables are written in a compact text notation: a
comma-separated list of nonzero integers (``k`` means ``s(k)``, ``-k`` its
inverse) and parenthesised groups ``(a,b,...)`` with an optional exponent
``^e``.  Band generators can be entered directly as ``b(i,j)`` or
``b(i,j)^-1``.  Exact grammar::

    word := item (',' item)*
    item := INT | '(' INT (',' INT)* ')' ('^' UINT)? | 'b(' UINT ',' UINT ')' ('^-1')?

This module also carries the elementary moves used throughout: conjugation,
cycling, mirroring, the half-twist flip, flypes and destabilization.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union


class WordSyntaxError(ValueError):
    """Raised when braid-word text cannot be parsed; carries the position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class Letter:
    """One signed letter.  ``j == i + 1`` and ``std`` for standard generators."""

    i: int
    j: int
    sign: int
    std: bool = True

    def __post_init__(self):
        if not (1 <= self.i < self.j):
            raise ValueError(f"bad letter strands ({self.i},{self.j})")
        if self.sign not in (+1, -1):
            raise ValueError("letter sign must be +1 or -1")
        if self.std and self.j != self.i + 1:
            raise ValueError("standard letters must have j == i+1")

    @property
    def index(self) -> int:
        """Generator index for standard letters."""
        if not self.std:
            raise ValueError("band letter has no standard index")
        return self.i

    def inverse(self) -> "Letter":
        return Letter(self.i, self.j, -self.sign, self.std)

    def __str__(self) -> str:
        if self.std:
            return str(self.sign * self.i)
        return f"b({self.i},{self.j})" + ("" if self.sign > 0 else "^-1")


def s(index: int, sign: int = +1) -> Letter:
    """Standard generator letter s(index)^sign."""
    return Letter(index, index + 1, sign, std=True)


def band(i: int, j: int, sign: int = +1) -> Letter:
    """Band generator letter band(i, j)^sign."""
    if j == i + 1:
        # adjacent band is the standard generator; kept as a band letter so
        # notation round-trips, the group element is the same
        return Letter(i, j, sign, std=False)
    return Letter(i, j, sign, std=False)


@dataclass(frozen=True)
class BraidWord:
    """A word in B_n: strand count and an ordered tuple of letters."""

    strands: int
    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        if self.strands < 1:
            raise ValueError("strand count must be >= 1")
        for ell in self.letters:
            if ell.j > self.strands:
                raise ValueError(f"letter {ell} exceeds {self.strands} strands")
        if not isinstance(self.letters, tuple):
            object.__setattr__(self, "letters", tuple(self.letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        if other.strands != self.strands:
            raise ValueError("strand mismatch")
        return BraidWord(self.strands, self.letters + other.letters)

    def inverse(self) -> "BraidWord":
        return BraidWord(self.strands, tuple(l.inverse() for l in reversed(self.letters)))

    def __str__(self) -> str:
        return f"B{self.strands}[" + ",".join(str(l) for l in self.letters) + "]"


def word(strands: int, *gens: int) -> BraidWord:
    """Convenience constructor from signed generator indices."""
    return BraidWord(strands, tuple(s(abs(g), 1 if g > 0 else -1) for g in gens))


# ---------------------------------------------------------------------------
# Grouped (table-notation) words
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Plain:
    """A bare signed integer factor: k stands for s(|k|)^sign(k)."""

    value: int

    def __post_init__(self):
        if self.value == 0:
            raise ValueError("zero generator index")


@dataclass(frozen=True)
class Group:
    """A parenthesised factor with a repetition exponent."""

    body: tuple[int, ...]
    exponent: int = 1

    def __post_init__(self):
        if not self.body:
            raise ValueError("empty group")
        if any(v == 0 for v in self.body):
            raise ValueError("zero generator index in group")
        if self.exponent < 1:
            raise ValueError("group exponent must be >= 1")


@dataclass(frozen=True)
class BandFactor:
    """Direct band-generator input b(i,j) or b(i,j)^-1."""

    i: int
    j: int
    sign: int = +1

    def __post_init__(self):
        if not (1 <= self.i < self.j):
            raise ValueError(f"bad band strands ({self.i},{self.j})")
        if self.sign not in (+1, -1):
            raise ValueError("band sign must be +1 or -1")


Factor = Union[Plain, Group, BandFactor]


@dataclass(frozen=True)
class GroupedWord:
    """Table-notation word: factor sequence plus strand count."""

    strands: int
    factors: tuple[Factor, ...] = ()

    def __post_init__(self):
        for f in self.factors:
            top = _factor_top_strand(f)
            if top > self.strands:
                raise ValueError(f"factor {f} exceeds {self.strands} strands")

    def __str__(self) -> str:
        return ",".join(_factor_str(f) for f in self.factors)


def _factor_top_strand(f: Factor) -> int:
    if isinstance(f, Plain):
        return abs(f.value) + 1
    if isinstance(f, Group):
        return max(abs(v) for v in f.body) + 1
    return f.j


def _factor_str(f: Factor) -> str:
    if isinstance(f, Plain):
        return str(f.value)
    if isinstance(f, Group):
        base = "(" + ",".join(str(v) for v in f.body) + ")"
        return base if f.exponent == 1 else f"{base}^{f.exponent}"
    suffix = "" if f.sign > 0 else "^-1"
    return f"b({f.i},{f.j}){suffix}"


_TOKEN = re.compile(
    r"\s*(?:(?P<band>b\(\s*(?P<bi>\d+)\s*,\s*(?P<bj>\d+)\s*\)(?P<bexp>\^-1)?)"
    r"|(?P<group>\((?P<body>[^()]*)\)(?:\^(?P<gexp>-?\d+))?)"
    r"|(?P<int>-?\d+))\s*"
)


def parse_table_word(text: str, strands: Optional[int] = None) -> GroupedWord:
    """Parse table notation into a GroupedWord.

    When ``strands`` is None it is inferred as 1 + the largest index used
    (1 for the empty word).
    """
    factors: list[Factor] = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise WordSyntaxError("unrecognised token", pos)
        if m.group("band"):
            i, j = int(m.group("bi")), int(m.group("bj"))
            if not (1 <= i < j):
                raise WordSyntaxError(f"bad band b({i},{j})", pos)
            factors.append(BandFactor(i, j, -1 if m.group("bexp") else +1))
        elif m.group("group"):
            body_text = m.group("body")
            body: list[int] = []
            for part in body_text.split(","):
                part = part.strip()
                if not re.fullmatch(r"-?\d+", part or ""):
                    raise WordSyntaxError("bad integer in group", pos)
                v = int(part)
                if v == 0:
                    raise WordSyntaxError("zero index", pos)
                body.append(v)
            exp = 1
            if m.group("gexp") is not None:
                exp = int(m.group("gexp"))
                if exp < 1:
                    raise WordSyntaxError("group exponent must be >= 1", pos)
            factors.append(Group(tuple(body), exp))
        else:
            v = int(m.group("int"))
            if v == 0:
                raise WordSyntaxError("zero index", pos)
            factors.append(Plain(v))
        pos = m.end()
        if pos < len(text):
            if text[pos] != ",":
                raise WordSyntaxError("expected ','", pos)
            pos += 1
    if strands is None:
        strands = max((_factor_top_strand(f) for f in factors), default=1)
    return GroupedWord(strands, tuple(factors))


def flatten(gw: GroupedWord) -> BraidWord:
    """Expand groups and exponents into a flat BraidWord."""
    letters: list[Letter] = []
    for f in gw.factors:
        if isinstance(f, Plain):
            letters.append(s(abs(f.value), 1 if f.value > 0 else -1))
        elif isinstance(f, Group):
            chunk = [s(abs(v), 1 if v > 0 else -1) for v in f.body]
            letters.extend(chunk * f.exponent)
        else:
            letters.append(band(f.i, f.j, f.sign))
    return BraidWord(gw.strands, tuple(letters))


# ---------------------------------------------------------------------------
# Band expansion and elementary invariants
# ---------------------------------------------------------------------------


def band_std_letters(i: int, j: int, sign: int) -> tuple[Letter, ...]:
    """Standard-letter expansion of band(i,j)^sign."""
    desc = [s(k) for k in range(j - 1, i, -1)]
    core = [s(i, sign)]
    asc = [s(k, -1) for k in range(i + 1, j)]
    return tuple(desc + core + asc)


def band_to_std(w: BraidWord) -> BraidWord:
    """Replace every band letter by its defining standard-generator word."""
    letters: list[Letter] = []
    for ell in w.letters:
        if ell.std:
            letters.append(ell)
        else:
            letters.extend(band_std_letters(ell.i, ell.j, ell.sign))
    return BraidWord(w.strands, tuple(letters))


def writhe(w: BraidWord) -> int:
    """Exponent sum; every band letter counts +-1."""
    return sum(l.sign for l in w.letters)


def self_linking(w: BraidWord) -> int:
    """Self-linking number of the closure as a transverse link: -n + writhe."""
    return -w.strands + writhe(w)


def euler_char_bennequin(w: BraidWord) -> int:
    """Euler characteristic of the Bennequin surface: n disks, one band per letter."""
    return w.strands - len(w.letters)


def negative_band_count(w: BraidWord) -> int:
    return sum(1 for l in w.letters if l.sign < 0)


def permutation_of(w: BraidWord) -> tuple[int, ...]:
    """Underlying permutation, as a 0-indexed image tuple of length n.

    entry p[k] is the bottom position of the strand entering at top position k.
    """
    img = list(range(w.strands))
    inv = list(range(w.strands))  # inv[pos] = strand currently at pos
    for ell in w.letters:
        a, b = ell.i - 1, ell.j - 1
        sa, sb = inv[a], inv[b]
        inv[a], inv[b] = sb, sa
        img[sa], img[sb] = b, a
    return tuple(img)


# ---------------------------------------------------------------------------
# Elementary moves
# ---------------------------------------------------------------------------


def conjugate(w: BraidWord, g: BraidWord) -> BraidWord:
    """g^-1 w g as a word."""
    if g.strands != w.strands:
        raise ValueError("strand mismatch")
    return g.inverse() * w * g


def cycle(w: BraidWord, k: int) -> BraidWord:
    """Move the first k letters to the end (cyclic permutation of the word)."""
    if not w.letters:
        return w
    k %= len(w.letters)
    return BraidWord(w.strands, w.letters[k:] + w.letters[:k])


def mirror(w: BraidWord) -> BraidWord:
    """Negate all letter signs (mirror image of the closure)."""
    return BraidWord(w.strands, tuple(l.inverse() for l in w.letters))


def delta_flip(w: BraidWord) -> BraidWord:
    """Conjugation by the half twist: s(k) -> s(n-k) letterwise.

    Band letters are expanded through their defining standard words first;
    the positional mirror of a band generator is not a band generator (the
    conjugator flips to the other side), so flipping indices alone would
    change the braid.  The result always represents the conjugate element.
    """
    n = w.strands
    return BraidWord(
        n, tuple(s(n - l.i, l.sign) for l in band_to_std(w).letters)
    )


def stabilize(w: BraidWord, sign: int = +1) -> BraidWord:
    """Markov stabilization: append s(n)^sign on n+1 strands."""
    letters = tuple(w.letters) + (s(w.strands, sign),)
    return BraidWord(w.strands + 1, letters)


def _touches_strand(ell: Letter, k: int) -> bool:
    return ell.i == k or ell.j == k


def try_destabilize(w: BraidWord) -> Optional[tuple[BraidWord, int]]:
    """Markov destabilization at the top strand.

    If exactly one letter touches strand n and it is s(n-1)^e or band(i,n)^e,
    return the word with that letter removed on n-1 strands together with e.
    The closure link type is preserved: the top disk of the Bennequin surface
    is attached to the rest by a single band and retracts along it.
    """
    n = w.strands
    if n < 2:
        return None
    touching = [idx for idx, l in enumerate(w.letters) if _touches_strand(l, n)]
    if len(touching) != 1:
        return None
    ell = w.letters[touching[0]]
    rest = w.letters[: touching[0]] + w.letters[touching[0] + 1:]
    return BraidWord(n - 1, rest), ell.sign


def try_destabilize_bottom(w: BraidWord) -> Optional[tuple[BraidWord, int]]:
    """Mirror-position destabilization at strand 1 (flip, destabilize, flip back).

    If exactly one letter touches strand 1, remove it and shift every index
    down by one.
    """
    n = w.strands
    if n < 2:
        return None
    touching = [idx for idx, l in enumerate(w.letters) if _touches_strand(l, 1)]
    if len(touching) != 1:
        return None
    ell = w.letters[touching[0]]
    rest = w.letters[: touching[0]] + w.letters[touching[0] + 1:]
    shifted = []
    for l in rest:
        if l.std:
            shifted.append(s(l.i - 1, l.sign))
        else:
            shifted.append(band(l.i - 1, l.j - 1, l.sign))
    return BraidWord(n - 1, tuple(shifted)), ell.sign


def wall_crossing_letters(w: BraidWord, k: int) -> list[int]:
    """Indices of letters whose band crosses the wall between strands k and k+1."""
    return [idx for idx, l in enumerate(w.letters) if l.i <= k < l.j]


def strand_destabilize(w: BraidWord, k: int) -> Optional[tuple[BraidWord, int]]:
    """Remove strand k when exactly one letter touches it.

    The disk of strand k is attached to the surface by a single band and
    retracts along it; bands passing over the strand are unaffected.  Letters
    with indices above k shift down.  Returns the word on n-1 strands and the
    sign of the removed letter.
    """
    touching = [idx for idx, l in enumerate(w.letters) if l.i == k or l.j == k]
    if len(touching) != 1:
        return None
    ell = w.letters[touching[0]]
    rest = w.letters[: touching[0]] + w.letters[touching[0] + 1:]
    out: list[Letter] = []
    for l in rest:
        i2 = l.i - 1 if l.i > k else l.i
        j2 = l.j - 1 if l.j > k else l.j
        out.append(s(i2, l.sign) if l.std else band(i2, j2, l.sign))
    return BraidWord(w.strands - 1, tuple(out)), ell.sign


def split_destabilize(w: BraidWord, k: int) -> Optional[tuple[BraidWord, int]]:
    """Destabilization across the wall k|k+1.

    When exactly one letter joins the strand blocks {1..k} and {k+1..n}, the
    closure is the band-connected sum of the two block closures; deleting the
    letter and merging the blocks preserves the link type.  Returns the merged
    word on n-1 strands and the sign of the removed letter.
    """
    crossing = wall_crossing_letters(w, k)
    if len(crossing) != 1:
        return None
    ell = w.letters[crossing[0]]
    rest = w.letters[: crossing[0]] + w.letters[crossing[0] + 1:]
    # the two blocks commute letterwise while separated; sort them apart
    # before the merge glues their boundary strands together
    lower = [l for l in rest if l.j <= k]
    upper = []
    for l in rest:
        if l.i > k:
            upper.append(s(l.i - 1, l.sign) if l.std else band(l.i - 1, l.j - 1, l.sign))
    return BraidWord(w.strands - 1, tuple(lower + upper)), ell.sign


# ---------------------------------------------------------------------------
# Flypes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FlypeSite:
    """A flype position, valid after rotating the word by ``rotation``.

    After rotation the word reads  g^eps v g^m w  where g = s(1) (``top``
    False) or g = s(n-1) (``top`` True), and neither v nor w touches the
    boundary strand.  ``len_v`` letters of v follow the eps block.
    """

    rotation: int
    top: bool
    eps: int
    m: int
    len_v: int

    @property
    def len_eps(self) -> int:
        return abs(self.eps)


def _boundary_gen(w: BraidWord, top: bool) -> int:
    return w.strands - 1 if top else 1


def _strand_of_interest(w: BraidWord, top: bool) -> int:
    return w.strands if top else 1


def _is_boundary_letter(ell: Letter, w: BraidWord, top: bool) -> bool:
    g = _boundary_gen(w, top)
    return ell.std and ell.i == g


def find_flypes(w: BraidWord) -> list[FlypeSite]:
    """All flype sites of the cyclic word, at either boundary strand.

    A site requires the cyclic word to consist of exactly two runs of the
    boundary generator (one of which has length one: the eps block) separated
    by subwords not touching the boundary strand.
    """
    sites: list[FlypeSite] = []
    nletters = len(w.letters)
    for top in (False, True):
        g = _boundary_gen(w, top)
        strand = _strand_of_interest(w, top)
        positions = [
            idx for idx, l in enumerate(w.letters) if _touches_strand(l, strand)
        ]
        if not all(_is_boundary_letter(w.letters[idx], w, top) for idx in positions):
            continue
        if len(positions) < 2:
            continue
        # group boundary letters into maximal cyclic runs of equal sign
        runs = _cyclic_runs(w, positions)
        if len(runs) != 2:
            continue
        for eps_run, m_run in (runs, runs[::-1]):
            start, length, sign = eps_run
            if length != 1:
                continue
            m_sign = m_run[2] * m_run[1]
            gap = (m_run[0] - (start + 1)) % nletters
            sites.append(FlypeSite(rotation=start, top=top, eps=sign, m=m_sign, len_v=gap))
    return sites


def _cyclic_runs(w: BraidWord, positions: list[int]) -> list[tuple[int, int, int]]:
    """Maximal cyclic runs (start, length, sign) of adjacent boundary letters.

    Adjacency is in the cyclic word: positions p, p+1 mod len with equal sign
    merge into one run.  Run length counts letters, start is the first index.
    """
    nletters = len(w.letters)
    merged: list[list[int]] = []
    for p in sorted(positions):
        sign = w.letters[p].sign
        if merged and merged[-1][0] + merged[-1][1] == p and merged[-1][2] == sign:
            merged[-1][1] += 1
        else:
            merged.append([p, 1, sign])
    if len(merged) > 1:
        first, last = merged[0], merged[-1]
        if last[0] + last[1] == nletters and first[0] == 0 and last[2] == first[2]:
            last[1] += first[1]
            last[0] = last[0]  # run now wraps; start stays at the tail segment
            merged = merged[1:]
    return [tuple(r) for r in merged]


def apply_flype(w: BraidWord, site: FlypeSite) -> BraidWord:
    """Apply the flype  g^eps v g^m w -> g^m v g^eps w  at the given site.

    The result starts at the flype position (the rotation is part of the
    move); writhe and strand count are preserved.
    """
    rotated = cycle(w, site.rotation)
    g = _boundary_gen(w, site.top)
    strand = _strand_of_interest(w, site.top)
    letters = rotated.letters
    eps_len = 1
    head = letters[:eps_len]
    if not (head[0].std and head[0].i == g and head[0].sign == site.eps):
        raise ValueError("flype site does not match word")
    v = letters[eps_len: eps_len + site.len_v]
    m_len = abs(site.m)
    m_block = letters[eps_len + site.len_v: eps_len + site.len_v + m_len]
    rest = letters[eps_len + site.len_v + m_len:]
    for ell in v:
        if _touches_strand(ell, strand):
            raise ValueError("flype subword v touches the boundary strand")
    for ell in rest:
        if _touches_strand(ell, strand):
            raise ValueError("flype subword w touches the boundary strand")
    m_sign = 1 if site.m >= 0 else -1
    if any(not (l.std and l.i == g and l.sign == m_sign) for l in m_block):
        raise ValueError("flype m block does not match word")
    new_letters = tuple(m_block) + tuple(v) + tuple(head) + tuple(rest)
    return BraidWord(w.strands, new_letters)
