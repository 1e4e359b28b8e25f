"""
Combinatorial link diagrams as oriented PD codes with a rotation system.

A crossing is stored as four arc identifiers in counterclockwise order
starting from the incoming under-strand, plus the crossing sign:

    X+(a,b,c,d)   under runs a -> c, over runs d -> b   (positive crossing)
    X-(a,b,c,d)   under runs a -> c, over runs b -> d   (negative crossing)

The counterclockwise tuple doubles as the vertex rotation, so a PD code
determines a combinatorial map whose planarity is checked through the Euler
formula.  Diagrams may carry crossing-free unknot components in ``loops``.

The file format used by the bundled data is one diagram per line::

    name: PD[X+(1,2,3,4), X-(2,5,6,7), ...] loops=0
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .words import BraidWord, band_to_std


class PDError(ValueError):
    pass


@dataclass(frozen=True)
class Crossing:
    sign: int
    arcs: tuple[int, int, int, int]  # CCW from incoming under

    @property
    def under_in(self) -> int:
        return self.arcs[0]

    @property
    def under_out(self) -> int:
        return self.arcs[2]

    @property
    def over_in(self) -> int:
        return self.arcs[3] if self.sign > 0 else self.arcs[1]

    @property
    def over_out(self) -> int:
        return self.arcs[1] if self.sign > 0 else self.arcs[3]

    def __str__(self) -> str:
        tag = "X+" if self.sign > 0 else "X-"
        return f"{tag}({','.join(str(a) for a in self.arcs)})"


@dataclass(frozen=True)
class PDCode:
    """An oriented link diagram; ``loops`` counts crossing-free components."""

    crossings: tuple[Crossing, ...]
    loops: int = 0

    def __post_init__(self):
        _validate(self)

    @property
    def n_crossings(self) -> int:
        return len(self.crossings)

    def writhe(self) -> int:
        return sum(x.sign for x in self.crossings)

    def signed_counts(self) -> tuple[int, int]:
        pos = sum(1 for x in self.crossings if x.sign > 0)
        return pos, len(self.crossings) - pos

    def arcs(self) -> list[int]:
        seen = []
        found = set()
        for x in self.crossings:
            for a in x.arcs:
                if a not in found:
                    found.add(a)
                    seen.append(a)
        return seen

    def components(self) -> int:
        """Number of link components, including free loops."""
        succ: dict[int, int] = {}
        for x in self.crossings:
            succ[x.under_in] = x.under_out
            succ[x.over_in] = x.over_out
        seen: set[int] = set()
        count = 0
        for a in succ:
            if a in seen:
                continue
            count += 1
            cur = a
            while cur not in seen:
                seen.add(cur)
                cur = succ[cur]
        return count + self.loops

    def __str__(self) -> str:
        inner = ", ".join(str(x) for x in self.crossings)
        return f"PD[{inner}] loops={self.loops}"


def _validate(pd: PDCode) -> None:
    ins: dict[int, int] = {}
    outs: dict[int, int] = {}
    for x in pd.crossings:
        if x.sign not in (+1, -1):
            raise PDError("crossing sign must be +-1")
        for a in (x.under_in, x.over_in):
            ins[a] = ins.get(a, 0) + 1
        for a in (x.under_out, x.over_out):
            outs[a] = outs.get(a, 0) + 1
    if set(ins) != set(outs) or any(v != 1 for v in ins.values()) or any(
        v != 1 for v in outs.values()
    ):
        raise PDError("each arc must occur exactly once incoming and once outgoing")
    if pd.loops < 0:
        raise PDError("negative loop count")
    if pd.crossings:
        _check_planar(pd)


# -- combinatorial map ------------------------------------------------------

Dart = tuple[int, int]  # (crossing index, slot 0..3)


def darts_of(pd: PDCode) -> list[Dart]:
    return [(ci, k) for ci in range(len(pd.crossings)) for k in range(4)]


def opposite_map(pd: PDCode) -> dict[Dart, Dart]:
    """Involution pairing the two ends of each arc."""
    by_arc: dict[int, list[Dart]] = {}
    for ci, x in enumerate(pd.crossings):
        for k, a in enumerate(x.arcs):
            by_arc.setdefault(a, []).append((ci, k))
    out: dict[Dart, Dart] = {}
    for a, ds in by_arc.items():
        if len(ds) != 2:
            raise PDError(f"arc {a} occurs {len(ds)} times")
        out[ds[0]] = ds[1]
        out[ds[1]] = ds[0]
    return out


def face_orbits(pd: PDCode) -> list[list[Dart]]:
    """Faces of the combinatorial map (orbits of rotate-after-crossing)."""
    opp = opposite_map(pd)
    nxt: dict[Dart, Dart] = {}
    for d in darts_of(pd):
        ci, k = opp[d]
        nxt[d] = (ci, (k + 1) % 4)
    faces: list[list[Dart]] = []
    seen: set[Dart] = set()
    for d in nxt:
        if d in seen:
            continue
        face = []
        cur = d
        while cur not in seen:
            seen.add(cur)
            face.append(cur)
            cur = nxt[cur]
        faces.append(face)
    return faces


def _crossing_components(pd: PDCode) -> int:
    """Connected components of the underlying 4-valent graph."""
    if not pd.crossings:
        return 0
    parent = list(range(len(pd.crossings)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    by_arc: dict[int, list[int]] = {}
    for ci, x in enumerate(pd.crossings):
        for a in x.arcs:
            by_arc.setdefault(a, []).append(ci)
    for ds in by_arc.values():
        for other in ds[1:]:
            ra, rb = find(ds[0]), find(other)
            if ra != rb:
                parent[ra] = rb
    return len({find(i) for i in range(len(pd.crossings))})


def _check_planar(pd: PDCode) -> None:
    v = len(pd.crossings)
    e = 2 * v
    f = len(face_orbits(pd))
    comps = _crossing_components(pd)
    if v - e + f != 1 + comps:
        raise PDError(
            f"rotation system is not planar: V-E+F = {v - e + f}, components = {comps}"
        )


def is_connected(pd: PDCode) -> bool:
    return _crossing_components(pd) <= 1 and (pd.loops == 0 or not pd.crossings)


# -- construction from braid closures ---------------------------------------


def braid_closure_pd(w: BraidWord) -> PDCode:
    """Diagram of the closure of a braid word (standard letters; bands expand).

    The positive generator is drawn with the right strand passing over, which
    makes the diagram crossing sign equal to the letter sign.
    """
    w = band_to_std(w)
    n = w.strands
    next_arc = [0] * 0
    current = list(range(1, n + 1))
    arc_counter = n
    crossings: list[Crossing] = []
    touched = [False] * (n + 1)
    for ell in w.letters:
        i = ell.i
        touched[i] = touched[i + 1] = True
        in_left, in_right = current[i - 1], current[i]
        out_left, out_right = arc_counter + 1, arc_counter + 2
        arc_counter += 2
        if ell.sign > 0:
            crossings.append(Crossing(+1, (in_left, out_left, out_right, in_right)))
        else:
            crossings.append(Crossing(-1, (in_right, in_left, out_left, out_right)))
        current[i - 1], current[i] = out_left, out_right
    # close up: identify the final arc at each position with the initial one
    rename: dict[int, int] = {}

    def resolve(a: int) -> int:
        while a in rename:
            a = rename[a]
        return a

    loops = 0
    for k in range(n):
        final, initial = resolve(current[k]), resolve(k + 1)
        if final == initial:
            loops += 1  # untouched strand closes into a free loop
        else:
            rename[final] = initial
    fixed = [
        Crossing(x.sign, tuple(resolve(a) for a in x.arcs)) for x in crossings
    ]
    return PDCode(tuple(fixed), loops=loops)


# -- text format --------------------------------------------------------------

_PD_LINE = re.compile(
    r"^\s*(?P<name>[\w.+-]+)\s*:\s*PD\[(?P<body>[^\]]*)\]\s*(?:loops=(?P<loops>\d+))?\s*$"
)
_PD_X = re.compile(r"X(?P<sign>[+-])\((?P<arcs>\s*\d+\s*(?:,\s*\d+\s*){3})\)")


def parse_pd_line(line: str) -> tuple[str, PDCode]:
    m = _PD_LINE.match(line)
    if not m:
        raise PDError(f"bad PD line: {line!r}")
    body = m.group("body").strip()
    crossings: list[Crossing] = []
    if body:
        pos = 0
        for xm in _PD_X.finditer(body):
            sign = +1 if xm.group("sign") == "+" else -1
            arcs = tuple(int(t) for t in xm.group("arcs").split(","))
            crossings.append(Crossing(sign, arcs))
        if not crossings:
            raise PDError(f"no crossings parsed from {body!r}")
    loops = int(m.group("loops") or 0)
    return m.group("name"), PDCode(tuple(crossings), loops=loops)


def load_pd_file(path) -> dict[str, PDCode]:
    out: dict[str, PDCode] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            name, pd = parse_pd_line(line)
            if name in out:
                raise PDError(f"duplicate diagram name {name}")
            out[name] = pd
    return out
