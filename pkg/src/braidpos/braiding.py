"""
From link diagrams to braid words through quasi-canonical surfaces.

A quasi-canonical surface is stored combinatorially: oriented circles
carrying cyclic lists of visits, and signed bands, each with its route of
visits (two endpoints, any number of transversal over-crossings).  Endpoint
visits carry the side of the circle the band leaves from (+1 = left of the
circle direction); crossing visits carry the direction the band crosses in
(+1 = left to right).  The visit data generates a half-edge map whose
planarity is the embedding invariant; faces, circle orientations and nesting
are derived from it.

The bunching move replaces one circle of an incoherent pair by its band sum
with a parallel copy of the other, routed through a shared face; every visit
of the copied circle on the copy's side turns into an over-crossing of the
new circle.  Candidate moves are validated against planarity, the
quasi-canonical axioms, and a strict decrease of the incoherent pair count;
the loop therefore terminates with all pairs coherent, the left-disks form a
chain, and the braid word is read off along a cut from the innermost face to
the outer face: one strand per circle, one band letter per original
crossing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .pdcodes import PDCode, is_connected
from .seifert import seifert_circles, smoothing_pairs
from .words import BraidWord, Letter, band


class BraidingError(RuntimeError):
    pass


# a visit is identified by (band id, route position)
Visit = tuple[int, int]


@dataclass
class Band:
    sign: int
    circles: list[int] = field(default_factory=list)  # circle at each stop
    sides: list[int] = field(default_factory=list)    # side bit at each stop

    @property
    def stops(self) -> int:
        return len(self.circles)

    def is_end(self, pos: int) -> bool:
        return pos == 0 or pos == self.stops - 1


@dataclass
class SurfaceState:
    circles: dict[int, list[Visit]]
    bands: dict[int, Band]

    def copy(self) -> "SurfaceState":
        return SurfaceState(
            {c: list(v) for c, v in self.circles.items()},
            {b: Band(bd.sign, list(bd.circles), list(bd.sides)) for b, bd in self.bands.items()},
        )

    def counts(self) -> tuple[int, int, int]:
        pos = sum(1 for b in self.bands.values() if b.sign > 0)
        return len(self.circles), pos, len(self.bands) - pos


def initial_state(pd: PDCode) -> SurfaceState:
    """Canonical surface: two endpoint visits per crossing, no over-crossings.

    The band at a crossing attaches to the left of the smoothed strand
    through the incoming under-arc and to the right of the other strand.
    """
    st = seifert_circles(pd)
    bands: dict[int, Band] = {}
    visit_at_arc: dict[int, Visit] = {}
    for bid, x in enumerate(pd.crossings):
        (a, _), (other_in, _) = smoothing_pairs(x)
        # both smoothed strands head the same way around the crossing; the
        # band sits left of the strand through the under-in arc for positive
        # crossings and right of it for negative ones
        sides = [+1, -1] if x.sign > 0 else [-1, +1]
        bands[bid] = Band(x.sign, [-1, -1], sides)
        visit_at_arc[a] = (bid, 0)
        visit_at_arc[other_in] = (bid, 1)
    circles: dict[int, list[Visit]] = {}
    for cid, arcs in enumerate(st.circles):
        evs = []
        for arc in arcs:
            bid, pos = visit_at_arc[arc]
            bands[bid].circles[pos] = cid
            evs.append((bid, pos))
        circles[cid] = evs
    return SurfaceState(circles, bands)


# ---------------------------------------------------------------------------
# The half-edge map
# ---------------------------------------------------------------------------


@dataclass
class SurfaceMap:
    rotations: dict[tuple, tuple]      # vertex -> CCW dart tuple
    twin: dict[tuple, tuple]
    vertex_of: dict[tuple, tuple]
    faces: list[tuple]
    face_of: dict[tuple, int]
    outer: int


def _build_map(state: SurfaceState) -> SurfaceMap:
    rotations: dict[tuple, tuple] = {}
    twin: dict[tuple, tuple] = {}
    index_of: dict[Visit, tuple[int, int]] = {}
    for cid, evs in state.circles.items():
        if not evs:
            raise BraidingError("circle without visits")
        for idx, visit in enumerate(evs):
            index_of[visit] = (cid, idx)
    for cid, evs in state.circles.items():
        m = len(evs)
        for idx in range(m):
            fwd = ("cs", cid, idx, 0)            # segment idx: event idx -> idx+1
            bwd = ("cs", cid, idx, 1)
            twin[fwd] = bwd
            twin[bwd] = fwd
    for bid, bd in state.bands.items():
        for segt in range(bd.stops - 1):
            d0 = ("bs", bid, segt, 0)
            d1 = ("bs", bid, segt, 1)
            twin[d0] = d1
            twin[d1] = d0
    for cid, evs in state.circles.items():
        m = len(evs)
        for idx, (bid, pos) in enumerate(evs):
            bd = state.bands[bid]
            out_d = ("cs", cid, idx, 0)
            in_d = ("cs", cid, (idx - 1) % m, 1)
            side = bd.sides[pos]
            if bd.is_end(pos):
                bdart = ("bs", bid, 0, 0) if pos == 0 else ("bs", bid, bd.stops - 2, 1)
                if side > 0:
                    rot = (out_d, bdart, in_d)
                else:
                    rot = (out_d, in_d, bdart)
            else:
                before = ("bs", bid, pos - 1, 1)
                after = ("bs", bid, pos, 0)
                # left-to-right (side +1): the incoming band segment points
                # back to the left (90 degrees), the outgoing to the right
                if side > 0:
                    rot = (out_d, before, in_d, after)
                else:
                    rot = (out_d, after, in_d, before)
            rotations[("v", cid, idx)] = rot
    vertex_of: dict[tuple, tuple] = {}
    for vkey, rot in rotations.items():
        for dart in rot:
            if dart in vertex_of:
                raise BraidingError(f"dart {dart} has two vertices")
            vertex_of[dart] = vkey
    if set(vertex_of) != set(twin):
        raise BraidingError("dart sets of rotations and twins disagree")
    faces: list[tuple] = []
    face_of: dict[tuple, int] = {}
    for dart in sorted(twin):
        if dart in face_of:
            continue
        trace = []
        cur = dart
        while cur not in face_of:
            face_of[cur] = len(faces)
            trace.append(cur)
            t = twin[cur]
            rot = rotations[vertex_of[t]]
            cur = rot[(rot.index(t) + 1) % len(rot)]
        faces.append(tuple(trace))
    v = len(rotations)
    e = len(twin) // 2
    f = len(faces)
    if v - e + f != 2:
        raise BraidingError(f"surface data is not planar: V-E+F = {v - e + f}")
    outer = face_of[min(twin)]
    return SurfaceMap(rotations, twin, vertex_of, faces, face_of, outer)


@dataclass
class Geometry:
    smap: SurfaceMap
    inside: dict[int, frozenset]
    orientation: dict[int, int]

    def nested(self, c1: int, c2: int) -> bool:
        """c2 lies inside c1 or c1 inside c2."""
        return self._contains(c1, c2) or self._contains(c2, c1)

    def _contains(self, c1: int, c2: int) -> bool:
        f = self.smap.face_of[("cs", c2, 0, 0)]
        return f in self.inside[c1]

    def coherent(self, c1: int, c2: int) -> bool:
        same = self.orientation[c1] == self.orientation[c2]
        return self.nested(c1, c2) == same

    def incoherent_pairs(self, state: SurfaceState) -> list[tuple[int, int]]:
        cids = sorted(state.circles)
        return [
            (a, b)
            for i, a in enumerate(cids)
            for b in cids[i + 1:]
            if not self.coherent(a, b)
        ]


def _geometry(state: SurfaceState) -> Geometry:
    smap = _build_map(state)
    nfaces = len(smap.faces)
    inside: dict[int, frozenset] = {}
    orientation: dict[int, int] = {}
    # adjacency between faces: via every dart; crossing a circle-segment of c
    # flips the side of c
    adjacency: list[tuple[int, int, Optional[int]]] = []
    for dart, t in smap.twin.items():
        f1, f2 = smap.face_of[dart], smap.face_of[t]
        circ = dart[1] if dart[0] == "cs" else None
        adjacency.append((f1, f2, circ))
    for cid in state.circles:
        color = [-1] * nfaces
        color[smap.outer] = 0
        queue = [smap.outer]
        while queue:
            f = queue.pop()
            for (a, b, circ) in adjacency:
                if a != f:
                    continue
                nc = color[a] ^ 1 if circ == cid else color[a]
                if color[b] == -1:
                    color[b] = nc
                    queue.append(b)
                elif color[b] != nc:
                    raise BraidingError("face two-coloring failed")
        inside[cid] = frozenset(f for f in range(nfaces) if color[f] == 1)
        left_face = smap.face_of[("cs", cid, 0, 0)]
        orientation[cid] = +1 if left_face in inside[cid] else -1
    return Geometry(smap, inside, orientation)


# ---------------------------------------------------------------------------
# Quasi-canonical validation
# ---------------------------------------------------------------------------


@dataclass
class ValidationReport:
    passed: bool
    detail: str

    def __bool__(self) -> bool:
        return self.passed


def quasi_canonical_validate(state: SurfaceState) -> ValidationReport:
    """Check the quasi-canonical axioms and planarity; report the first
    violation."""
    try:
        geo = _geometry(state)
    except BraidingError as exc:
        return ValidationReport(False, f"embedding: {exc}")
    for bid, bd in state.bands.items():
        if bd.circles[0] == bd.circles[-1]:
            return ValidationReport(False, f"band {bid} joins a circle to itself")
        ends = {bd.circles[0], bd.circles[-1]}
        if not geo.coherent(bd.circles[0], bd.circles[-1]):
            return ValidationReport(
                False, f"band {bid} joins incoherent circles {sorted(ends)}"
            )
        meet: dict[int, int] = {}
        for cid in bd.circles:
            meet[cid] = meet.get(cid, 0) + 1
        for cid, count in meet.items():
            if count > 1:
                return ValidationReport(
                    False, f"band {bid} meets circle {cid} {count} times"
                )
        for pos in range(1, bd.stops - 1):
            crossed = bd.circles[pos]
            for other in ends:
                if not geo.coherent(crossed, other):
                    return ValidationReport(
                        False,
                        f"band {bid} crosses circle {crossed} incoherent with {other}",
                    )
    return ValidationReport(True, "quasi-canonical")


# ---------------------------------------------------------------------------
# Disk bunching
# ---------------------------------------------------------------------------


def _bunch(state: SurfaceState, s_cid: int, o_cid: int, p_idx: int, q_idx: int,
           eps: int, sigma: int) -> Optional[SurfaceState]:
    """Band-sum circle s_cid with a parallel copy of o_cid.

    The copy runs on side sigma of o_cid, traversed with (eps = +1) or
    against (eps = -1) its direction; gamma leaves s_cid after event p_idx
    and reaches o_cid after event q_idx.  Returns None when a band would meet
    the new circle twice.
    """
    new = state.copy()
    s_evs = new.circles[s_cid]
    o_evs = new.circles[o_cid]
    m = len(o_evs)
    if eps > 0:
        copy_order = [o_evs[(q_idx + 1 + t) % m] for t in range(m)]
    else:
        copy_order = [o_evs[(q_idx - t) % m] for t in range(m)]
    insertions: dict[int, list[tuple[int, int]]] = {}
    copy_visits: list[tuple[int, int, int]] = []  # (band, insert position, side)
    for (bid, pos) in copy_order:
        bd = new.bands[bid]
        if bd.is_end(pos):
            if bd.sides[pos] != sigma:
                continue
            if pos == 0:
                at, bit = 1, -sigma * eps
            else:
                at, bit = pos, sigma * eps
        else:
            beta = bd.sides[pos]
            if sigma == -beta:
                at, bit = pos + 1, -sigma * eps
            else:
                at, bit = pos, sigma * eps
        if bid in insertions:
            return None  # the band would cross the new circle twice
        insertions[bid] = [(at, bit)]
        copy_visits.append((bid, at, bit))
    # apply insertions, remapping route positions everywhere
    remap: dict[int, dict[int, int]] = {}
    for bid, ins in insertions.items():
        bd = new.bands[bid]
        (at, bit) = ins[0]
        mapping = {old: (old if old < at else old + 1) for old in range(bd.stops)}
        bd.circles.insert(at, s_cid)
        bd.sides.insert(at, bit)
        remap[bid] = mapping
    def fix(visit: Visit) -> Visit:
        bid, pos = visit
        if bid in remap:
            return (bid, remap[bid][pos])
        return visit
    for cid in new.circles:
        new.circles[cid] = [fix(v) for v in new.circles[cid]]
    rebased = new.circles[s_cid]
    start = (p_idx + 1) % len(rebased) if rebased else 0
    rotated = rebased[start:] + rebased[:start]
    # the inserted stop sits at index `at` of its band's new route
    new_events = rotated + [(bid, at) for (bid, at, _bit) in copy_visits]
    new.circles[s_cid] = new_events
    return new


def bunching_candidates(state: SurfaceState, geo: Geometry):
    """Deterministic candidate list: (new crossings, circles, face, data)."""
    smap = geo.smap
    incoherent = geo.incoherent_pairs(state)
    out = []
    for (a, b) in incoherent:
        for (s_cid, o_cid) in ((a, b), (b, a)):
            s_faces: dict[int, list[int]] = {}
            o_faces: dict[int, list[int]] = {}
            for idx in range(len(state.circles[s_cid])):
                for half in (0, 1):
                    f = smap.face_of[("cs", s_cid, idx, half)]
                    s_faces.setdefault(f, []).append(idx)
            for idx in range(len(state.circles[o_cid])):
                for half in (0, 1):
                    f = smap.face_of[("cs", o_cid, idx, half)]
                    o_faces.setdefault(f, []).append(idx)
            for f in sorted(set(s_faces) & set(o_faces)):
                for p_idx in sorted(set(s_faces[f])):
                    for q_idx in sorted(set(o_faces[f])):
                        for eps in (+1, -1):
                            for sigma in (+1, -1):
                                cost = sum(
                                    1
                                    for (bid, pos) in state.circles[o_cid]
                                    if not state.bands[bid].is_end(pos)
                                    or state.bands[bid].sides[pos] == sigma
                                )
                                out.append(
                                    (cost, s_cid, o_cid, f, p_idx, q_idx, eps, sigma)
                                )
    return sorted(out)


def bunch_once(state: SurfaceState, geo: Geometry) -> Optional[SurfaceState]:
    """Apply the first valid bunching that strictly decreases the number of
    incoherent pairs, preserving circle and signed band counts."""
    before = len(geo.incoherent_pairs(state))
    counts = state.counts()
    for (_cost, s_cid, o_cid, _f, p_idx, q_idx, eps, sigma) in bunching_candidates(state, geo):
        cand = _bunch(state, s_cid, o_cid, p_idx, q_idx, eps, sigma)
        if cand is None or cand.counts() != counts:
            continue
        try:
            geo2 = _geometry(cand)
        except BraidingError:
            continue
        if len(geo2.incoherent_pairs(cand)) >= before:
            continue
        if not quasi_canonical_validate(cand):
            continue
        return cand
    return None


# ---------------------------------------------------------------------------
# Reading the braid word off a coherent configuration
# ---------------------------------------------------------------------------


def _left_disks(state: SurfaceState, geo: Geometry) -> dict[int, frozenset]:
    nfaces = len(geo.smap.faces)
    allf = frozenset(range(nfaces))
    disks = {}
    for cid in state.circles:
        disks[cid] = (
            geo.inside[cid] if geo.orientation[cid] > 0 else allf - geo.inside[cid]
        )
    return disks


def _cut_path(state: SurfaceState, geo: Geometry, inner_faces: frozenset,
              target_faces: frozenset) -> dict[int, int]:
    """Basepoint segment per circle along a dual path between the two braid
    axis regions, crossing each circle exactly once and no band."""
    smap = geo.smap
    n_circles = len(state.circles)
    # dual edges through circle segments only
    edges: list[tuple[int, int, int, int]] = []  # (face, face, circle, segment)
    for dart, t in smap.twin.items():
        if dart[0] != "cs" or dart[3] != 0:
            continue
        edges.append((smap.face_of[dart], smap.face_of[t], dart[1], dart[2]))
    adj: dict[int, list[tuple[int, int, int]]] = {}
    for (f1, f2, cid, seg) in edges:
        adj.setdefault(f1, []).append((f2, cid, seg))
        adj.setdefault(f2, []).append((f1, cid, seg))
    from collections import deque as _dq

    for start in sorted(inner_faces):
        queue = _dq([(start, frozenset(), ())])
        seen = {(start, frozenset())}
        while queue:
            face, crossed, path = queue.popleft()
            if face in target_faces and len(crossed) == n_circles:
                return {cid: seg for (cid, seg) in path}
            for (f2, cid, seg) in adj.get(face, ()):
                if cid in crossed:
                    continue
                key = (f2, crossed | {cid})
                if key in seen:
                    continue
                seen.add(key)
                queue.append((f2, crossed | {cid}, path + ((cid, seg),)))
    raise BraidingError("no cut between the braid axis regions")


def read_braid(state: SurfaceState, geo: Optional[Geometry] = None) -> BraidWord:
    """Extract the braid word from an all-coherent configuration."""
    geo = geo or _geometry(state)
    if geo.incoherent_pairs(state):
        raise BraidingError("configuration still has incoherent circle pairs")
    disks = _left_disks(state, geo)
    chain = sorted(state.circles, key=lambda c: (len(disks[c]), c))
    for a, b in zip(chain, chain[1:]):
        if not disks[a] < disks[b]:
            raise BraidingError("left disks do not form a chain")
    strand = {cid: k + 1 for k, cid in enumerate(chain)}
    allf = frozenset(range(len(geo.smap.faces)))
    base = _cut_path(state, geo, disks[chain[0]], allf - disks[chain[-1]])
    # linearize each circle's visits starting after the cut segment
    order_on_circle: dict[Visit, tuple[int, int]] = {}
    for cid, evs in state.circles.items():
        m = len(evs)
        start = (base[cid] + 1) % m
        for k in range(m):
            order_on_circle[evs[(start + k) % m]] = (cid, k)
    # precedence between bands from consecutive visits on each circle
    succ: dict[int, set[int]] = {bid: set() for bid in state.bands}
    indeg = {bid: 0 for bid in state.bands}
    for cid, evs in state.circles.items():
        m = len(evs)
        start = (base[cid] + 1) % m
        seq = [evs[(start + k) % m] for k in range(m)]
        for (b1, _), (b2, _) in zip(seq, seq[1:]):
            if b1 != b2 and b2 not in succ[b1]:
                succ[b1].add(b2)
    for bid, nxts in succ.items():
        for b2 in nxts:
            indeg[b2] += 1
    import heapq

    heap = [bid for bid in state.bands if indeg[bid] == 0]
    heapq.heapify(heap)
    letters: list[Letter] = []
    while heap:
        bid = heapq.heappop(heap)
        bd = state.bands[bid]
        i, j = sorted((strand[bd.circles[0]], strand[bd.circles[-1]]))
        crossed = sorted(strand[c] for c in bd.circles[1:-1])
        if crossed != list(range(i + 1, j)):
            raise BraidingError(
                f"band {bid} does not cross exactly the strands between its ends"
            )
        letters.append(band(i, j, bd.sign))
        for b2 in sorted(succ[bid]):
            indeg[b2] -= 1
            if indeg[b2] == 0:
                heapq.heappush(heap, b2)
    if len(letters) != len(state.bands):
        raise BraidingError("band precedence graph has a cycle")
    return BraidWord(len(state.circles), tuple(letters))


def braid_from_diagram(pd: PDCode, max_steps: int = 10_000):
    """Braid a connected diagram: returns (word, bunching step count).

    The output has one strand per Seifert circle and one letter per crossing
    with matching signs; its closure is the diagram's link.
    """
    if pd.loops and pd.crossings:
        raise BraidingError("diagram with free loops is not connected")
    if not pd.crossings:
        if pd.loops != 1:
            raise BraidingError("empty diagram must be a single unknot loop")
        return BraidWord(1), 0
    if not is_connected(pd):
        raise BraidingError("diagram is not connected")
    state = initial_state(pd)
    steps = 0
    while True:
        geo = _geometry(state)
        if not geo.incoherent_pairs(state):
            return read_braid(state, geo), steps
        nxt = bunch_once(state, geo)
        if nxt is None:
            raise BraidingError("no valid bunching move decreases incoherence")
        state = nxt
        steps += 1
        if steps > max_steps:
            raise BraidingError("bunching did not terminate")
