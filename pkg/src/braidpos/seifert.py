"""
Seifert's algorithm on PD codes: circles, the signed Seifert graph, block
decomposition, homogeneity, and the diagram-level invariants.

The oriented smoothing pairs the incoming arcs of a crossing with the
outgoing arcs on the same side; the orbits are the Seifert circles and every
crossing becomes a signed edge of the Seifert graph joining the two circles
it touches.  Blocks are the maximal 2-connected subgraphs (bridges count as
their own blocks); a diagram is homogeneous when every block is sign-pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .pdcodes import Crossing, PDCode


def smoothing_pairs(x: Crossing) -> tuple[tuple[int, int], tuple[int, int]]:
    """The two (incoming arc, outgoing arc) strands of the oriented smoothing."""
    a, b, c, d = x.arcs
    if x.sign > 0:
        return (a, b), (d, c)
    return (a, d), (b, c)


@dataclass
class SeifertStructure:
    """Circles as arc cycles plus the signed edges between them."""

    pd: PDCode
    circles: list[list[int]]                  # arcs in traversal order
    circle_of: dict[int, int]                 # arc -> circle index
    edges: list[tuple[int, int, int]]         # (circle, circle, sign) per crossing

    @property
    def n_circles(self) -> int:
        return len(self.circles) + self.pd.loops


def seifert_circles(pd: PDCode) -> SeifertStructure:
    succ: dict[int, int] = {}
    for x in pd.crossings:
        for inc, out in smoothing_pairs(x):
            succ[inc] = out
    circles: list[list[int]] = []
    circle_of: dict[int, int] = {}
    for start in sorted(succ):
        if start in circle_of:
            continue
        cyclearcs = []
        cur = start
        while cur not in circle_of:
            circle_of[cur] = len(circles)
            cyclearcs.append(cur)
            cur = succ[cur]
        circles.append(cyclearcs)
    edges = []
    for x in pd.crossings:
        (a, _), (d, _) = smoothing_pairs(x)
        c1, c2 = circle_of[a], circle_of[d]
        assert c1 != c2, "Seifert graph has no loops"
        edges.append((c1, c2, x.sign))
    return SeifertStructure(pd, circles, circle_of, edges)


@dataclass
class SeifertGraph:
    n_vertices: int
    edges: list[tuple[int, int, int]]  # (u, v, sign)

    def adjacency(self) -> dict[int, list[tuple[int, int]]]:
        adj: dict[int, list[tuple[int, int]]] = {v: [] for v in range(self.n_vertices)}
        for idx, (u, v, _) in enumerate(self.edges):
            adj[u].append((v, idx))
            adj[v].append((u, idx))
        return adj


def seifert_graph(structure: SeifertStructure) -> SeifertGraph:
    return SeifertGraph(structure.n_circles, list(structure.edges))


def blocks(g: SeifertGraph) -> list[list[int]]:
    """Edge partition into maximal 2-connected subgraphs (Hopcroft-Tarjan)."""
    adj = g.adjacency()
    visited = [False] * g.n_vertices
    depth = [0] * g.n_vertices
    low = [0] * g.n_vertices
    stack: list[int] = []
    out: list[list[int]] = []

    def dfs(root: int):
        frames = [(root, -1, iter(adj[root]))]
        visited[root] = True
        depth[root] = low[root] = 0
        while frames:
            v, parent_edge, it = frames[-1]
            advanced = False
            for (w, eidx) in it:
                if eidx == parent_edge:
                    continue
                if not visited[w]:
                    stack.append(eidx)
                    visited[w] = True
                    depth[w] = low[w] = depth[v] + 1
                    frames.append((w, eidx, iter(adj[w])))
                    advanced = True
                    break
                elif depth[w] < depth[v]:
                    stack.append(eidx)
                    low[v] = min(low[v], depth[w])
            if advanced:
                continue
            frames.pop()
            if frames:
                pv = frames[-1][0]
                low[pv] = min(low[pv], low[v])
                if low[v] >= depth[pv]:
                    comp = []
                    while stack and stack[-1] != parent_edge:
                        comp.append(stack.pop())
                    if stack:
                        comp.append(stack.pop())
                    if comp:
                        out.append(sorted(comp))

    for v in range(g.n_vertices):
        if not visited[v] and adj[v]:
            dfs(v)
    covered = {e for comp in out for e in comp}
    for idx in range(len(g.edges)):
        assert idx in covered, "block decomposition must cover every edge"
    return sorted(out)


def is_homogeneous(g: SeifertGraph) -> bool:
    """Every block sign-pure."""
    for comp in blocks(g):
        signs = {g.edges[e][2] for e in comp}
        if len(signs) > 1:
            return False
    return True


def canonical_chi(pd: PDCode) -> int:
    """Euler characteristic of the canonical Seifert surface: s(D) - c(D)."""
    s = seifert_circles(pd).n_circles if pd.crossings else pd.loops
    return s - pd.n_crossings


def diagram_counts(pd: PDCode) -> tuple[int, int, int]:
    """(number of Seifert circles, positive crossings, negative crossings)."""
    s = seifert_circles(pd).n_circles if pd.crossings else pd.loops
    pos, neg = pd.signed_counts()
    return s, pos, neg


def diagram_sl(pd: PDCode, minimal_seifert_asserted: bool) -> int:
    """w(D) - s(D); valid as the maximal self-linking number only when the
    diagram realizes the minimal Seifert circle count of its link."""
    if not minimal_seifert_asserted:
        raise ValueError("caller must assert s(D) is minimal for the link")
    s, pos, neg = diagram_counts(pd)
    return (pos - neg) - s


def has_nugatory_crossing(pd: PDCode) -> bool:
    """A crossing whose removal disconnects the 4-valent graph (syntactic
    reducedness check)."""
    n = pd.n_crossings
    if n <= 1:
        return n == 1 and len(set(pd.crossings[0].arcs)) < 4
    for skip in range(n):
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        by_arc: dict[int, list[int]] = {}
        removed = pd.crossings[skip]
        for ci, x in enumerate(pd.crossings):
            if ci == skip:
                continue
            for a in x.arcs:
                if a in removed.arcs:
                    continue
                by_arc.setdefault(a, []).append(ci)
        for ds in by_arc.values():
            for other in ds[1:]:
                ra, rb = find(ds[0]), find(other)
                if ra != rb:
                    parent[ra] = rb
        rest = [i for i in range(n) if i != skip]
        if len({find(i) for i in rest}) > 1:
            return True
    return False


def is_alternating(pd: PDCode) -> bool:
    """Walking every component, crossings alternate over/under."""
    enter: dict[int, bool] = {}
    succ: dict[int, int] = {}
    for x in pd.crossings:
        enter[x.under_in] = False
        enter[x.over_in] = True
        succ[x.under_in] = x.under_out
        succ[x.over_in] = x.over_out
    seen: set[int] = set()
    for start in sorted(succ):
        if start in seen:
            continue
        cur = start
        prev: Optional[bool] = None
        while cur not in seen:
            seen.add(cur)
            if prev is not None and enter[cur] == prev:
                return False
            prev = enter[cur]
            cur = succ[cur]
        # closing the loop must alternate as well
        if enter[cur] == prev and len([a for a in seen]) > 1:
            return False
    return True


def dhl_minimal_seifert_check(pd: PDCode) -> bool:
    """For a reduced alternating diagram: the Seifert circle count equals the
    braid index iff no circle pair is joined by exactly one band."""
    if has_nugatory_crossing(pd):
        raise ValueError("diagram is not reduced (nugatory crossing)")
    st = seifert_circles(pd)
    multiplicity: dict[tuple[int, int], int] = {}
    for (u, v, _) in st.edges:
        key = (min(u, v), max(u, v))
        multiplicity[key] = multiplicity.get(key, 0) + 1
    return all(m >= 2 for m in multiplicity.values())
