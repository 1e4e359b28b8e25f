"""
Bounded move search for positivity witnesses.

Breadth-first search over cyclic rotations, far commutations, signed braid
slides, free cancellation and destabilization, hunting for a word that is
syntactically positive or that one of the direct conjugation absorptions
turns into a positive band word.  Successful searches return a replayable
certificate; exhaustion proves nothing.

The slide moves are the four length-preserving identities

    s(i)^-1 s(j) s(i)  =  s(j) s(i) s(j)^-1      (|i - j| = 1)
    s(i) s(j) s(i)^-1  =  s(j)^-1 s(i) s(j)      (|i - j| = 1)

together with the positive braid relation s(a) s(b) s(a) = s(b) s(a) s(b).
"""

from __future__ import annotations

from collections import deque
from typing import Optional

from .certificates import Certificate, Step, cycling, destabilization, rewrite
from .words import BraidWord, Letter, cycle, s, split_destabilize

DEFAULT_BUDGET = 50_000


def _neighbors(w: BraidWord):
    letters = w.letters
    L = len(letters)
    if L:
        yield cycle(w, 1), cycling(1)
    for t in range(L - 1):
        x, y = letters[t], letters[t + 1]
        if not (x.std and y.std):
            continue
        if abs(x.i - y.i) >= 2:
            out = BraidWord(w.strands, letters[:t] + (y, x) + letters[t + 2:])
            yield out, rewrite(out, note="commutation")
        if x.i == y.i and x.sign == -y.sign:
            out = BraidWord(w.strands, letters[:t] + letters[t + 2:])
            yield out, rewrite(out, note="free cancellation")
    for t in range(L - 2):
        x, y, z = letters[t], letters[t + 1], letters[t + 2]
        if not (x.std and y.std and z.std):
            continue
        rest = letters[:t], letters[t + 3:]
        if abs(x.i - y.i) == 1:
            if x.sign > 0 and y.sign > 0 and z == s(x.i):
                out = BraidWord(w.strands, rest[0] + (s(y.i), s(x.i), s(y.i)) + rest[1])
                yield out, rewrite(out, note="braid relation")
            if x.sign < 0 and y.sign > 0 and z == s(x.i):
                out = BraidWord(
                    w.strands, rest[0] + (s(y.i), s(x.i), s(y.i, -1)) + rest[1]
                )
                yield out, rewrite(out, note="negative slide")
            if x.sign > 0 and y.sign > 0 and z == s(x.i, -1):
                out = BraidWord(
                    w.strands, rest[0] + (s(y.i, -1), s(x.i), s(y.i)) + rest[1]
                )
                yield out, rewrite(out, note="negative slide")


def _goal_steps(w: BraidWord) -> Optional[tuple[list[Step], BraidWord]]:
    from .positivity import _try_shortcut, is_positive

    if is_positive(w):
        return [], w
    negs = [t for t, l in enumerate(w.letters) if l.sign < 0]
    if len(negs) == 1 and all(l.std for l in w.letters):
        return _try_shortcut(w, negs[0])
    return None


def search_sqp_steps(
    w: BraidWord, budget: int = DEFAULT_BUDGET
) -> Optional[tuple[list[Step], BraidWord]]:
    """BFS for a strongly quasipositive form; returns (steps, output) or None."""
    start = w.letters
    parents: dict[tuple, tuple[Optional[tuple], Optional[Step], BraidWord]] = {
        start: (None, None, w)
    }
    queue = deque([w])
    nodes = 0
    while queue and nodes < budget:
        cur = queue.popleft()
        nodes += 1
        goal = _goal_steps(cur)
        if goal is not None:
            tail_steps, out = goal
            steps: list[Step] = []
            key = cur.letters
            while parents[key][1] is not None:
                prev_key, step, _ = parents[key]
                steps.append(step)
                key = prev_key
            steps.reverse()
            return steps + tail_steps, out
        for nxt, step in _neighbors(cur):
            if nxt.letters not in parents:
                parents[nxt.letters] = (cur.letters, step, nxt)
                queue.append(nxt)
    return None


def move_search_prover(w: BraidWord, budget: int = DEFAULT_BUDGET) -> Optional[Certificate]:
    """Bounded prover: search for a strongly quasipositive word representing
    the same closure; destabilizations are tried eagerly on every state.

    Returns a validated certificate on success, None on exhaustion (which
    proves nothing).
    """
    start = w.letters, w.strands
    parents: dict[tuple, tuple[Optional[tuple], Optional[Step], BraidWord]] = {
        start: (None, None, w)
    }
    queue = deque([w])
    nodes = 0
    while queue and nodes < budget:
        cur = queue.popleft()
        nodes += 1
        goal = _goal_steps(cur)
        if goal is not None:
            tail_steps, out = goal
            steps: list[Step] = []
            key = cur.letters, cur.strands
            while parents[key][1] is not None:
                prev_key, step, _ = parents[key]
                steps.append(step)
                key = prev_key
            steps.reverse()
            cert = Certificate(w, out, steps + tail_steps)
            cert.validate()
            return cert
        neighbors = list(_neighbors(cur))
        for wall in range(1, cur.strands):
            got = split_destabilize(cur, wall)
            if got is not None:
                neighbors.append((got[0], destabilization(wall, got[1])))
        for nxt, step in neighbors:
            key = nxt.letters, nxt.strands
            if key not in parents:
                parents[key] = ((cur.letters, cur.strands), step, nxt)
                queue.append(nxt)
    return None
