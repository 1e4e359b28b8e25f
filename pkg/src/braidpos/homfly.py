"""
HOMFLYPT polynomial of closed braids through the Hecke algebra H_n.

Conventions.  The skein relation is  v^-1 P(+) - v P(-) = z P(0)  with
P(unknot) = 1.  The Hecke generators satisfy T_i^2 = z T_i + 1, so that
T_i^-1 = T_i - z, and the weighted (Markov) trace tr is linear with

    tr(1) = 1,   tr(x T_{n-1} y) = zeta tr(x y)   for x, y in H_{n-1},

where zeta = z / (1 - v^2).  For a word K in B_n with exponent sum e the
closure invariant is

    P(closure K) = v^e ((1 - v^2) / (v z))^(n-1) tr(image of K),

a normalization fixed by stabilization invariance and the skein relation and
validated against P(positive trefoil) = 2v^2 - v^4 + v^2 z^2.

Elements are stored in the natural basis {T_pi} with coefficients in Z[z];
the trace is evaluated as a polynomial in zeta, keeping all arithmetic in
integer Laurent polynomials (the final (1-v^2) powers are nonnegative).
"""

from __future__ import annotations

from functools import lru_cache
from math import comb

from .garside import Perm, compose, identity_perm, invert, inversions, transposition
from .laurent import LaurentPoly2
from .words import BraidWord, band_to_std

# coefficients in Z[z]: map z-exponent -> int
ZPoly = dict


def _zp_add(a: ZPoly, b: ZPoly) -> ZPoly:
    out = dict(a)
    for k, c in b.items():
        out[k] = out.get(k, 0) + c
        if out[k] == 0:
            del out[k]
    return out


def _zp_scale(a: ZPoly, coeff: int, shift: int = 0) -> ZPoly:
    if coeff == 0:
        return {}
    return {k + shift: c * coeff for k, c in a.items()}


def _zp_mul(a: ZPoly, b: ZPoly) -> ZPoly:
    out: ZPoly = {}
    for k, c in a.items():
        for k2, c2 in b.items():
            key = k + k2
            out[key] = out.get(key, 0) + c * c2
    return {k: c for k, c in out.items() if c != 0}


HeckeElement = dict  # Perm -> ZPoly


def _right_multiply_gen(elem: HeckeElement, n: int, i: int, sign: int) -> HeckeElement:
    """Multiply on the right by T_i (sign +1) or T_i^-1 = T_i - z (sign -1)."""
    t = transposition(n, i)
    out: HeckeElement = {}

    def add(perm: Perm, poly: ZPoly):
        if perm in out:
            merged = _zp_add(out[perm], poly)
            if merged:
                out[perm] = merged
            else:
                del out[perm]
        elif poly:
            out[perm] = poly

    for w, coeff in elem.items():
        wt = compose(w, t)
        winv = invert(w)
        ascending = winv[i] < winv[i + 1]
        if ascending:
            add(wt, coeff)
        else:
            # T_w T_i = z T_w + T_{w t}
            add(w, _zp_scale(coeff, 1, 1))
            add(wt, coeff)
        if sign < 0:
            add(w, _zp_scale(coeff, -1, 1))
    return out


def hecke_image(w: BraidWord) -> HeckeElement:
    """Image of the braid word in H_n, natural basis with Z[z] coefficients."""
    n = w.strands
    elem: HeckeElement = {identity_perm(n): {0: 1}}
    for ell in band_to_std(w).letters:
        elem = _right_multiply_gen(elem, n, ell.i - 1, ell.sign)
    return elem


# ---------------------------------------------------------------------------
# Markov trace
# ---------------------------------------------------------------------------

# trace values are polynomials in zeta with Z[z] coefficients:
# map zeta-exponent -> ZPoly
ZetaPoly = dict


def _zeta_add(a: ZetaPoly, b: ZetaPoly) -> ZetaPoly:
    out = dict(a)
    for k, p in b.items():
        merged = _zp_add(out.get(k, {}), p)
        if merged:
            out[k] = merged
        elif k in out:
            del out[k]
    return out


def _trim(perm: Perm) -> Perm:
    """Drop fixed top points so the memo key is minimal."""
    n = len(perm)
    while n > 1 and perm[n - 1] == n - 1:
        n -= 1
    return perm[:n]


@lru_cache(maxsize=None)
def _trace_perm(perm: Perm) -> tuple:
    """tr(T_perm) as a zeta-polynomial, returned in hashable form."""
    perm = _trim(perm)
    n = len(perm)
    if n <= 1:
        return ((0, ((0, 1),)),)
    j = perm[n - 1]
    assert j != n - 1
    # perm = u . w_j with u fixing the last strand and
    # w_j = s(n-1) s(n-2) ... s(j+1) (1-indexed), the staircase braid
    w_j = list(range(n))
    for x in range(j, n - 1):
        w_j[x] = x + 1
    w_j[n - 1] = j
    u = compose(perm, invert(tuple(w_j)))
    assert u[n - 1] == n - 1
    assert inversions(u) + (n - 1 - j) == inversions(perm), "staircase not length-additive"
    # T_perm = T_u T_{n-1} (T_{n-2} ... T_{j+1}) in 0-indexed generators:
    # the staircase word is s_{n-2} s_{n-3} ... s_j; peel the first letter
    # with the Markov property and push the rest into H_{n-1}
    elem: HeckeElement = {u: {0: 1}}
    for gen in range(n - 3, j - 1, -1):
        elem = _right_multiply_gen(elem, n, gen, +1)
    total: ZetaPoly = {}
    for w, coeff in elem.items():
        sub = _unfreeze(_trace_perm(w))
        total = _zeta_add(total, {k + 1: _zp_mul(p, coeff) for k, p in sub.items()})
    return _freeze(total)


def _freeze(zp: ZetaPoly) -> tuple:
    return tuple(
        (k, tuple(sorted(p.items()))) for k, p in sorted(zp.items())
    )


def _unfreeze(frozen: tuple) -> ZetaPoly:
    return {k: dict(p) for k, p in frozen}


def markov_trace(elem: HeckeElement) -> ZetaPoly:
    total: ZetaPoly = {}
    for w, coeff in elem.items():
        sub = _unfreeze(_trace_perm(w))
        total = _zeta_add(total, {k: _zp_mul(p, coeff) for k, p in sub.items()})
    return total


def homfly_closed_braid(w: BraidWord) -> LaurentPoly2:
    """HOMFLYPT polynomial of the closure of w, P(unknot) = 1."""
    n = w.strands
    e = sum(l.sign for l in w.letters)
    trace = markov_trace(hecke_image(w))
    # P = v^e sum_k c_k(z) z^(k-n+1) v^(1-n) (1-v^2)^(n-1-k)
    result = LaurentPoly2.zero()
    for k, zpoly in trace.items():
        m = n - 1 - k
        assert m >= 0, "trace zeta-degree exceeded strand count"
        binom = LaurentPoly2(
            {(2 * t, 0): (-1) ** t * comb(m, t) for t in range(m + 1)}
        )
        base = LaurentPoly2({(e + 1 - n, b + k - n + 1): c for b, c in zpoly.items()})
        result = result + base * binom
    return result


def min_deg_v(p: LaurentPoly2) -> int:
    return p.min_deg_v()


def max_deg_v(p: LaurentPoly2) -> int:
    return p.max_deg_v()


def mfw_braid_index_lower_bound(p: LaurentPoly2) -> int:
    """Morton-Franks-Williams bound: (v-spread)/2 + 1, rounded up."""
    spread = p.max_deg_v() - p.min_deg_v()
    return -((-spread) // 2) + 1


class CheckResult:
    """Outcome of an inequality check with a human-readable reason."""

    def __init__(self, passed: bool, detail: str):
        self.passed = passed
        self.detail = detail

    def __bool__(self) -> bool:
        return self.passed

    def __repr__(self) -> str:
        return f"CheckResult({self.passed}, {self.detail!r})"


def mfw_check(p: LaurentPoly2, sl_max: int, chi: int, homogeneous: bool) -> CheckResult:
    """Check SL + 1 <= min deg_v P, and min deg_v P <= 1 - chi when homogeneous."""
    lo = p.min_deg_v()
    if sl_max + 1 > lo:
        return CheckResult(False, f"SL+1 = {sl_max + 1} > min deg_v = {lo}")
    if homogeneous and lo > 1 - chi:
        return CheckResult(False, f"min deg_v = {lo} > 1 - chi = {1 - chi}")
    return CheckResult(True, f"SL+1 = {sl_max + 1} <= min deg_v = {lo}" +
                       (f" <= 1 - chi = {1 - chi}" if homogeneous else ""))


def homogeneous_positivity_criterion(p: LaurentPoly2, chi: int) -> bool:
    """For homogeneous links: positivity is equivalent to min deg_v = 1 - chi."""
    return p.min_deg_v() == 1 - chi
