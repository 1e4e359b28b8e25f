"""
Sparse integer Laurent polynomials in the two variables v, z.

Terms are stored as a map (v_exponent, z_exponent) -> nonzero coefficient;
equality is term-map equality.  The canonical string format, used in golden
files and in the bundled reference CSV, lists terms sorted by (v, z)
exponent::

    v^-2 z^0: 1; v^0 z^2: -3;

A converter for reference-style polynomial strings such as
``2*v^2 - v^4 + v^2*z^2`` is provided for CSV ingestion.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping


class LaurentPoly2:
    """Immutable sparse Laurent polynomial in v and z over the integers."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[int, int], int] | None = None):
        clean = {k: v for k, v in (terms or {}).items() if v != 0}
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentPoly2 is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "LaurentPoly2":
        return LaurentPoly2({})

    @staticmethod
    def one() -> "LaurentPoly2":
        return LaurentPoly2({(0, 0): 1})

    @staticmethod
    def term(coeff: int, v_exp: int = 0, z_exp: int = 0) -> "LaurentPoly2":
        return LaurentPoly2({(v_exp, z_exp): coeff})

    # -- ring operations ---------------------------------------------------

    def __add__(self, other: "LaurentPoly2") -> "LaurentPoly2":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return LaurentPoly2(out)

    def __sub__(self, other: "LaurentPoly2") -> "LaurentPoly2":
        return self + (-other)

    def __neg__(self) -> "LaurentPoly2":
        return LaurentPoly2({k: -c for k, c in self.terms.items()})

    def __mul__(self, other: "LaurentPoly2") -> "LaurentPoly2":
        out: dict[tuple[int, int], int] = {}
        for (a, b), c in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                k = (a + a2, b + b2)
                out[k] = out.get(k, 0) + c * c2
        return LaurentPoly2(out)

    def scale(self, coeff: int, v_exp: int = 0, z_exp: int = 0) -> "LaurentPoly2":
        if coeff == 0:
            return LaurentPoly2.zero()
        return LaurentPoly2(
            {(a + v_exp, b + z_exp): c * coeff for (a, b), c in self.terms.items()}
        )

    def __pow__(self, e: int) -> "LaurentPoly2":
        if e < 0:
            raise ValueError("negative power of a polynomial")
        out = LaurentPoly2.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentPoly2) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- degree data --------------------------------------------------------

    def min_deg_v(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no v-degree")
        return min(a for a, _ in self.terms)

    def max_deg_v(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no v-degree")
        return max(a for a, _ in self.terms)

    # -- serialization ------------------------------------------------------

    def serialize(self) -> str:
        parts = [
            f"v^{a} z^{b}: {c};" for (a, b), c in sorted(self.terms.items())
        ]
        return " ".join(parts) if parts else "0;"

    @staticmethod
    def deserialize(text: str) -> "LaurentPoly2":
        text = text.strip()
        if text in ("", "0;", "0"):
            return LaurentPoly2.zero()
        terms: dict[tuple[int, int], int] = {}
        for chunk in text.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            m = re.fullmatch(r"v\^(-?\d+)\s+z\^(-?\d+):\s*(-?\d+)", chunk)
            if not m:
                raise ValueError(f"bad polynomial term {chunk!r}")
            terms[(int(m.group(1)), int(m.group(2)))] = int(m.group(3))
        return LaurentPoly2(terms)

    def __repr__(self) -> str:
        return f"LaurentPoly2({self.serialize()!r})"


_MONOMIAL = re.compile(
    r"\s*(?P<sign>[+-])?\s*(?P<coeff>\d+)?\s*"
    r"(?P<vars>(?:\*?\s*[vz](?:\^\(?-?\d+\)?)?\s*)*)"
)


def parse_reference_poly(text: str) -> LaurentPoly2:
    """Parse a reference-style polynomial string into a LaurentPoly2.

    Grammar: a sum of monomials ``[+-] [coeff] [* v^a] [* z^b]`` where missing
    exponents default to 1 and missing coefficients to 1, e.g.
    ``2*v^2 - v^4 + v^2*z^2`` or ``v^(-2) - 1``.
    """
    text = text.strip()
    if not text:
        raise ValueError("empty polynomial string")
    result: dict[tuple[int, int], int] = {}
    pos = 0
    first = True
    while pos < len(text):
        m = _MONOMIAL.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"bad polynomial syntax at {pos} in {text!r}")
        sign_txt = m.group("sign")
        if sign_txt is None and not first:
            raise ValueError(f"missing sign at {pos} in {text!r}")
        sign = -1 if sign_txt == "-" else 1
        coeff = int(m.group("coeff")) if m.group("coeff") else 1
        v_exp = z_exp = 0
        for var_m in re.finditer(r"([vz])(?:\^\(?(-?\d+)\)?)?", m.group("vars") or ""):
            e = int(var_m.group(2)) if var_m.group(2) else 1
            if var_m.group(1) == "v":
                v_exp += e
            else:
                z_exp += e
        key = (v_exp, z_exp)
        result[key] = result.get(key, 0) + sign * coeff
        pos = m.end()
        first = False
    return LaurentPoly2(result)
