"""
Replayable certificates for braid rewriting procedures.

A certificate records the input word, the output word and a trace of steps.
Replaying the trace transforms the input into the output; each step is either
an equality rewrite, checked against the Garside normal form, or a structural
move that preserves the closure link type (conjugation, cycling, flype,
stabilization, destabilization across a wall).

Validation replays the trace, checks every rewrite by the word problem, and
optionally confirms that the closure fingerprint (HOMFLYPT) is unchanged from
input to output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from . import garside
from .words import (
    BraidWord,
    FlypeSite,
    Letter,
    apply_flype,
    band,
    cycle,
    s,
    split_destabilize,
    stabilize,
    strand_destabilize,
)


class CertificateError(ValueError):
    pass


@dataclass(frozen=True)
class Step:
    """One trace step.  ``kind`` selects the payload fields that apply."""

    kind: str  # rewrite | conjugate | cycle | flype | destabilize | stabilize
    word: Optional[BraidWord] = None     # rewrite target
    g: Optional[BraidWord] = None        # conjugator
    k: int = 0                           # cycle offset
    site: Optional[FlypeSite] = None
    wall: int = 0                        # destabilization wall
    sign: int = 0                        # destabilization / stabilization sign
    note: str = ""

    def apply(self, w: BraidWord) -> BraidWord:
        if self.kind == "rewrite":
            assert self.word is not None
            if not garside.equal(w, self.word):
                raise CertificateError(f"rewrite step is not an equality: {self.note}")
            return self.word
        if self.kind == "conjugate":
            assert self.g is not None
            return self.g.inverse() * w * self.g
        if self.kind == "cycle":
            return cycle(w, self.k)
        if self.kind == "flype":
            assert self.site is not None
            return apply_flype(w, self.site)
        if self.kind == "destabilize":
            got = split_destabilize(w, self.wall)
            if got is None:
                raise CertificateError("destabilization wall is not free")
            word, sign = got
            if sign != self.sign:
                raise CertificateError("destabilization sign mismatch")
            return word
        if self.kind == "destabilize_strand":
            got = strand_destabilize(w, self.wall)
            if got is None:
                raise CertificateError("strand is not singly attached")
            word, sign = got
            if sign != self.sign:
                raise CertificateError("destabilization sign mismatch")
            return word
        if self.kind == "stabilize":
            return stabilize(w, self.sign)
        raise CertificateError(f"unknown step kind {self.kind}")


def rewrite(word: BraidWord, note: str = "") -> Step:
    return Step("rewrite", word=word, note=note)


def conjugation(g: BraidWord, note: str = "") -> Step:
    return Step("conjugate", g=g, note=note)


def cycling(k: int, note: str = "") -> Step:
    return Step("cycle", k=k, note=note)


def flype_step(site: FlypeSite, note: str = "") -> Step:
    return Step("flype", site=site, note=note)


def destabilization(wall: int, sign: int, note: str = "") -> Step:
    return Step("destabilize", wall=wall, sign=sign, note=note)


def strand_destabilization(k: int, sign: int, note: str = "") -> Step:
    return Step("destabilize_strand", wall=k, sign=sign, note=note)


def stabilization(sign: int, note: str = "") -> Step:
    return Step("stabilize", sign=sign, note=note)


@dataclass
class Certificate:
    input: BraidWord
    output: BraidWord
    trace: list[Step] = field(default_factory=list)

    def replay(self) -> BraidWord:
        w = self.input
        for step in self.trace:
            w = step.apply(w)
        return w

    def validate(self, check_fingerprint: bool = False) -> bool:
        final = self.replay()
        if final.strands != self.output.strands or not garside.equal(final, self.output):
            raise CertificateError("trace does not reproduce the output word")
        if check_fingerprint:
            from .homfly import homfly_closed_braid

            if homfly_closed_braid(self.input) != homfly_closed_braid(self.output):
                raise CertificateError("closure fingerprint changed")
        return True

    # -- serialization -------------------------------------------------------

    def to_json(self) -> str:
        def enc_word(w: BraidWord):
            return {
                "strands": w.strands,
                "letters": [[l.i, l.j, l.sign, l.std] for l in w.letters],
            }

        def enc_step(st: Step):
            d = {"kind": st.kind, "note": st.note}
            if st.word is not None:
                d["word"] = enc_word(st.word)
            if st.g is not None:
                d["g"] = enc_word(st.g)
            if st.kind == "cycle":
                d["k"] = st.k
            if st.site is not None:
                d["site"] = {
                    "rotation": st.site.rotation,
                    "top": st.site.top,
                    "eps": st.site.eps,
                    "m": st.site.m,
                    "len_v": st.site.len_v,
                }
            if st.kind in ("destabilize", "destabilize_strand", "stabilize"):
                d["sign"] = st.sign
            if st.kind in ("destabilize", "destabilize_strand"):
                d["wall"] = st.wall
            return d

        return json.dumps(
            {
                "input": enc_word(self.input),
                "output": enc_word(self.output),
                "trace": [enc_step(st) for st in self.trace],
            },
            indent=2,
        )

    @staticmethod
    def from_json(text: str) -> "Certificate":
        raw = json.loads(text)

        def dec_word(d) -> BraidWord:
            letters = tuple(
                Letter(i, j, sign, std) for i, j, sign, std in d["letters"]
            )
            return BraidWord(d["strands"], letters)

        def dec_step(d) -> Step:
            site = None
            if "site" in d:
                site = FlypeSite(**d["site"])
            return Step(
                d["kind"],
                word=dec_word(d["word"]) if "word" in d else None,
                g=dec_word(d["g"]) if "g" in d else None,
                k=d.get("k", 0),
                site=site,
                wall=d.get("wall", 0),
                sign=d.get("sign", 0),
                note=d.get("note", ""),
            )

        return Certificate(
            dec_word(raw["input"]),
            dec_word(raw["output"]),
            [dec_step(st) for st in raw["trace"]],
        )
