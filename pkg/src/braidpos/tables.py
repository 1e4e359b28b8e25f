"""
Bundled positivity tables, reference records, and the verification pipeline.

Table files are tab-separated with a provenance header: columns
``knot<TAB>word<TAB>comments``, where comments is a comma-separated subset of
{mirror, flype, thm3.1, thm3.3, sqp-unknown, qp-known, positive-braid} plus
``delta3=k`` for the large-defect table.

Reference records are a CSV with columns name, crossing_number, braid_index,
genus3, genus4 (``lo:hi`` for intervals), max_self_linking, homfly, status,
provenance.  A verification run checks, per entry: the positivity class of
the written word, sharpness of the relevant Bennequin bound, the defect
column, the closure fingerprint against the record (recomputing on the
negated word for mirror rows, never by substitution), and strand economy
against the braid index and the Morton-Franks-Williams bound.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .homfly import homfly_closed_braid, mfw_braid_index_lower_bound
from .laurent import LaurentPoly2, parse_reference_poly
from .positivity import is_qp, is_sqp
from .words import (
    BraidWord,
    GroupedWord,
    flatten,
    mirror,
    parse_table_word,
    self_linking,
)

DATA_DIR = Path(__file__).parent / "data"

SECTIONS = ("SQP", "QP_DELTA1", "QP_DELTA_GT1")

KNOWN_COMMENTS = {
    "mirror",
    "flype",
    "thm3.1",
    "thm3.3",
    "sqp-unknown",
    "qp-known",
    "positive-braid",
}


class TableError(ValueError):
    pass


@dataclass(frozen=True)
class TableEntry:
    knot: str
    word: GroupedWord
    section: str
    comments: frozenset[str]
    delta3_claimed: Optional[int] = None

    @property
    def mirror(self) -> bool:
        return "mirror" in self.comments


@dataclass
class KnotRecord:
    name: str
    crossing_number: int
    braid_index: Optional[int] = None
    genus3: Optional[int] = None
    genus4: Optional[tuple[int, int]] = None  # [lo, hi]; point when lo == hi
    max_self_linking: Optional[int] = None
    homfly: Optional[LaurentPoly2] = None
    status: str = "known"
    provenance: str = ""

    def genus4_point(self) -> Optional[int]:
        if self.genus4 and self.genus4[0] == self.genus4[1]:
            return self.genus4[0]
        return None


def _section_of(tag: str) -> str:
    if tag not in SECTIONS:
        raise TableError(f"unknown table section {tag!r}")
    return tag


def load_tables(path) -> list[TableEntry]:
    """Parse a table file; raises TableError with the line number on failure."""
    entries: list[TableEntry] = []
    section = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                stripped = line[1:].strip()
                if stripped.startswith("section:"):
                    section = _section_of(stripped.split(":", 1)[1].strip())
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                raise TableError(f"{path}:{lineno}: expected knot<TAB>word")
            knot = parts[0].strip()
            word_text = parts[1].strip()
            comment_text = parts[2].strip() if len(parts) > 2 else ""
            if section is None:
                raise TableError(f"{path}:{lineno}: no section header seen")
            try:
                gw = parse_table_word(word_text)
            except ValueError as exc:
                raise TableError(f"{path}:{lineno}: {exc}") from exc
            comments = set()
            delta3 = None
            for item in comment_text.split(","):
                item = item.strip()
                if not item:
                    continue
                if item.startswith("delta3="):
                    delta3 = int(item.split("=", 1)[1])
                elif item in KNOWN_COMMENTS:
                    comments.add(item)
                else:
                    raise TableError(f"{path}:{lineno}: unknown comment {item!r}")
            entries.append(TableEntry(knot, gw, section, frozenset(comments), delta3))
    return entries


def load_bundled_tables() -> list[TableEntry]:
    out: list[TableEntry] = []
    for name in ("table_sqp.tsv", "table_qp_delta1.tsv", "table_qp_delta_gt1.tsv"):
        out.extend(load_tables(DATA_DIR / name))
    return out


def table_checksums() -> dict[str, str]:
    out = {}
    for name in ("table_sqp.tsv", "table_qp_delta1.tsv", "table_qp_delta_gt1.tsv"):
        digest = hashlib.sha256((DATA_DIR / name).read_bytes()).hexdigest()
        out[name] = digest
    return out


def _parse_genus4(text: str) -> Optional[tuple[int, int]]:
    text = text.strip()
    if not text:
        return None
    if ":" in text:
        lo, hi = text.split(":")
        return (int(lo), int(hi))
    v = int(text)
    return (v, v)


def load_knot_records(csv_path) -> dict[str, KnotRecord]:
    records: dict[str, KnotRecord] = {}
    with open(csv_path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(row for row in fh if not row.startswith("#"))
        required = {"name", "crossing_number"}
        if not required <= set(reader.fieldnames or ()):
            raise TableError(f"missing columns in {csv_path}: need {sorted(required)}")
        for row in reader:
            name = row["name"].strip()
            homfly = None
            if row.get("homfly", "").strip():
                try:
                    homfly = parse_reference_poly(row["homfly"])
                except ValueError as exc:
                    raise TableError(f"record {name}: bad homfly: {exc}") from exc
            genus4 = _parse_genus4(row.get("genus4", ""))
            genus3 = int(row["genus3"]) if row.get("genus3", "").strip() else None
            if genus3 is not None and genus4 is not None and genus4[1] > genus3:
                raise TableError(f"record {name}: genus4 > genus3")
            rec = KnotRecord(
                name=name,
                crossing_number=int(row["crossing_number"]),
                braid_index=int(row["braid_index"]) if row.get("braid_index", "").strip() else None,
                genus3=genus3,
                genus4=genus4,
                max_self_linking=(
                    int(row["max_self_linking"]) if row.get("max_self_linking", "").strip() else None
                ),
                homfly=homfly,
                status=row.get("status", "known").strip() or "known",
                provenance=row.get("provenance", "").strip(),
            )
            if homfly is not None and rec.braid_index is not None:
                if rec.braid_index < mfw_braid_index_lower_bound(homfly):
                    raise TableError(f"record {name}: braid index below the MFW bound")
            if name in records:
                raise TableError(f"duplicate record {name}")
            records[name] = rec
    return records


def load_bundled_records() -> dict[str, KnotRecord]:
    return load_knot_records(DATA_DIR / "records.csv")


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


@dataclass
class Check:
    name: str
    status: str  # pass | fail | indeterminate | skipped
    detail: str = ""


@dataclass
class Report:
    knot: str
    section: str
    checks: list[Check] = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return any(c.status == "fail" for c in self.checks)

    def to_json_dict(self) -> dict:
        return {
            "knot": self.knot,
            "section": self.section,
            "checks": [
                {"name": c.name, "status": c.status, "detail": c.detail}
                for c in self.checks
            ],
        }


def verify_entry(entry: TableEntry, record: Optional[KnotRecord]) -> Report:
    rep = Report(entry.knot, entry.section)
    w = flatten(entry.word)
    sl = self_linking(w)

    if entry.section == "SQP":
        ok, bands = is_sqp(entry.word)
        rep.checks.append(
            Check(
                "positivity-class",
                "pass" if ok else "fail",
                f"bands {bands}" if ok else "not a positive band word",
            )
        )
    else:
        ok = is_qp(entry.word)
        rep.checks.append(
            Check(
                "positivity-class",
                "pass" if ok else "fail",
                "conjugate-shaped" if ok else "factor without conjugate shape",
            )
        )

    if record is None:
        rep.checks.append(Check("record", "fail", "no reference record"))
        return rep

    if record.status == "unknown":
        rep.checks.append(Check("record", "indeterminate", "status unknown"))
        return rep

    if entry.section == "SQP":
        if record.genus3 is None:
            rep.checks.append(Check("bennequin-sharp", "indeterminate", "no genus"))
        else:
            want = 2 * record.genus3 - 1
            rep.checks.append(
                Check(
                    "bennequin-sharp",
                    "pass" if sl == want else "fail",
                    f"sl = {sl}, 2 g3 - 1 = {want}",
                )
            )
    else:
        g4 = record.genus4_point()
        if g4 is None:
            rep.checks.append(
                Check("slice-bennequin-sharp", "indeterminate", "interval genus4")
            )
        else:
            want = 2 * g4 - 1
            rep.checks.append(
                Check(
                    "slice-bennequin-sharp",
                    "pass" if sl == want else "fail",
                    f"sl = {sl}, 2 g4 - 1 = {want}",
                )
            )

    if record.genus3 is not None:
        delta3 = ((2 * record.genus3 - 1) - sl)
        if delta3 % 2:
            rep.checks.append(Check("delta3", "fail", "parity violation"))
        else:
            delta3 //= 2
            if entry.section == "SQP":
                want3 = 0
            elif entry.section == "QP_DELTA1":
                want3 = 1
            else:
                want3 = entry.delta3_claimed
            if want3 is None:
                rep.checks.append(Check("delta3", "indeterminate", f"delta3 = {delta3}"))
            else:
                rep.checks.append(
                    Check(
                        "delta3",
                        "pass" if delta3 == want3 else "fail",
                        f"computed {delta3}, expected {want3}",
                    )
                )

    if record.homfly is not None:
        computed = homfly_closed_braid(mirror(w) if entry.mirror else w)
        rep.checks.append(
            Check(
                "fingerprint",
                "pass" if computed == record.homfly else "fail",
                "HOMFLYPT matches" if computed == record.homfly else "HOMFLYPT differs",
            )
        )
        bound = mfw_braid_index_lower_bound(record.homfly)
        economy = w.strands >= bound and (
            record.braid_index is None or w.strands >= record.braid_index
        )
        rep.checks.append(
            Check(
                "strand-economy",
                "pass" if economy else "fail",
                f"strands {w.strands}, MFW bound {bound}, braid index {record.braid_index}",
            )
        )
    else:
        rep.checks.append(Check("fingerprint", "skipped", "no reference polynomial"))
    return rep


def _verify_one(args) -> Report:
    entry, record = args
    return verify_entry(entry, record)


@dataclass
class SummaryReport:
    reports: list[Report]
    missing: list[str]
    entries: int
    passed: int
    failed: int
    indeterminate: int
    elapsed: float

    def to_json(self, include_time: bool = True) -> str:
        payload = {
            "entries": self.entries,
            "passed": self.passed,
            "failed": self.failed,
            "indeterminate": self.indeterminate,
            "missing_records": self.missing,
            "reports": [r.to_json_dict() for r in self.reports],
        }
        if include_time:
            payload["elapsed_seconds"] = round(self.elapsed, 3)
        return json.dumps(payload, indent=2, sort_keys=True)


def verify_all(
    entries: Iterable[TableEntry],
    records: dict[str, KnotRecord],
    parallelism: int = 1,
) -> SummaryReport:
    entries = list(entries)
    start = time.time()
    jobs = [(e, records.get(e.knot)) for e in entries]
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            reports = list(pool.map(_verify_one, jobs, chunksize=4))
    else:
        reports = [_verify_one(j) for j in jobs]
    missing = [e.knot for e in entries if e.knot not in records]
    excluded = {
        e.knot for e in entries if records.get(e.knot) and records[e.knot].status == "unknown"
    }
    failed = sum(1 for r in reports if r.failed and r.knot not in excluded)
    indet = sum(
        1
        for r in reports
        if not r.failed and any(c.status == "indeterminate" for c in r.checks)
    )
    passed = len(reports) - failed - indet
    return SummaryReport(
        reports, missing, len(reports), passed, failed, indet, time.time() - start
    )


def nonqp_detector(records: dict[str, KnotRecord]) -> tuple[list[str], list[str]]:
    """Names with SL < 2 g4 - 1 strictly (positive slice-Bennequin defect),
    plus warnings for records missing the needed fields."""
    flagged: list[str] = []
    warnings: list[str] = []
    for name, rec in sorted(records.items()):
        if rec.status == "unknown":
            continue
        g4 = rec.genus4_point()
        if rec.max_self_linking is None or g4 is None:
            if rec.max_self_linking is None and rec.genus4 is None:
                continue  # record carries neither field; nothing to test
            warnings.append(f"{name}: missing max_self_linking or point genus4")
            continue
        if rec.max_self_linking < 2 * g4 - 1:
            flagged.append(name)
    return flagged, warnings
