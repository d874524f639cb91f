"""Embedded formula catalog: loading, validation, serialization.

The catalog is a flat text file of blank-line-separated records, each a
sequence of ``key=value`` lines.  Record kinds:

``catalog``
    File header carrying the format ``version``.
``formula``
    One weighted series with an exact argument, linear weights, and
    right-hand side, all in the surd-literal grammar.  ``provenance``
    states how the entry arose (``printed-source`` for transcribed
    source rows, ``prop1:<id>``/``prop4+:<id>``/``prop4-:<id>``/
    ``prop5:<id>``/``prop7:<id>``/``hat:<id>`` for rows derived from a
    source by the named transform, ``printed-intro``/``printed-remark``/
    ``printed-example``/``printed-appendix`` for the remaining
    transcriptions).  ``raw`` preserves misprinted source text verbatim
    when the stored value is a correction; ``notes`` carries
    machine-readable tokens (``misprinted-*``, ``suspect-w0``,
    ``sign:+``/``sign:-``, ``boundary-argument``, ``divergent-source``,
    ``congruence:<claim-id>``, ``companion-of:<id>``,
    ``target-digits:<n>``, ``term-cap:<n>``, ``infeasible-under-cap``,
    ``appendix-example:<k>``, ``rescales:<id>`` and friends).
``claim``
    One supercongruence claim with integer weights, base, right-hand
    multiplier, and character discriminant.
``identity``
    One identity-check descriptor: which structural check to run, at
    which parameter ``s``, to which series order (or digit count for
    numeric checks).

Ordering is significant and preserved; serialization is byte-stable so
that ``serialize_catalog(load_catalog(text)) == text``.
"""
from __future__ import annotations

import importlib.resources
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Union

from ..families import M_BY_S, FamilySpec
from ..surd import ParseError, SurdExpr, parse_literal, to_literal
from ..transforms import Formula
from .. import congruence

__all__ = [
    "Catalog",
    "CatalogError",
    "CatalogParseError",
    "ClaimRecord",
    "DuplicateIdError",
    "IdentityRecord",
    "has_note",
    "load_catalog",
    "load_default",
    "note_value",
    "record_text",
    "serialize_catalog",
]


def note_value(notes: str, key: str) -> Optional[str]:
    """The value of a ``key:value`` token in a notes field, or None."""
    prefix = key + ":"
    for token in notes.split():
        if token.startswith(prefix):
            return token[len(prefix):]
    return None


def has_note(notes: str, token: str) -> bool:
    """Whether a bare token appears in a notes field."""
    return token in notes.split()


class CatalogError(ValueError):
    """Base class for catalog loading problems."""


class CatalogParseError(CatalogError):
    """Malformed record or field; carries the 1-based source line."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DuplicateIdError(CatalogError):
    def __init__(self, line: int, record_id: str):
        super().__init__(f"line {line}: duplicate id {record_id!r}")
        self.line = line
        self.record_id = record_id


@dataclass(frozen=True)
class ClaimRecord:
    """Supercongruence claim as stored in the catalog."""

    id: str
    s: Fraction
    family: str
    M: int
    lin0: int
    lin1: int
    base: int
    rhs_mult: int
    character_disc: int
    source: str
    notes: str

    def to_claim(self) -> congruence.CongruenceClaim:
        return congruence.CongruenceClaim(
            family=FamilySpec(self.family, self.s),
            lin0=self.lin0,
            lin1=self.lin1,
            base=self.base,
            rhs_mult=self.rhs_mult,
            character_disc=self.character_disc,
        )


@dataclass(frozen=True)
class IdentityRecord:
    """One identity-check descriptor (check name, parameter, order)."""

    id: str
    check: str
    s: Fraction
    order: int
    notes: str


IDENTITY_CHECKS = (
    "3", "5", "6", "involution", "clausen", "euler", "pfaff", "quad", "2-numeric",
)


@dataclass
class Catalog:
    version: str
    formulas: List[Formula]
    claims: List[ClaimRecord]
    identities: List[IdentityRecord]

    def __post_init__(self) -> None:
        self._by_id: Dict[str, Union[Formula, ClaimRecord, IdentityRecord]] = {}
        for group in (self.formulas, self.claims, self.identities):
            for rec in group:
                self._by_id[rec.id] = rec

    def __len__(self) -> int:
        return len(self.formulas) + len(self.claims) + len(self.identities)

    def __iter__(self) -> Iterator[Union[Formula, ClaimRecord, IdentityRecord]]:
        yield from self.formulas
        yield from self.claims
        yield from self.identities

    def get(self, record_id: str):
        return self._by_id.get(record_id)

    def formula(self, record_id: str) -> Formula:
        rec = self._by_id.get(record_id)
        if not isinstance(rec, Formula):
            raise KeyError(f"no formula with id {record_id!r}")
        return rec


# ---------------------------------------------------------------------------
# Parsing.
# ---------------------------------------------------------------------------


class _Record:
    """One blank-line-separated record with per-key source lines, so
    field errors point at the offending line rather than the record."""

    __slots__ = ("start", "fields", "lines")

    def __init__(self, start: int):
        self.start = start
        self.fields: Dict[str, str] = {}
        self.lines: Dict[str, int] = {}

    def line_of(self, key: str) -> int:
        return self.lines.get(key, self.start)


def _records(text: str) -> Iterator[_Record]:
    rec: Optional[_Record] = None
    for lineno, rawline in enumerate(text.split("\n"), start=1):
        line = rawline.rstrip("\r")
        if not line.strip():
            if rec is not None:
                yield rec
                rec = None
            continue
        if line.lstrip().startswith("#"):
            continue
        if "=" not in line:
            raise CatalogParseError(lineno, f"expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if rec is None:
            rec = _Record(lineno)
        if key in rec.fields:
            raise CatalogParseError(lineno, f"repeated key {key!r} in record")
        rec.fields[key] = value
        rec.lines[key] = lineno
    if rec is not None:
        yield rec


def _need(rec: _Record, key: str) -> str:
    if key not in rec.fields:
        raise CatalogParseError(rec.start, f"missing required key {key!r}")
    return rec.fields[key]


def _fraction(rec: _Record, key: str) -> Fraction:
    value = _need(rec, key)
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise CatalogParseError(
            rec.line_of(key), f"bad rational for {key!r}: {exc}"
        ) from None


def _int(rec: _Record, key: str) -> int:
    value = _need(rec, key)
    try:
        return int(value)
    except ValueError:
        raise CatalogParseError(
            rec.line_of(key), f"bad integer for {key!r}: {value!r}"
        ) from None


def _surd(rec: _Record, key: str) -> SurdExpr:
    value = _need(rec, key)
    try:
        return parse_literal(value)
    except ParseError as exc:
        raise CatalogParseError(
            rec.line_of(key), f"bad surd literal for {key!r}: {exc}"
        ) from None


_FORMULA_KEYS = {
    "record", "id", "provenance", "s", "family", "M", "arg", "lin0", "lin1",
    "rhs", "tau0_im_sq", "convergent", "raw", "notes",
}
_CLAIM_KEYS = {
    "record", "id", "s", "family", "M", "lin0", "lin1", "base", "rhs_mult",
    "character_disc", "source", "notes",
}
_IDENTITY_KEYS = {"record", "id", "check", "s", "order", "notes"}


def _parse_formula(rec: _Record) -> Formula:
    unknown = set(rec.fields) - _FORMULA_KEYS
    if unknown:
        raise CatalogParseError(rec.start, f"unknown formula keys {sorted(unknown)}")
    s = _fraction(rec, "s")
    kind = _need(rec, "family")
    try:
        family = FamilySpec(kind, s)
    except ValueError as exc:
        raise CatalogParseError(rec.line_of("family"), str(exc)) from None
    if kind in ("HYP", "PROP1"):
        m = _int(rec, "M")
        if m != M_BY_S[s]:
            raise CatalogParseError(
                rec.line_of("M"),
                f"M={m} inconsistent with s={s} (expected {M_BY_S[s]})",
            )
    elif "M" in rec.fields:
        raise CatalogParseError(rec.line_of("M"), f"family {kind} must not carry M")
    convergent_text = _need(rec, "convergent")
    if convergent_text not in ("true", "false"):
        raise CatalogParseError(
            rec.line_of("convergent"),
            f"convergent must be true|false, got {convergent_text!r}",
        )
    return Formula(
        id=_need(rec, "id"),
        s=s,
        family=family,
        arg=_surd(rec, "arg"),
        lin0=_surd(rec, "lin0"),
        lin1=_surd(rec, "lin1"),
        rhs=_surd(rec, "rhs"),
        tau0_im_sq=_fraction(rec, "tau0_im_sq") if "tau0_im_sq" in rec.fields else None,
        convergent=convergent_text == "true",
        provenance=_need(rec, "provenance"),
        notes=_need(rec, "notes"),
        raw=rec.fields.get("raw"),
    )


def _parse_claim(rec: _Record) -> ClaimRecord:
    unknown = set(rec.fields) - _CLAIM_KEYS
    if unknown:
        raise CatalogParseError(rec.start, f"unknown claim keys {sorted(unknown)}")
    return ClaimRecord(
        id=_need(rec, "id"),
        s=_fraction(rec, "s"),
        family=_need(rec, "family"),
        M=_int(rec, "M"),
        lin0=_int(rec, "lin0"),
        lin1=_int(rec, "lin1"),
        base=_int(rec, "base"),
        rhs_mult=_int(rec, "rhs_mult"),
        character_disc=_int(rec, "character_disc"),
        source=_need(rec, "source"),
        notes=_need(rec, "notes"),
    )


def _parse_identity(rec: _Record) -> IdentityRecord:
    unknown = set(rec.fields) - _IDENTITY_KEYS
    if unknown:
        raise CatalogParseError(rec.start, f"unknown identity keys {sorted(unknown)}")
    check = _need(rec, "check")
    if check not in IDENTITY_CHECKS:
        raise CatalogParseError(rec.line_of("check"), f"unknown check {check!r}")
    order = _int(rec, "order")
    if order <= 0:
        raise CatalogParseError(rec.line_of("order"), "order must be positive")
    return IdentityRecord(
        id=_need(rec, "id"),
        check=check,
        s=_fraction(rec, "s"),
        order=order,
        notes=_need(rec, "notes"),
    )


def load_catalog(text: str) -> Catalog:
    """Parse catalog text; validates ids, families, and cross-references."""
    version = ""
    formulas: List[Formula] = []
    claims: List[ClaimRecord] = []
    identities: List[IdentityRecord] = []
    seen: Dict[str, int] = {}
    for raw_rec in _records(text):
        kind = _need(raw_rec, "record")
        if kind == "catalog":
            version = _need(raw_rec, "version")
            continue
        if kind == "formula":
            rec: Union[Formula, ClaimRecord, IdentityRecord] = _parse_formula(raw_rec)
            formulas.append(rec)
        elif kind == "claim":
            rec = _parse_claim(raw_rec)
            claims.append(rec)
        elif kind == "identity":
            rec = _parse_identity(raw_rec)
            identities.append(rec)
        else:
            raise CatalogParseError(
                raw_rec.line_of("record"), f"unknown record kind {kind!r}"
            )
        if rec.id in seen:
            raise DuplicateIdError(raw_rec.line_of("id"), rec.id)
        seen[rec.id] = raw_rec.start

    by_id = {f.id: f for f in formulas}
    claim_sources = {c.source for c in claims}
    for c in claims:
        if c.source not in by_id:
            raise CatalogError(f"claim {c.id} references unknown source {c.source!r}")
    for f in formulas:
        if not f.convergent and f.id not in claim_sources and not f.notes:
            raise CatalogError(
                f"formula {f.id}: convergent=false without claim reference or note"
            )
    return Catalog(version=version, formulas=formulas, claims=claims,
                   identities=identities)


# ---------------------------------------------------------------------------
# Serialization (byte-stable round trip).
# ---------------------------------------------------------------------------

_KEY_ORDER = [
    "record", "id", "provenance", "s", "family", "M", "check", "arg", "lin0",
    "lin1", "base", "rhs", "rhs_mult", "character_disc", "source", "order",
    "tau0_im_sq", "convergent", "raw", "version", "notes",
]


def _emit(fields: Dict[str, str]) -> List[str]:
    return [f"{k}={fields[k]}" for k in _KEY_ORDER if k in fields]


def _record_fields(rec: Union[Formula, ClaimRecord, IdentityRecord]) -> Dict[str, str]:
    if isinstance(rec, Formula):
        fields = {
            "record": "formula",
            "id": rec.id,
            "provenance": rec.provenance,
            "s": str(rec.s),
            "family": rec.family.kind,
            "arg": to_literal(rec.arg),
            "lin0": to_literal(rec.lin0),
            "lin1": to_literal(rec.lin1),
            "rhs": to_literal(rec.rhs),
            "convergent": "true" if rec.convergent else "false",
            "notes": rec.notes,
        }
        if rec.family.kind in ("HYP", "PROP1"):
            fields["M"] = str(M_BY_S[rec.s])
        if rec.tau0_im_sq is not None:
            fields["tau0_im_sq"] = str(rec.tau0_im_sq)
        if rec.raw is not None:
            fields["raw"] = rec.raw
        return fields
    if isinstance(rec, ClaimRecord):
        return {
            "record": "claim", "id": rec.id, "s": str(rec.s), "family": rec.family,
            "M": str(rec.M), "lin0": str(rec.lin0), "lin1": str(rec.lin1),
            "base": str(rec.base), "rhs_mult": str(rec.rhs_mult),
            "character_disc": str(rec.character_disc), "source": rec.source,
            "notes": rec.notes,
        }
    if isinstance(rec, IdentityRecord):
        return {
            "record": "identity", "id": rec.id, "check": rec.check,
            "s": str(rec.s), "order": str(rec.order), "notes": rec.notes,
        }
    raise TypeError(f"not a catalog record: {rec!r}")


def record_text(rec: Union[Formula, ClaimRecord, IdentityRecord]) -> str:
    """One record in the catalog's normalized key=value serialization."""
    return "\n".join(_emit(_record_fields(rec))) + "\n"


def serialize_catalog(cat: Catalog) -> str:
    lines: List[str] = []
    lines.extend(_emit({"record": "catalog", "version": cat.version}))
    lines.append("")
    for rec in cat:
        lines.extend(_emit(_record_fields(rec)))
        lines.append("")
    return "\n".join(lines)


def load_default() -> Catalog:
    """Load the catalog packaged with the library."""
    text = (
        importlib.resources.files(__package__)
        .joinpath("data/formulas.txt")
        .read_text(encoding="utf-8")
    )
    return load_catalog(text)
