"""Minimisation, pseudonymisation, and timestamp generalisation.

These are the record-level safeguards applied between raw extraction and
any analysis: keep only justified fields, replace direct identifiers with
keyed digests, scrub inline user mentions, and coarsen timestamps to the
week so posting moments stop being quasi-identifiers.

Outputs remain pseudonymised personal data. Nothing here claims to
anonymise; re-identification with additional information stays possible.
"""
from __future__ import annotations

import hashlib
import hmac
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Iterable, Optional, Sequence

from ..audit import AuditTrail
from ..errors import MissingSalt, UnjustifiedField, UnparseableTimestamp

Record = dict[str, Any]

# 32 hex chars = 128 bits, enough that distinct identifiers collide with
# negligible probability.
_DIGEST_HEX_CHARS = 32

PLACEHOLDER = "[USER]"


@dataclass(frozen=True)
class AllowlistEntry:
    field_name: str
    justification: str


@dataclass(frozen=True)
class MinimisationPlan:
    """Fields that survive minimisation, each with its stated purpose."""

    allowlist: tuple[AllowlistEntry, ...]

    def validate(self) -> None:
        for entry in self.allowlist:
            if not entry.justification.strip():
                raise UnjustifiedField(f"field {entry.field_name!r} has no justification")

    @property
    def field_names(self) -> list[str]:
        return [entry.field_name for entry in self.allowlist]

    @classmethod
    def from_dict(cls, data: dict) -> "MinimisationPlan":
        return cls(tuple(AllowlistEntry(e["field_name"], e.get("justification", "")) for e in data["allowlist"]))


def apply_minimisation(
    records: Iterable[Record],
    plan: MinimisationPlan,
    audit: Optional[AuditTrail] = None,
) -> list[Record]:
    """Keep exactly the allowlisted fields; everything else is removed."""
    plan.validate()
    keep = set(plan.field_names)
    out = [{k: v for k, v in record.items() if k in keep} for record in records]
    if audit is not None:
        audit.append("minimisation", records=len(out), retained_fields=sorted(keep))
    return out


@dataclass(frozen=True)
class PseudonymisationSpec:
    """Direct identifiers to drop, fields to hash, and inline patterns to scrub.

    The salt is injected (never generated here) so digests are auditable
    and revocable: discard the salt and the mapping is gone.
    """

    drop_fields: tuple[str, ...] = ()
    hash_fields: tuple[str, ...] = ()
    scrub_patterns: tuple[str, ...] = ()
    salt: Optional[str] = None
    placeholder: str = PLACEHOLDER

    @classmethod
    def from_dict(cls, data: dict, salt: Optional[str] = None) -> "PseudonymisationSpec":
        return cls(
            drop_fields=tuple(data.get("drop_fields", [])),
            hash_fields=tuple(data.get("hash_fields", [])),
            scrub_patterns=tuple(data.get("scrub_patterns", [])),
            salt=salt if salt is not None else data.get("salt"),
            placeholder=data.get("placeholder", PLACEHOLDER),
        )


def keyed_digest(salt: str, value: Any) -> str:
    return hmac.new(salt.encode("utf-8"), str(value).encode("utf-8"), hashlib.sha256).hexdigest()[:_DIGEST_HEX_CHARS]


def pseudonymise(
    records: Iterable[Record],
    spec: PseudonymisationSpec,
    audit: Optional[AuditTrail] = None,
) -> list[Record]:
    """Drop, hash, and scrub. Digests are stable within a run (same salt)."""
    if spec.hash_fields and not spec.salt:
        raise MissingSalt("hash_fields configured but no salt supplied")
    patterns = [re.compile(p) for p in spec.scrub_patterns]
    drop = set(spec.drop_fields)
    hashed = set(spec.hash_fields)

    out: list[Record] = []
    for record in records:
        row: Record = {}
        for key, value in record.items():
            if key in drop:
                continue
            if key in hashed:
                row[key] = keyed_digest(spec.salt, value)  # type: ignore[arg-type]
                continue
            if isinstance(value, str) and patterns:
                for pattern in patterns:
                    value = pattern.sub(spec.placeholder, value)
            row[key] = value
        out.append(row)
    if audit is not None:
        audit.append(
            "pseudonymisation",
            records=len(out),
            dropped=sorted(drop),
            hashed=sorted(hashed),
            scrub_patterns=len(patterns),
        )
    return out


def _parse_instant(value: Any) -> datetime:
    if isinstance(value, datetime):
        return value if value.tzinfo else value.replace(tzinfo=timezone.utc)
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        try:
            return datetime.fromtimestamp(float(value), tz=timezone.utc)
        except (OverflowError, OSError, ValueError) as exc:
            raise UnparseableTimestamp(f"epoch value out of range: {value!r}") from exc
    if isinstance(value, str):
        text = value.strip()
        if text.endswith(("Z", "z")):
            text = text[:-1] + "+00:00"
        try:
            parsed = datetime.fromisoformat(text)
        except ValueError as exc:
            raise UnparseableTimestamp(f"not an ISO-8601 instant: {value!r}") from exc
        return parsed if parsed.tzinfo else parsed.replace(tzinfo=timezone.utc)
    raise UnparseableTimestamp(f"unsupported timestamp value: {value!r}")


def iso_week_label(value: Any) -> str:
    """Week-level bucket, e.g. 2024-W12. Year comes from the ISO calendar,
    so instants near New Year land in the week's year, not the date's."""
    instant = _parse_instant(value)
    iso = instant.isocalendar()
    return f"{iso[0]}-W{iso[1]:02d}"


def generalise_timestamps(
    records: Iterable[Record],
    fields: Sequence[str],
    granularity: str = "iso_week",
    audit: Optional[AuditTrail] = None,
) -> list[Record]:
    """Replace absolute instants in ``fields`` with their week label."""
    if granularity != "iso_week":
        raise ValueError(f"unsupported granularity: {granularity!r}")
    out: list[Record] = []
    for record in records:
        row = dict(record)
        for name in fields:
            if name in row and row[name] is not None:
                row[name] = iso_week_label(row[name])
        out.append(row)
    if audit is not None:
        audit.append("timestamp_generalisation", records=len(out), fields=list(fields), granularity=granularity)
    return out
