"""Citation-traced decision records.

Every verdict the engine emits carries a trace: the ordered list of rules
that fired, each resolved against the bundled rules manifest so the
citation string can never drift from the rule id. Traces are the
accountability record (GDPR Art. 5(2)): same inputs, same rule sequence.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Any


def _load_manifest() -> dict[str, dict[str, str]]:
    raw = resources.files("petlp.data").joinpath("rules_manifest.json").read_text("utf-8")
    doc = json.loads(raw)
    return {rule["id"]: rule for rule in doc["rules"]}


RULE_REGISTRY: dict[str, dict[str, str]] = _load_manifest()


def inputs_digest(inputs: Any) -> str:
    """Stable short digest of the decision inputs (canonical JSON, sha256)."""
    blob = json.dumps(inputs, sort_keys=True, default=str, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class TraceEntry:
    rule_id: str
    citation: str
    inputs_digest: str
    conclusion: str

    def to_dict(self) -> dict[str, str]:
        return {
            "rule_id": self.rule_id,
            "citation": self.citation,
            "inputs_digest": self.inputs_digest,
            "conclusion": self.conclusion,
        }


@dataclass(frozen=True)
class DecisionTrace:
    entries: tuple[TraceEntry, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("a decision trace must contain at least one entry")
        for entry in self.entries:
            if not entry.citation:
                raise ValueError(f"rule {entry.rule_id} has an empty citation")

    @property
    def rule_ids(self) -> tuple[str, ...]:
        return tuple(entry.rule_id for entry in self.entries)

    def to_dict(self) -> dict[str, Any]:
        return {"entries": [entry.to_dict() for entry in self.entries]}


@dataclass
class TraceBuilder:
    """Accumulates fired rules for a single decision over fixed inputs."""

    inputs: Any
    entries: list[TraceEntry] = field(default_factory=list)

    def __post_init__(self) -> None:
        self._digest = inputs_digest(self.inputs)

    def fire(self, rule_id: str, conclusion: str, citation: str | None = None) -> None:
        """Record a fired rule. Citation resolves from the registry unless overridden
        (rule packs carry their own citations)."""
        if citation is None:
            try:
                citation = RULE_REGISTRY[rule_id]["citation"]
            except KeyError:
                raise KeyError(f"rule id {rule_id!r} is not in the rules manifest") from None
        self.entries.append(TraceEntry(rule_id, citation, self._digest, conclusion))

    def build(self) -> DecisionTrace:
        return DecisionTrace(tuple(self.entries))
