"""Platform rule pack loading and validation.

A rule pack is a JSON document encoding what a platform's terms say about
each research output kind. Packs are data so that terms updates never
require code changes; every rule must cite the provision it encodes.
"""
from __future__ import annotations

import json
from importlib import resources
from typing import Any, Union

from ..errors import DuplicateRule, SchemaViolation
from .types import OutputKind, PackRule, PlatformRulePack, Verdict

_ALLOWED_RULE_KEYS = {"output_kind", "when", "verdict", "conditions", "citation"}


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise SchemaViolation(message)


def load_rule_pack(document: Union[str, dict]) -> PlatformRulePack:
    """Parse and validate a rule pack document (JSON text or mapping)."""
    if isinstance(document, str):
        try:
            data = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"rule pack is not valid JSON: {exc}") from exc
    else:
        data = document

    _require(isinstance(data, dict), "rule pack must be a JSON object")
    platform_id = data.get("platform_id")
    _require(isinstance(platform_id, str) and bool(platform_id.strip()), "platform_id must be a non-empty string")
    raw_rules = data.get("rules")
    _require(isinstance(raw_rules, list), "rules must be a list")

    rules: list[PackRule] = []
    seen: set[tuple[str, frozenset[str]]] = set()
    for index, raw in enumerate(raw_rules):
        _require(isinstance(raw, dict), f"rule {index} must be an object")
        unknown = set(raw) - _ALLOWED_RULE_KEYS
        _require(not unknown, f"rule {index} has unknown keys: {sorted(unknown)}")
        try:
            output_kind = OutputKind(raw["output_kind"])
        except (KeyError, ValueError):
            raise SchemaViolation(f"rule {index}: output_kind must be one of {[k.value for k in OutputKind]}")
        try:
            verdict = Verdict(raw["verdict"])
        except (KeyError, ValueError):
            raise SchemaViolation(f"rule {index}: verdict must be one of {[v.value for v in Verdict]}")
        when = raw.get("when", [])
        conditions = raw.get("conditions", [])
        _require(
            isinstance(when, list) and all(isinstance(t, str) and t for t in when),
            f"rule {index}: when must be a list of non-empty tags",
        )
        _require(
            isinstance(conditions, list) and all(isinstance(t, str) and t for t in conditions),
            f"rule {index}: conditions must be a list of non-empty tags",
        )
        citation = raw.get("citation")
        _require(isinstance(citation, str) and bool(citation.strip()), f"rule {index}: citation must be non-empty")

        key = (output_kind.value, frozenset(when))
        if key in seen:
            raise DuplicateRule(
                f"two rules for output kind {output_kind.value!r} share the condition set {sorted(when)}"
            )
        seen.add(key)
        rules.append(PackRule(output_kind, frozenset(when), verdict, tuple(conditions), citation))

    return PlatformRulePack(platform_id=platform_id, rules=tuple(rules), source=data.get("source", ""))


def bundled_reddit_pack() -> PlatformRulePack:
    """The rule pack shipped for the studied platform."""
    raw = resources.files("petlp.data").joinpath("reddit_rules.json").read_text("utf-8")
    return load_rule_pack(raw)


def rule_pack_schema() -> dict[str, Any]:
    """JSON Schema for rule pack documents (shipped in docs as well)."""
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "PlatformRulePack",
        "type": "object",
        "required": ["platform_id", "rules"],
        "properties": {
            "platform_id": {"type": "string", "minLength": 1},
            "source": {"type": "string"},
            "description": {"type": "string"},
            "rules": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["output_kind", "verdict", "citation"],
                    "additionalProperties": False,
                    "properties": {
                        "output_kind": {"enum": [k.value for k in OutputKind]},
                        "when": {"type": "array", "items": {"type": "string", "minLength": 1}},
                        "verdict": {"enum": [v.value for v in Verdict]},
                        "conditions": {"type": "array", "items": {"type": "string", "minLength": 1}},
                        "citation": {"type": "string", "minLength": 1},
                    },
                },
            },
        },
    }
