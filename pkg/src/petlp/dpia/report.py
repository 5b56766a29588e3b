"""Deterministic document exports.

JSON for machines, Markdown for the publishable summary. Identical
documents always render byte-identically: stages in pipeline order,
entries in version order, fields in the order they were recorded.
"""
from __future__ import annotations

import json
from typing import Any

from .ledger import DpiaDocument, STAGE_ORDER, StageState


def export_report(doc: DpiaDocument, format: str = "json") -> str:
    if format == "json":
        return json.dumps(doc.to_dict(), indent=2, sort_keys=True)
    if format == "markdown":
        return _markdown(doc)
    raise ValueError(f"unsupported export format: {format!r}")


def _cell(value: Any) -> str:
    if isinstance(value, str):
        text = value
    else:
        text = json.dumps(value, sort_keys=True, default=str)
    return text.replace("|", "\\|").replace("\n", " ")


def _citations(value: Any) -> list[str]:
    """Pull citation strings out of any embedded decision, wherever nested."""
    found: list[str] = []
    if isinstance(value, dict):
        trace = value.get("trace")
        if isinstance(trace, dict):
            for entry in trace.get("entries", []):
                citation = entry.get("citation", "")
                if citation and citation not in found:
                    found.append(citation)
        for child in value.values():
            for citation in _citations(child):
                if citation not in found:
                    found.append(citation)
    elif isinstance(value, list):
        for child in value:
            for citation in _citations(child):
                if citation not in found:
                    found.append(citation)
    return found


def _markdown(doc: DpiaDocument) -> str:
    lines: list[str] = [f"# Data Protection Impact Assessment: {doc.case_id}", ""]
    lines.append(f"Document version {doc.version} with {len(doc.versions)} recorded events.")
    lines.append("")

    lines.append("## Stage status")
    lines.append("")
    lines.append("| Stage | Status |")
    lines.append("| --- | --- |")
    status = doc.stage_status
    for stage in STAGE_ORDER:
        lines.append(f"| {stage.value} | {status[stage].value} |")
    lines.append("")

    for stage in STAGE_ORDER:
        lines.append(f"## {stage.value.replace('_', ' ').title()}")
        lines.append("")
        entries = doc.entries_for(stage)
        if not entries:
            lines.append("_missing_")
            lines.append("")
            continue
        if status[stage] is StageState.STALE:
            lines.append("**Stale: a recorded change affects this stage; revisit it.**")
            lines.append("")
        for entry in entries:
            author = f", author: {entry.author}" if entry.author else ""
            lines.append(f"### Version {entry.version} ({entry.at}{author})")
            lines.append("")
            lines.append("| Field | Value |")
            lines.append("| --- | --- |")
            citations: list[str] = []
            for name, value in entry.fields.items():
                lines.append(f"| {name} | {_cell(value)} |")
                for citation in _citations(value):
                    if citation not in citations:
                        citations.append(citation)
            lines.append("")
            if citations:
                lines.append("Cited authorities:")
                lines.append("")
                for citation in citations:
                    lines.append(f"- {citation}")
                lines.append("")

    reopens = [e for e in doc.versions if e.type == "reopen"]
    if reopens:
        lines.append("## Change log")
        lines.append("")
        for entry in reopens:
            stage_name = entry.stage.value if entry.stage else "?"
            lines.append(f"- v{entry.version} ({entry.at}): reopened from {stage_name}: {entry.change_description}")
        lines.append("")

    return "\n".join(lines)
