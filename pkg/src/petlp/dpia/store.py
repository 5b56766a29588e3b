"""Line-delimited JSON persistence for impact-assessment documents.

One append-only record file per case; each line is one event. Loading
replays the file, so a stored document and its in-memory twin can never
diverge. Single writer per case; readers work on immutable snapshots.
"""
from __future__ import annotations

import json
import re
from datetime import datetime
from pathlib import Path
from typing import Any, Optional

from ..errors import AlreadyExists
from .ledger import DpiaDocument, StageEntry, StageId, init_dpia, record_update, reopen_on_change

_CASE_ID = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


class DpiaStore:
    def __init__(self, root: Path | str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def path_for(self, case_id: str) -> Path:
        if not _CASE_ID.match(case_id):
            raise ValueError(f"case id {case_id!r} is not filesystem safe")
        return self.root / f"{case_id}.dpia.jsonl"

    def exists(self, case_id: str) -> bool:
        return self.path_for(case_id).exists()

    def create(
        self,
        case_id: str,
        pre_registration_fields: dict[str, Any],
        author: str = "",
        at: Optional[datetime] = None,
    ) -> DpiaDocument:
        path = self.path_for(case_id)
        if path.exists():
            raise AlreadyExists(f"a document for case {case_id!r} already exists")
        doc = init_dpia(case_id, pre_registration_fields, author=author, at=at)
        self._append(path, doc.versions)
        return doc

    def load(self, case_id: str) -> DpiaDocument:
        path = self.path_for(case_id)
        if not path.exists():
            raise FileNotFoundError(f"no document for case {case_id!r}")
        entries = []
        with path.open("r", encoding="utf-8") as handle:
            for line in handle:
                if line.strip():
                    entries.append(StageEntry.from_dict(json.loads(line)))
        return DpiaDocument(case_id=case_id, versions=tuple(entries))

    def record_update(
        self,
        case_id: str,
        stage: StageId,
        fields: dict[str, Any],
        author: str = "",
        at: Optional[datetime] = None,
    ) -> DpiaDocument:
        doc = self.load(case_id)
        updated = record_update(doc, stage, fields, author=author, at=at)
        self._append(self.path_for(case_id), updated.versions[len(doc.versions):])
        return updated

    def reopen(
        self,
        case_id: str,
        change_description: str,
        earliest_affected_stage: StageId,
        author: str = "",
        at: Optional[datetime] = None,
    ) -> DpiaDocument:
        doc = self.load(case_id)
        updated = reopen_on_change(doc, change_description, earliest_affected_stage, author=author, at=at)
        self._append(self.path_for(case_id), updated.versions[len(doc.versions):])
        return updated

    @staticmethod
    def _append(path: Path, entries: tuple[StageEntry, ...]) -> None:
        with path.open("a", encoding="utf-8") as handle:
            for entry in entries:
                handle.write(json.dumps(entry.to_dict(), sort_keys=True) + "\n")
