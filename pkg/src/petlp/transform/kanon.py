"""k-anonymity audit over exact quasi-identifier classes.

This is an audit, not an anonymiser: it reports how small the smallest
equivalence class is so the release decision can be made with eyes open.
No generalisation lattice search is attempted.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from ..errors import UnknownField

Record = dict[str, Any]


@dataclass(frozen=True)
class KAnonymityReport:
    k_min: int
    class_count: int
    violating_classes: tuple[tuple[tuple, int], ...]
    threshold: int

    def to_dict(self) -> dict:
        return {
            "k_min": self.k_min,
            "class_count": self.class_count,
            "violating_classes": [[list(qi), size] for qi, size in self.violating_classes],
            "threshold": self.threshold,
        }


def k_anonymity(records: Iterable[Record], quasi_identifiers: Sequence[str], threshold: int = 2) -> KAnonymityReport:
    """Group rows by their exact QI tuple and report the smallest class.

    k_min is 0 only for empty input. Classes smaller than ``threshold``
    are listed, sorted for stable output.
    """
    qis = list(quasi_identifiers)
    if not qis:
        raise ValueError("quasi_identifiers must be non-empty")

    classes: Counter[tuple] = Counter()
    for index, record in enumerate(records):
        for name in qis:
            if name not in record:
                raise UnknownField(f"record {index} lacks quasi-identifier {name!r}")
        classes[tuple(record[name] for name in qis)] += 1

    if not classes:
        return KAnonymityReport(k_min=0, class_count=0, violating_classes=(), threshold=threshold)

    violating = tuple(
        sorted(((qi, size) for qi, size in classes.items() if size < threshold), key=lambda item: repr(item[0]))
    )
    return KAnonymityReport(
        k_min=min(classes.values()),
        class_count=len(classes),
        violating_classes=violating,
        threshold=threshold,
    )
