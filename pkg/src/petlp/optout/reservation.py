"""Machine-readable reservation findings for the general TDM exception.

A rightholder excludes the general exception by reserving use through
machine-readable means. A blanket robots disallow over the mined scope is
such a reservation. Terms-of-service text only counts when the operator
explicitly decides to treat natural language as machine readable (an open
legal question, default no). An llms.txt file is advisory and never
reserves on its own.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from .robots import RobotsPolicy, is_allowed


class ReservationBasis(str, Enum):
    ROBOTS_DISALLOW = "robots_disallow"
    TOS_FLAG = "tos_flag"
    LLMS_TXT_ADVISORY = "llms_txt_advisory"
    NONE = "none"


# Stronger bases dominate when statuses are combined.
_PRECEDENCE = {
    ReservationBasis.ROBOTS_DISALLOW: 3,
    ReservationBasis.TOS_FLAG: 2,
    ReservationBasis.LLMS_TXT_ADVISORY: 1,
    ReservationBasis.NONE: 0,
}


@dataclass(frozen=True)
class ReservationStatus:
    reserved: bool
    basis: ReservationBasis
    detail: str = ""

    def __post_init__(self) -> None:
        if self.basis is ReservationBasis.LLMS_TXT_ADVISORY and self.reserved:
            raise ValueError("an llms.txt signal is advisory and cannot reserve on its own")

    def to_dict(self) -> dict:
        return {"reserved": self.reserved, "basis": self.basis.value, "detail": self.detail}

    @classmethod
    def none(cls) -> "ReservationStatus":
        return cls(False, ReservationBasis.NONE, "no reservation signal")


def tdm_reservation(policy: RobotsPolicy, agent: str, scope_paths: Iterable[str]) -> ReservationStatus:
    """Reservation holds only when every path in the mined scope is disallowed.

    A reservation concerns the mined content itself, so blocking unrelated
    paths is not enough; a partial block is reported in the detail but
    does not reserve.
    """
    paths = list(scope_paths)
    if not paths:
        raise ValueError("scope_paths must be non-empty")

    blocked = [p for p in paths if not is_allowed(policy, agent, p)]
    if len(blocked) == len(paths):
        return ReservationStatus(
            True,
            ReservationBasis.ROBOTS_DISALLOW,
            f"all {len(paths)} scope paths disallowed for agent {agent!r}",
        )
    if blocked:
        return ReservationStatus(
            False,
            ReservationBasis.NONE,
            f"{len(blocked)}/{len(paths)} scope paths disallowed ({', '.join(sorted(blocked))}); "
            "scope not fully reserved",
        )
    return ReservationStatus(False, ReservationBasis.NONE, "no scope path disallowed")


def detect_llms_txt(present: bool, text: Optional[str] = None) -> ReservationStatus:
    """Advisory-only signal; never reserves by itself."""
    if not present:
        return ReservationStatus(False, ReservationBasis.NONE, "no llms.txt published")
    detail = "llms.txt present; advisory signal only"
    if text and text.strip():
        detail += f" ({len(text.strip().splitlines())} lines)"
    return ReservationStatus(False, ReservationBasis.LLMS_TXT_ADVISORY, detail)


def tos_reservation(flagged: bool, natural_language_counts: bool = False) -> ReservationStatus:
    """Operator-supplied terms-of-service reservation signal.

    Whether prose terms qualify as machine readable is unsettled; it is
    therefore a deliberate operator decision, never inferred, and defaults
    to not counting.
    """
    if not flagged:
        return ReservationStatus(False, ReservationBasis.NONE, "no terms-of-service reservation flagged")
    if natural_language_counts:
        return ReservationStatus(
            True, ReservationBasis.TOS_FLAG, "terms flagged and operator treats prose terms as machine readable"
        )
    return ReservationStatus(
        False, ReservationBasis.TOS_FLAG, "terms flagged but prose terms are not treated as machine readable"
    )


def resolve_reservation(*statuses: ReservationStatus) -> ReservationStatus:
    """Combine signals: any reserving status wins; otherwise the strongest basis."""
    if not statuses:
        return ReservationStatus.none()
    reserving = [s for s in statuses if s.reserved]
    pool = reserving or list(statuses)
    return max(pool, key=lambda s: _PRECEDENCE[s.basis])
