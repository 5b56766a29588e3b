"""Crawler-exclusion parsing, reservation detection, and window planning."""

from .reservation import (
    ReservationBasis,
    ReservationStatus,
    detect_llms_txt,
    resolve_reservation,
    tdm_reservation,
    tos_reservation,
)
from .robots import (
    RobotGroup,
    RobotRule,
    RobotsPolicy,
    is_allowed,
    parse_robots,
    retrieve_policy,
    serialize_robots,
)
from .window import ExtractionWindowReport, plan_window, subtract_months

__all__ = [
    "ReservationBasis",
    "ReservationStatus",
    "detect_llms_txt",
    "resolve_reservation",
    "tdm_reservation",
    "tos_reservation",
    "RobotGroup",
    "RobotRule",
    "RobotsPolicy",
    "is_allowed",
    "parse_robots",
    "retrieve_policy",
    "serialize_robots",
    "ExtractionWindowReport",
    "plan_window",
    "subtract_months",
]
