"""Privacy-preserving transformation toolkit."""

from .dp import DpReleaseSpec, dp_release
from .kanon import KAnonymityReport, k_anonymity
from .leakscan import (
    DEFAULT_THRESHOLD_WORDS,
    LeakMatch,
    LeakScanReport,
    normalise_tokens,
    scan_verbatim_leak,
)
from .privacy import (
    AllowlistEntry,
    MinimisationPlan,
    PLACEHOLDER,
    PseudonymisationSpec,
    apply_minimisation,
    generalise_timestamps,
    iso_week_label,
    keyed_digest,
    pseudonymise,
)

__all__ = [
    "DpReleaseSpec",
    "dp_release",
    "KAnonymityReport",
    "k_anonymity",
    "DEFAULT_THRESHOLD_WORDS",
    "LeakMatch",
    "LeakScanReport",
    "normalise_tokens",
    "scan_verbatim_leak",
    "AllowlistEntry",
    "MinimisationPlan",
    "PLACEHOLDER",
    "PseudonymisationSpec",
    "apply_minimisation",
    "generalise_timestamps",
    "iso_week_label",
    "keyed_digest",
    "pseudonymise",
]
