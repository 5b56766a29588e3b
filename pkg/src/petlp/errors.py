"""Exception types raised across the toolkit.

Every error that callers are expected to catch lives here so the CLI and
API can map them to machine-readable codes in one place.
"""


class PetlpError(Exception):
    """Base class for all toolkit errors."""

    code = "petlp_error"


# --- legal decision engine ---------------------------------------------------

class ForbiddenBasis(PetlpError):
    """Requested legal basis is unavailable to this controller."""

    code = "forbidden_basis"


class EmptyInterest(PetlpError):
    """Legitimate interest assessment started without an interest statement."""

    code = "empty_interest"


class UnlawfulAccess(PetlpError):
    """No TDM exception applies when content was not lawfully accessed."""

    code = "unlawful_access"


class NoLawfulRoute(PetlpError):
    """No transfer mechanism covers the requested route."""

    code = "no_lawful_route"


class UnknownOutputKind(PetlpError):
    code = "unknown_output_kind"


class MissingRulePack(PetlpError):
    code = "missing_rule_pack"


class SchemaViolation(PetlpError):
    """Rule pack or scenario document does not match its schema."""

    code = "schema_violation"


class DuplicateRule(PetlpError):
    """Two rule pack entries share (output_kind, condition-set)."""

    code = "duplicate_rule"


# --- DPIA ledger -------------------------------------------------------------

class MissingField(PetlpError):
    """A stage entry omits one of its required fields."""

    code = "missing_field"

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"required field missing: {name}")


class AlreadyExists(PetlpError):
    code = "already_exists"


class OutOfOrderStage(PetlpError):
    """Stage entry appended before the prior stage completed."""

    code = "out_of_order_stage"


# --- opt-out scanner ---------------------------------------------------------

class InvalidRange(PetlpError):
    code = "invalid_range"


# --- transform toolkit -------------------------------------------------------

class UnjustifiedField(PetlpError):
    """Minimisation allowlist entry lacks a justification."""

    code = "unjustified_field"


class MissingSalt(PetlpError):
    code = "missing_salt"


class UnparseableTimestamp(PetlpError):
    code = "unparseable_timestamp"


class UnknownField(PetlpError):
    code = "unknown_field"


class InvalidBudget(PetlpError):
    """Differential privacy parameters must be strictly positive."""

    code = "invalid_budget"


# --- pipeline ----------------------------------------------------------------

class GateBlocked(PetlpError):
    """Stage gate refused to run; blockers enumerate the reasons."""

    code = "gate_blocked"

    def __init__(self, stage: str, blockers: list):
        self.stage = stage
        self.blockers = list(blockers)
        super().__init__(f"gate blocked for stage {stage}: {'; '.join(self.blockers)}")


class ConnectorFailure(PetlpError):
    code = "connector_failure"


class PartialDeletion(PetlpError):
    """Cascade deletion left one or more replicas unconfirmed."""

    code = "partial_deletion"

    def __init__(self, receipt):
        self.receipt = receipt
        unconfirmed = [loc for loc, ok in receipt.confirmations.items() if not ok]
        super().__init__(f"unconfirmed deletions at: {', '.join(sorted(unconfirmed))}")


class GoldenMismatch(PetlpError):
    """Golden scenario run diverged from its expected endpoints."""

    code = "golden_mismatch"

    def __init__(self, diffs):
        self.diffs = list(diffs)
        lines = ", ".join(d["check"] for d in self.diffs)
        super().__init__(f"golden scenario mismatches: {lines}")


class UnknownNode(PetlpError):
    """Questionnaire answer referenced a node that is not current."""

    code = "unknown_node"


class InvalidChoice(PetlpError):
    code = "invalid_choice"
