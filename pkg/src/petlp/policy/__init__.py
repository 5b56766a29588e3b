"""Citation-traced legal decision engine."""

from .engine import (
    ADEQUACY_REGIONS,
    EEA_REGIONS,
    assess_dpia_requirement,
    assess_transfer,
    check_distribution,
    evaluate_tdm,
    qualify_research_organisation,
    run_lia,
    select_legal_basis,
)
from .rulepacks import bundled_reddit_pack, load_rule_pack, rule_pack_schema
from .trace import RULE_REGISTRY, DecisionTrace, TraceBuilder, TraceEntry, inputs_digest
from .trees import (
    ALL_TREES,
    DecisionTree,
    EndpointVerdict,
    Step,
    TreeNode,
    TreeOption,
    advance,
    answer,
    get_tree,
    surrogate_tdm,
    tree_for_node,
    whatif,
)
from .types import (
    Art9Condition,
    BalancingFactor,
    DistributionDecision,
    DpiaRequirement,
    DpiaStatus,
    EntityKind,
    LegalBasis,
    LegalBasisDecision,
    LiaInputs,
    LiaLimb,
    LiaOutcome,
    OutputKind,
    PackRule,
    PlatformRulePack,
    ProcessingContext,
    ProfitHandling,
    Purpose,
    QualificationResult,
    ResearcherProfile,
    RetentionAllowance,
    SubjectScale,
    TdmDecision,
    TdmException,
    TransferAssessment,
    TransferFlags,
    TransferInstrument,
    TransferMechanism,
    Verdict,
    WP29_CRITERIA,
    Wp29CriteriaSet,
)
