import pytest

from petlp.policy.types import (
    EntityKind,
    OutputKind,
    ProcessingContext,
    ProfitHandling,
    Purpose,
    ResearcherProfile,
    SubjectScale,
)


@pytest.fixture
def university_profile() -> ResearcherProfile:
    return ResearcherProfile(
        entity_kind=EntityKind.UNIVERSITY,
        primary_goal_research=True,
        profit_handling=ProfitHandling.NOT_FOR_PROFIT,
        public_interest_mission=True,
        decisive_commercial_influence=False,
        preferential_commercial_access=False,
        purpose=Purpose.SCIENTIFIC_RESEARCH,
    )


@pytest.fixture
def commercial_profile() -> ResearcherProfile:
    return ResearcherProfile(
        entity_kind=EntityKind.COMMERCIAL,
        primary_goal_research=False,
        profit_handling=ProfitHandling.FOR_PROFIT,
        public_interest_mission=False,
        decisive_commercial_influence=False,
        preferential_commercial_access=False,
        purpose=Purpose.COMMERCIAL,
    )


@pytest.fixture
def reddit_context() -> ProcessingContext:
    return ProcessingContext(
        platform_id="reddit",
        data_publicly_accessible=True,
        special_category_possible=True,
        subject_count_scale=SubjectScale.LARGE,
        vulnerable_subjects=False,
        combines_datasets=False,
        innovative_technology=True,
        profiling_of_public_social_media=False,
        intended_outputs=frozenset({OutputKind.AGGREGATE_STATS, OutputKind.MODEL_WEIGHTS}),
        cross_border=(("DE", "DE"),),
    )
