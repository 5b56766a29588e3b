import json

import pytest

from petlp.errors import DuplicateRule, SchemaViolation
from petlp.policy.rulepacks import bundled_reddit_pack, load_rule_pack, rule_pack_schema
from petlp.policy.types import OutputKind, Verdict


def test_bundled_pack_has_six_rules_including_model_training_prohibition():
    pack = bundled_reddit_pack()
    assert pack.platform_id == "reddit"
    assert len(pack.rules) == 6
    model_rules = pack.rules_for(OutputKind.MODEL_WEIGHTS)
    assert any(rule.verdict is Verdict.BLOCKED and not rule.when for rule in model_rules)
    assert all(rule.citation for rule in pack.rules)


def test_empty_rules_list_is_a_valid_pack():
    pack = load_rule_pack({"platform_id": "example", "rules": []})
    assert pack.rules == ()


def test_duplicate_rule_rejected():
    doc = {
        "platform_id": "example",
        "rules": [
            {"output_kind": "paper", "when": ["a", "b"], "verdict": "allowed", "citation": "terms s.1"},
            {"output_kind": "paper", "when": ["b", "a"], "verdict": "blocked", "citation": "terms s.2"},
        ],
    }
    with pytest.raises(DuplicateRule):
        load_rule_pack(doc)


@pytest.mark.parametrize(
    "doc",
    [
        "not json at all {{{",
        json.dumps({"rules": []}),
        json.dumps({"platform_id": "", "rules": []}),
        json.dumps({"platform_id": "x", "rules": [{"output_kind": "nope", "verdict": "allowed", "citation": "c"}]}),
        json.dumps({"platform_id": "x", "rules": [{"output_kind": "paper", "verdict": "maybe", "citation": "c"}]}),
        json.dumps({"platform_id": "x", "rules": [{"output_kind": "paper", "verdict": "allowed", "citation": ""}]}),
        json.dumps({"platform_id": "x", "rules": [{"output_kind": "paper", "verdict": "allowed", "citation": "c", "bogus": 1}]}),
    ],
)
def test_schema_violations(doc):
    with pytest.raises(SchemaViolation):
        load_rule_pack(doc)


def test_schema_document_covers_bundled_pack():
    schema = rule_pack_schema()
    assert set(schema["properties"]["rules"]["items"]["properties"]["output_kind"]["enum"]) == {
        k.value for k in OutputKind
    }
