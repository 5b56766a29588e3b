"""The rules manifest is the single source of citations; nothing may fire a
rule it does not know."""
import re
from pathlib import Path

from petlp.policy.trace import RULE_REGISTRY

SRC = Path(__file__).parent.parent / "src" / "petlp"
FIRE_CALL = re.compile(r"""(?:trace\.)?fire\(\s*['"]([a-z0-9_.]+)['"]""")
GETATTR_DEFAULT = re.compile(r"""getattr\(exc,\s*['"]rule_id['"],\s*['"]([a-z0-9_.]+)['"]\)""")
RULE_ID_ATTR = re.compile(r"""rule_id\s*=\s*['"]([a-z0-9_.]+)['"]""")


def _rule_ids_in_source() -> set[str]:
    found: set[str] = set()
    for path in SRC.rglob("*.py"):
        text = path.read_text(encoding="utf-8")
        for pattern in (FIRE_CALL, GETATTR_DEFAULT, RULE_ID_ATTR):
            found.update(pattern.findall(text))
    return found


def test_every_fired_rule_id_is_registered():
    fired = _rule_ids_in_source()
    assert fired, "no rule ids found in source; the scan pattern broke"
    unregistered = fired - set(RULE_REGISTRY)
    assert not unregistered, f"rule ids missing from the manifest: {sorted(unregistered)}"


def test_every_registry_entry_has_citation_and_summary():
    for rule_id, entry in RULE_REGISTRY.items():
        assert entry["citation"].strip(), rule_id
        assert entry["summary"].strip(), rule_id


def test_registry_ids_are_namespaced():
    for rule_id in RULE_REGISTRY:
        prefix = rule_id.split(".", 1)[0]
        assert prefix in {"qual", "dpia", "basis", "lia", "tdm", "transfer", "dist"}, rule_id
