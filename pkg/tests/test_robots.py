"""Crawler-exclusion semantics checked against an independent oracle.

The oracle re-derives longest-match / allow-on-tie behaviour from the raw
file text with its own parser, so fixture disagreements point at real
semantic bugs rather than shared assumptions.
"""
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from petlp.optout.robots import is_allowed, parse_robots, serialize_robots

FIXTURE_DIR = Path(__file__).parent / "fixtures" / "robots"
FIXTURES = sorted(FIXTURE_DIR.glob("*.txt"))

PROBE_AGENTS = ["FooBot", "BarBot", "LonelyBot", "research-crawler", "foobot"]
PROBE_PATHS = [
    "/",
    "/a",
    "/a/b",
    "/a/b/c",
    "/a/b/cd",
    "/data",
    "/data/x",
    "/Data/x",
    "/private",
    "/private/x",
    "/public",
    "/public/info",
    "/publication",
    "/shared/doc",
    "/search?q=test",
    "/search",
    "/data%2Fx",
    "/tmp/file",
    "/crlf/fine",
    "/crlf/other",
    "/x",
    "/x/ok",
    "/w",
    "/case/file",
    "/real",
    "/orphan",
    "/blocked",
    "/mixed/y",
    "/all",
    "/secret/z",
]


def oracle_allowed(text: str, agent: str, path: str) -> bool:
    """Hand-built longest-match evaluator working from the raw text."""
    groups: list[tuple[list[str], list[tuple[str, str]]]] = []
    agents: list[str] = []
    rules: list[tuple[str, str]] = []
    collecting = False
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line or ":" not in line:
            continue
        key, value = line.split(":", 1)
        key, value = key.strip().lower(), value.strip()
        if key == "user-agent":
            if not collecting:
                if agents:
                    groups.append((agents, rules))
                agents, rules = [], []
            collecting = True
            if value:
                agents.append(value)
        elif key in ("allow", "disallow"):
            collecting = False
            if agents:
                rules.append((key, value))
    if agents:
        groups.append((agents, rules))

    exact = [g for g in groups if any(a.lower() == agent.lower() and a != "*" for a in g[0])]
    chosen = exact if exact else [g for g in groups if "*" in g[0]]
    best: tuple[int, int] | None = None  # (prefix length, 1 for allow)
    for _, group_rules in chosen:
        for kind, prefix in group_rules:
            if kind == "disallow" and prefix == "":
                continue
            if path.startswith(prefix):
                candidate = (len(prefix), 1 if kind == "allow" else 0)
                if best is None or candidate > best:
                    best = candidate
    return True if best is None else best[1] == 1


def test_fixture_corpus_is_large_enough():
    assert len(FIXTURES) >= 20


@pytest.mark.parametrize("fixture", FIXTURES, ids=lambda p: p.stem)
def test_is_allowed_matches_oracle_on_every_probe(fixture):
    text = fixture.read_text(encoding="utf-8")
    policy = parse_robots(text)
    for agent in PROBE_AGENTS:
        for path in PROBE_PATHS:
            assert is_allowed(policy, agent, path) == oracle_allowed(text, agent, path), (
                fixture.name,
                agent,
                path,
            )


def test_wildcard_disallow_all_blocks_everything():
    policy = parse_robots("User-agent: *\nDisallow: /")
    assert len(policy.groups) == 1
    assert policy.groups[0].agents == ("*",)
    for path in PROBE_PATHS:
        assert not is_allowed(policy, "anybot", path)


def test_empty_file_permits_everything():
    policy = parse_robots("")
    assert policy.groups == ()
    assert is_allowed(policy, "anybot", "/anything")


def test_empty_disallow_blocks_nothing():
    policy = parse_robots("User-agent: *\nDisallow:")
    assert is_allowed(policy, "anybot", "/deep/path")


def test_longest_match_allows_carveout():
    policy = parse_robots("User-agent: *\nAllow: /data\nDisallow: /")
    assert is_allowed(policy, "bot", "/data/x")
    assert not is_allowed(policy, "bot", "/other")


def test_exact_agent_group_shadows_wildcard():
    policy = parse_robots("User-agent: FooBot\nDisallow: /private\n\nUser-agent: *\nDisallow: /")
    assert is_allowed(policy, "FooBot", "/open")
    assert not is_allowed(policy, "FooBot", "/private/x")
    assert not is_allowed(policy, "OtherBot", "/open")


def test_malformed_lines_reported_not_fatal():
    policy = parse_robots("Disallow: /orphan\nUser-agent: *\nnonsense line\nDisallow: /real")
    assert policy.diagnostics
    assert not is_allowed(policy, "bot", "/real")
    assert is_allowed(policy, "bot", "/orphan")


def test_path_must_be_absolute():
    policy = parse_robots("User-agent: *\nDisallow: /")
    with pytest.raises(ValueError):
        is_allowed(policy, "bot", "relative/path")


@pytest.mark.parametrize("fixture", FIXTURES, ids=lambda p: p.stem)
def test_serialise_reparse_round_trip(fixture):
    policy = parse_robots(fixture.read_text(encoding="utf-8"))
    reparsed = parse_robots(serialize_robots(policy))
    assert reparsed.groups == policy.groups


_prefixes = st.text(alphabet="ab/", min_size=1, max_size=6).map(lambda s: "/" + s.lstrip("/"))
_rules = st.lists(st.tuples(st.sampled_from(["allow", "disallow"]), _prefixes), max_size=8)


@given(rules=_rules, extra=_prefixes, path=_prefixes)
def test_adding_a_disallow_never_unblocks(rules, extra, path):
    def build(rule_list):
        lines = ["User-agent: *"] + [f"{kind.capitalize()}: {prefix}" for kind, prefix in rule_list]
        return parse_robots("\n".join(lines))

    before = is_allowed(build(rules), "bot", path)
    after = is_allowed(build(rules + [("disallow", extra)]), "bot", path)
    if not before:
        assert not after
