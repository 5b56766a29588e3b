"""Crawler-exclusion file parsing and rule evaluation.

Semantics are fixed to the prevailing convention because the legal
reservation finding depends on them: within the selected group the longest
matching path prefix wins, and a tie between allow and disallow of equal
length resolves to allow. Group selection prefers an exact agent token
match over the wildcard. An empty-path Disallow blocks nothing.
"""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class RobotRule:
    kind: str  # "allow" | "disallow"
    path_prefix: str

    def to_dict(self) -> dict[str, str]:
        return {"kind": self.kind, "path_prefix": self.path_prefix}


@dataclass(frozen=True)
class RobotGroup:
    agents: tuple[str, ...]
    rules: tuple[RobotRule, ...]

    def __post_init__(self) -> None:
        if not self.agents:
            raise ValueError("a group must name at least one agent token")

    def to_dict(self) -> dict:
        return {"agents": list(self.agents), "rules": [r.to_dict() for r in self.rules]}


@dataclass(frozen=True)
class RobotsPolicy:
    groups: tuple[RobotGroup, ...]
    diagnostics: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {"groups": [g.to_dict() for g in self.groups], "diagnostics": list(self.diagnostics)}


def retrieve_policy(fetcher, timeout_s: float = 10.0) -> RobotsPolicy:
    """Parse a policy obtained through a caller-supplied retrieval callback.

    No HTTP client is built in; ``fetcher(timeout_s)`` must return the file
    body (str or bytes) within the budget it was handed. Bytes are decoded
    as UTF-8 with invalid sequences replaced.
    """
    raw = fetcher(timeout_s)
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8", errors="replace")
    return parse_robots(raw)


def parse_robots(text: str) -> RobotsPolicy:
    """Parse crawler-exclusion text into grouped rules.

    Line oriented; comments start at ``#``. Consecutive ``User-agent``
    lines open one group that owns the rules that follow. Unknown
    directives are ignored; malformed lines are skipped and reported in
    the policy's diagnostics.
    """
    groups: list[RobotGroup] = []
    diagnostics: list[str] = []
    agents: list[str] = []
    rules: list[RobotRule] = []
    collecting_agents = False

    def close_group() -> None:
        nonlocal agents, rules
        if agents:
            groups.append(RobotGroup(tuple(agents), tuple(rules)))
        agents, rules = [], []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            diagnostics.append(f"line {lineno}: no directive separator, skipped")
            continue
        key, _, value = line.partition(":")
        key = key.strip().lower()
        value = value.strip()

        if key == "user-agent":
            if not collecting_agents:
                close_group()
                collecting_agents = True
            if value:
                agents.append(value)
            else:
                diagnostics.append(f"line {lineno}: empty user-agent token, skipped")
        elif key in ("allow", "disallow"):
            collecting_agents = False
            if not agents:
                diagnostics.append(f"line {lineno}: rule before any user-agent line, skipped")
                continue
            rules.append(RobotRule(key, value))
        else:
            # Sitemap, crawl-delay and other extensions are out of scope.
            collecting_agents = False

    close_group()
    return RobotsPolicy(tuple(groups), tuple(diagnostics))


def serialize_robots(policy: RobotsPolicy) -> str:
    """Render a policy back to crawler-exclusion text (round-trip safe)."""
    lines: list[str] = []
    for group in policy.groups:
        for agent in group.agents:
            lines.append(f"User-agent: {agent}")
        for rule in group.rules:
            lines.append(f"{rule.kind.capitalize()}: {rule.path_prefix}")
        lines.append("")
    return "\n".join(lines)


def _matching_groups(policy: RobotsPolicy, agent: str) -> list[RobotGroup]:
    wanted = agent.strip().lower()
    exact = [g for g in policy.groups if any(a.lower() == wanted and a != "*" for a in g.agents)]
    if exact:
        return exact
    return [g for g in policy.groups if "*" in g.agents]


def is_allowed(policy: RobotsPolicy, agent: str, path: str) -> bool:
    """Whether ``agent`` may fetch ``path`` under this policy.

    Total and deterministic: no applicable group, or no matching rule,
    means allowed.
    """
    if not path.startswith("/"):
        raise ValueError("path must begin with '/'")

    groups = _matching_groups(policy, agent)
    if not groups:
        return True

    best_len = -1
    best_allowed = True
    for group in groups:
        for rule in group.rules:
            prefix = rule.path_prefix
            if rule.kind == "disallow" and prefix == "":
                continue  # empty disallow blocks nothing
            if not path.startswith(prefix):
                continue
            length = len(prefix)
            if length > best_len:
                best_len = length
                best_allowed = rule.kind == "allow"
            elif length == best_len and rule.kind == "allow":
                best_allowed = True
    return best_allowed if best_len >= 0 else True
