// DOM rendering. Pure functions from server payloads to elements; nothing
// here decides an outcome. Citations render as expandable footnotes so the
// wizard explains itself instead of merely announcing verdicts.

import type { DpiaView, Step, TreeNode, Verdict, WhatifResponse } from "./types";

type Child = Node | string;

export function el(tag: string, attrs: Record<string, string> = {}, children: Child[] = []): HTMLElement {
  const element = document.createElement(tag);
  for (const [name, value] of Object.entries(attrs)) {
    element.setAttribute(name, value);
  }
  for (const child of children) {
    element.append(child);
  }
  return element;
}

export function renderErrorBanner(message: string): HTMLElement {
  return el("div", { class: "error-banner", role: "alert" }, [message]);
}

export function renderCitation(citation: string): HTMLElement {
  return el("details", { class: "citation" }, [
    el("summary", {}, ["Why this question?"]),
    el("p", {}, [citation]),
  ]);
}

export function renderNodeCard(
  node: TreeNode,
  onChoose: (nodeId: string, choice: string) => void,
): HTMLElement {
  const options = el("div", { class: "options" });
  for (const option of node.options) {
    const button = el(
      "button",
      { class: "option", "data-node": node.id, "data-choice": option.value },
      [option.label],
    ) as HTMLButtonElement;
    button.addEventListener("click", () => onChoose(node.id, option.value));
    options.append(button);
  }
  return el("section", { class: "node-card current", "data-node-id": node.id }, [
    el("h3", {}, [node.question]),
    options,
    renderCitation(node.citation),
  ]);
}

export function renderTrace(verdict: Verdict): HTMLElement {
  const entries = verdict.decision?.trace?.entries ?? [];
  const list = el("ol", { class: "trace" });
  for (const entry of entries) {
    list.append(
      el("li", { class: "trace-entry", "data-rule-id": entry.rule_id }, [
        el("code", { class: "rule-id" }, [entry.rule_id]),
        el("span", { class: "conclusion" }, [` ${entry.conclusion} `]),
        el("cite", { class: "trace-citation" }, [entry.citation]),
      ]),
    );
  }
  return list;
}

export function renderVerdictCard(verdict: Verdict): HTMLElement {
  return el("section", { class: "verdict-card", "data-verdict": verdict.verdict }, [
    el("h3", {}, [el("span", { class: "verdict-chip" }, [verdict.verdict])]),
    el("p", { class: "verdict-summary" }, [verdict.summary]),
    renderTrace(verdict),
  ]);
}

export function renderStep(step: Step, onChoose: (nodeId: string, choice: string) => void): HTMLElement {
  if (step.kind === "verdict" && step.verdict) {
    return renderVerdictCard(step.verdict);
  }
  if (step.kind === "ask" && step.node) {
    return renderNodeCard(step.node, onChoose);
  }
  return renderErrorBanner("The server returned a step the wizard cannot display.");
}

export function renderPathHistory(path: { node: TreeNode; choice: string }[]): HTMLElement {
  const list = el("ol", { class: "path-history" });
  for (const { node, choice } of path) {
    const label = node.options.find((o) => o.value === choice)?.label ?? choice;
    list.append(
      el("li", { "data-node-id": node.id }, [
        el("span", { class: "asked" }, [node.question]),
        el("strong", { class: "chosen" }, [` ${label}`]),
      ]),
    );
  }
  return list;
}

const BADGE_STATES = ["missing", "complete", "stale"];

export function renderDpiaBadges(view: DpiaView): HTMLElement {
  const board = el("div", { class: "dpia-board" });
  for (const [stage, state] of Object.entries(view.stage_status)) {
    const safe = BADGE_STATES.includes(state) ? state : "missing";
    board.append(
      el("span", { class: `badge badge-${safe}`, "data-stage": stage, "data-state": safe }, [
        `${stage.replace(/_/g, " ")}: ${safe}`,
      ]),
    );
  }
  return board;
}

function verdictPane(title: string, verdict: Verdict | null, incompleteNode?: TreeNode | null): HTMLElement {
  const pane = el("div", { class: "whatif-pane" }, [el("h4", {}, [title])]);
  if (verdict) {
    pane.append(renderVerdictCard(verdict));
  } else if (incompleteNode) {
    pane.append(
      el("p", { class: "whatif-incomplete" }, [
        `Needs more answers (next: ${incompleteNode.question})`,
      ]),
    );
  } else {
    pane.append(el("p", { class: "whatif-empty" }, ["No verdict recorded yet."]));
  }
  return pane;
}

export function renderWhatifComparison(response: WhatifResponse): HTMLElement {
  const hypoVerdict = response.hypothetical.kind === "verdict" ? response.hypothetical.verdict : null;
  const hypoNode = response.hypothetical.kind === "ask" ? response.hypothetical.node : null;
  const wrapper = el("section", { class: "whatif", "data-changed": String(response.changed) }, [
    el("h3", {}, ["What if?"]),
    el("div", { class: "whatif-panes" }, [
      verdictPane("Recorded", response.actual),
      verdictPane("Hypothetical", hypoVerdict ?? null, hypoNode),
    ]),
  ]);
  wrapper.append(
    response.changed
      ? el("p", { class: "whatif-flag changed" }, ["Outcome changes"])
      : el("p", { class: "whatif-flag no-change" }, ["No change"]),
  );
  return wrapper;
}
