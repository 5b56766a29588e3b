// Wires the session to the page: stage-ordered tree menu, one tree visible
// at a time, the question/verdict column, path history, the live ledger
// board, and the what-if panel.

import { ApiClient, ApiError } from "./api";
import {
  el,
  renderDpiaBadges,
  renderErrorBanner,
  renderNodeCard,
  renderPathHistory,
  renderVerdictCard,
  renderWhatifComparison,
} from "./render";
import { WizardSession } from "./session";
import { isTree } from "./types";

export class WizardApp {
  readonly session: WizardSession;
  activeTreeId: string | null = null;

  constructor(
    readonly root: HTMLElement,
    client: ApiClient,
    caseId: string,
  ) {
    this.session = new WizardSession(client, caseId);
  }

  async boot(preRegistration?: Record<string, unknown>): Promise<void> {
    try {
      await this.session.start(preRegistration);
    } catch (error) {
      this.root.replaceChildren(renderErrorBanner(this.describe(error)));
      return;
    }
    if (!this.session.trees.every((tree) => isTree(tree))) {
      // Malformed structure: show the banner and render nothing else.
      this.root.replaceChildren(renderErrorBanner("The server returned a malformed decision tree."));
      return;
    }
    this.activeTreeId = this.session.trees[0]?.id ?? null;
    this.render();
  }

  describe(error: unknown): string {
    if (error instanceof ApiError) return `${error.code}: ${error.message}`;
    return error instanceof Error ? error.message : String(error);
  }

  async choose(nodeId: string, choice: string): Promise<void> {
    try {
      await this.session.answer(nodeId, choice);
    } catch (error) {
      this.render(this.describe(error));
      return;
    }
    this.render();
  }

  async runWhatif(nodeId: string, alternative: string): Promise<void> {
    let comparison;
    try {
      comparison = await this.session.whatif(nodeId, alternative);
    } catch (error) {
      this.render(this.describe(error));
      return;
    }
    this.render();
    this.root.querySelector(".whatif-slot")?.replaceChildren(renderWhatifComparison(comparison));
  }

  render(inlineError?: string): void {
    const treeId = this.activeTreeId;
    const menu = el("nav", { class: "tree-menu" });
    for (const tree of this.session.trees) {
      const button = el(
        "button",
        {
          class: tree.id === treeId ? "tree-tab active" : "tree-tab",
          "data-tree-id": tree.id,
        },
        [`${tree.stage}: ${tree.title}`],
      );
      button.addEventListener("click", () => {
        this.activeTreeId = tree.id;
        this.render();
      });
      menu.append(button);
    }

    const column = el("main", { class: "tree-column" });
    if (inlineError) {
      column.append(renderErrorBanner(inlineError));
    }
    if (treeId) {
      const verdict = this.session.verdictFor(treeId);
      const current = this.session.currentNode(treeId);
      column.append(renderPathHistory(this.session.answeredPath(treeId)));
      if (verdict) {
        column.append(renderVerdictCard(verdict));
        column.append(this.whatifControls(treeId));
      } else if (current) {
        column.append(renderNodeCard(current, (node, choice) => void this.choose(node, choice)));
      }
    }

    const ledger = el("aside", { class: "ledger" }, [el("h3", {}, ["Impact assessment"])]);
    if (this.session.dpia) {
      ledger.append(renderDpiaBadges(this.session.dpia));
    }

    this.root.replaceChildren(
      el("header", {}, [el("h1", {}, ["Research compliance wizard"])]),
      menu,
      el("div", { class: "layout" }, [column, ledger]),
      el("div", { class: "whatif-slot" }),
    );
  }

  whatifControls(treeId: string): HTMLElement {
    const controls = el("section", { class: "whatif-controls" }, [
      el("h4", {}, ["Try a different answer"]),
    ]);
    for (const { node, choice } of this.session.answeredPath(treeId)) {
      for (const option of node.options) {
        if (option.value === choice) continue;
        const button = el(
          "button",
          { class: "whatif-option", "data-node": node.id, "data-alternative": option.value },
          [`${node.question} -> ${option.label}`],
        );
        button.addEventListener("click", () => void this.runWhatif(node.id, option.value));
        controls.append(button);
      }
    }
    return controls;
  }
}
