// Wizard session state. Server-authoritative by construction: verdicts,
// traces, and DPIA status only ever come from API responses, and every
// mutation waits for the server before the UI may re-render
// (refetch-after-write; no optimistic updates). The only client-side
// walking is structural: following the tree graph with the server's
// recorded answers to find the open question.

import { ApiClient } from "./api";
import type { CaseView, DpiaView, Step, Tree, TreeNode, Verdict, WhatifResponse } from "./types";

export class WizardSession {
  trees: Tree[] = [];
  caseView: CaseView | null = null;
  dpia: DpiaView | null = null;

  constructor(
    readonly client: ApiClient,
    readonly caseId: string,
  ) {}

  async start(preRegistration?: Record<string, unknown>): Promise<void> {
    const { trees } = await this.client.getTrees();
    // Menu follows pipeline-stage order.
    const stageOrder = ["pre_registration", "extract", "transform", "load", "present"];
    this.trees = [...trees].sort(
      (a, b) => stageOrder.indexOf(a.stage) - stageOrder.indexOf(b.stage),
    );
    await this.client.createCase(this.caseId, preRegistration);
    await this.refresh();
  }

  async refresh(): Promise<void> {
    this.caseView = await this.client.getCase(this.caseId);
    this.dpia = await this.client.getDpia(this.caseId);
  }

  tree(treeId: string): Tree {
    const tree = this.trees.find((t) => t.id === treeId);
    if (!tree) throw new Error(`unknown tree: ${treeId}`);
    return tree;
  }

  answersFor(treeId: string): Record<string, string> {
    return this.caseView?.answers[treeId] ?? {};
  }

  verdictFor(treeId: string): Verdict | null {
    return this.caseView?.verdicts[treeId] ?? null;
  }

  /** The open question of a tree, or null when its walk has ended.
   *  Pure graph navigation over server state; no verdict logic. */
  currentNode(treeId: string): TreeNode | null {
    const tree = this.tree(treeId);
    const answers = this.answersFor(treeId);
    const byId = new Map(tree.nodes.map((node) => [node.id, node]));
    let nodeId: string | null = tree.root;
    while (nodeId !== null) {
      const node = byId.get(nodeId);
      if (!node) return null; // malformed structure; caller renders an error
      const chosen = answers[node.id];
      if (chosen === undefined) return node;
      const option = node.options.find((o) => o.value === chosen);
      nodeId = option?.next_node ?? node.next_node;
    }
    return null;
  }

  /** Answered path through a tree, for the question history panel. */
  answeredPath(treeId: string): { node: TreeNode; choice: string }[] {
    const tree = this.tree(treeId);
    const answers = this.answersFor(treeId);
    const byId = new Map(tree.nodes.map((node) => [node.id, node]));
    const path: { node: TreeNode; choice: string }[] = [];
    let nodeId: string | null = tree.root;
    while (nodeId !== null) {
      const node = byId.get(nodeId);
      if (!node) break;
      const chosen = answers[node.id];
      if (chosen === undefined) break;
      path.push({ node, choice: chosen });
      const option = node.options.find((o) => o.value === chosen);
      nodeId = option?.next_node ?? node.next_node;
    }
    return path;
  }

  async answer(nodeId: string, choice: string): Promise<Step> {
    const step = await this.client.answer(this.caseId, nodeId, choice);
    await this.refresh(); // badges and history must reflect server state
    return step;
  }

  async whatif(nodeId: string, alternative: string): Promise<WhatifResponse> {
    // Deliberately no refresh: the endpoint must not change server state,
    // and the isolation test compares raw case bytes around this call.
    return this.client.whatif(this.caseId, nodeId, alternative);
  }
}
