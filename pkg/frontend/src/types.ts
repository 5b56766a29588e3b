// Payload shapes of the pipeline API. The wizard renders these verbatim;
// verdicts and traces are never computed client-side.

export interface TreeOption {
  value: string;
  label: string;
  next_node: string | null;
}

export interface TreeNode {
  id: string;
  question: string;
  citation: string;
  options: TreeOption[];
  next_node: string | null;
}

export interface Tree {
  id: string;
  title: string;
  stage: string;
  root: string;
  nodes: TreeNode[];
}

export interface TraceEntry {
  rule_id: string;
  citation: string;
  inputs_digest: string;
  conclusion: string;
}

export interface Verdict {
  tree_id: string;
  verdict: string;
  summary: string;
  decision: { trace?: { entries: TraceEntry[] } } | null;
  trace_rule_ids: string[];
}

export interface Step {
  kind: "ask" | "verdict";
  node: TreeNode | null;
  verdict: Verdict | null;
  path: string[];
}

export interface AnswerResponse extends Step {
  tree_id: string;
}

export interface WhatifResponse {
  tree_id: string;
  actual: Verdict | null;
  hypothetical: Step;
  changed: boolean;
}

export interface DpiaView {
  exists: boolean;
  case_id: string;
  stage_status: Record<string, string>;
  versions: unknown[];
}

export interface CaseView {
  case_id: string;
  answers: Record<string, Record<string, string>>;
  verdicts: Record<string, Verdict>;
  [key: string]: unknown;
}

export function isTree(value: unknown): value is Tree {
  if (typeof value !== "object" || value === null) return false;
  const tree = value as Partial<Tree>;
  return (
    typeof tree.id === "string" &&
    typeof tree.root === "string" &&
    Array.isArray(tree.nodes) &&
    tree.nodes.every(
      (node) =>
        typeof node === "object" &&
        node !== null &&
        typeof (node as TreeNode).id === "string" &&
        typeof (node as TreeNode).question === "string" &&
        Array.isArray((node as TreeNode).options),
    )
  );
}
