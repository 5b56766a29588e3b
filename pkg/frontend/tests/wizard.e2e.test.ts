// Scripted browser session against the live API. The wizard's endpoint
// verdict and rule-id path must equal the command-line golden run, and a
// what-if flip must leave the server-side case byte-identical.

import { execFile } from "node:child_process";
import { resolve } from "node:path";
import { promisify } from "node:util";
import { beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { WizardApp } from "../src/app";
import { WizardSession } from "../src/session";

const run = promisify(execFile);
const BASE = process.env.WIZARD_API_BASE ?? "http://127.0.0.1:8031";
// vitest runs with frontend/ as the working directory; the Python package
// lives one level up. import.meta.url is a virtual /@fs path in workers,
// so it cannot anchor filesystem spawns.
const REPO_ROOT = resolve(process.cwd(), "..");

const GOLDEN_SEQUENCE: [string, string][] = [
  ["tdm.node.researcher_status", "qualifying_research_org"],
  ["tdm.node.purpose", "scientific_research"],
  ["tdm.node.lawful_access", "yes"],
  ["tdm.node.reservation", "robots_disallow"],
];

interface GoldenDecisions {
  ok: boolean;
  decisions: {
    tdm: { exception: string; trace: { entries: { rule_id: string }[] } };
  };
}

let golden: GoldenDecisions;

beforeAll(async () => {
  const { stdout } = await run("python3", ["-m", "petlp.cli", "golden", "--decisions"], {
    cwd: REPO_ROOT,
    maxBuffer: 16 * 1024 * 1024,
  });
  golden = JSON.parse(stdout) as GoldenDecisions;
  expect(golden.ok).toBe(true);
});

function freshId(prefix: string): string {
  return `${prefix}-${Date.now().toString(36)}-${Math.floor(Math.random() * 1e6)}`;
}

async function clickOption(root: HTMLElement, nodeId: string, choice: string): Promise<void> {
  const button = root.querySelector<HTMLButtonElement>(
    `button.option[data-node="${nodeId}"][data-choice="${choice}"]`,
  );
  expect(button, `option button for ${nodeId}=${choice}`).toBeTruthy();
  button!.click();
  // Every mutation waits for the server round-trip before re-rendering.
  await new Promise((resolve) => setTimeout(resolve, 0));
  for (let i = 0; i < 200; i++) {
    const stale = root.querySelector(`button.option[data-node="${nodeId}"]`);
    if (!stale) return;
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
  throw new Error(`UI did not advance past node ${nodeId}`);
}

describe("wizard parity with the command-line golden run", () => {
  it("reaches the same endpoint verdict and rule-id path through the rendered UI", async () => {
    const root = document.createElement("div");
    document.body.append(root);
    const app = new WizardApp(root, new ApiClient(BASE), freshId("parity"));
    await app.boot();

    // Switch to the extraction tree and answer the golden sequence by
    // clicking the rendered buttons.
    root.querySelector<HTMLButtonElement>('button[data-tree-id="extraction_tdm"]')!.click();
    for (const [nodeId, choice] of GOLDEN_SEQUENCE) {
      await clickOption(root, nodeId, choice);
    }

    const card = root.querySelector(".verdict-card");
    expect(card, "verdict card after final answer").toBeTruthy();
    expect(card!.getAttribute("data-verdict")).toBe(golden.decisions.tdm.exception);

    const shownRuleIds = [...card!.querySelectorAll(".trace-entry")].map((entry) =>
      entry.getAttribute("data-rule-id"),
    );
    const goldenRuleIds = golden.decisions.tdm.trace.entries.map((entry) => entry.rule_id);
    expect(shownRuleIds).toEqual(goldenRuleIds);
  });
});

describe("what-if isolation", () => {
  it("shows blocked-by-reservation for the commercial flip while the case stays byte-identical", async () => {
    const client = new ApiClient(BASE);
    const session = new WizardSession(client, freshId("whatif"));
    await session.start();
    for (const [nodeId, choice] of GOLDEN_SEQUENCE) {
      await session.answer(nodeId, choice);
    }
    expect(session.verdictFor("extraction_tdm")?.verdict).toBe("article3");

    const before = await client.getCaseText(session.caseId);
    const comparison = await session.whatif("tdm.node.researcher_status", "commercial_or_other");
    const after = await client.getCaseText(session.caseId);

    expect(comparison.changed).toBe(true);
    expect(comparison.hypothetical.kind).toBe("verdict");
    expect(comparison.hypothetical.verdict?.verdict).toBe("none");
    expect(comparison.hypothetical.verdict?.summary.toLowerCase()).toContain("blocked by machine-readable reservation");
    expect(after).toBe(before);
  });

  it("flags an identical downstream endpoint as no change", async () => {
    const client = new ApiClient(BASE);
    const session = new WizardSession(client, freshId("nochange"));
    await session.start();
    for (const [nodeId, choice] of GOLDEN_SEQUENCE) {
      await session.answer(nodeId, choice);
    }
    const comparison = await session.whatif("tdm.node.reservation", "none");
    expect(comparison.changed).toBe(false);
    expect(comparison.hypothetical.verdict?.verdict).toBe("article3");
  });
});

describe("server-authoritative ledger view", () => {
  it("shows badges straight from the server after a seeded pre-registration", async () => {
    const client = new ApiClient(BASE);
    const session = new WizardSession(client, freshId("ledger"));
    await session.start({
      hypotheses: "h",
      study_design: "d",
      data_plan: "p",
      model_design: "m",
      expected_outputs: "o",
    });
    expect(session.dpia?.exists).toBe(true);
    expect(session.dpia?.stage_status.pre_registration).toBe("complete");
    expect(session.dpia?.stage_status.extract).toBe("missing");
  });

  it("treats the recorded path as the server's answer state", async () => {
    const client = new ApiClient(BASE);
    const session = new WizardSession(client, freshId("path"));
    await session.start();
    await session.answer("tdm.node.researcher_status", "qualifying_research_org");
    const path = session.answeredPath("extraction_tdm");
    expect(path.map((p) => p.node.id)).toEqual(["tdm.node.researcher_status"]);
    expect(session.currentNode("extraction_tdm")?.id).toBe("tdm.node.purpose");
  });
});

describe("error surfaces", () => {
  it("surfaces server validation errors with their machine-readable code", async () => {
    const client = new ApiClient(BASE);
    const session = new WizardSession(client, freshId("invalid"));
    await session.start();
    await expect(session.answer("tdm.node.purpose", "commercial")).rejects.toMatchObject({
      code: "unknown_node",
      status: 400,
    });
  });
});
