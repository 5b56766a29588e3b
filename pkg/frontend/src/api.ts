import type { AnswerResponse, CaseView, DpiaView, Tree, WhatifResponse } from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  if (!response.ok) {
    let code = "http_error";
    let message = `${init?.method ?? "GET"} ${url} failed: ${response.status}`;
    try {
      const body = (await response.json()) as { detail?: { code?: string; message?: string } };
      if (body.detail?.code) code = body.detail.code;
      if (body.detail?.message) message = body.detail.message;
    } catch {
      // non-JSON error body; keep the generic message
    }
    throw new ApiError(response.status, code, message);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  getTrees(): Promise<{ trees: Tree[] }> {
    return request(`${this.baseUrl}/trees`);
  }

  createCase(caseId: string, preRegistration?: Record<string, unknown>): Promise<{ case_id: string }> {
    return request(`${this.baseUrl}/cases`, {
      method: "POST",
      body: JSON.stringify({ case_id: caseId, pre_registration: preRegistration ?? null }),
    });
  }

  getCase(caseId: string): Promise<CaseView> {
    return request(`${this.baseUrl}/cases/${encodeURIComponent(caseId)}`);
  }

  /** Raw case body, for byte-level isolation checks. */
  async getCaseText(caseId: string): Promise<string> {
    const response = await fetch(`${this.baseUrl}/cases/${encodeURIComponent(caseId)}`);
    if (!response.ok) throw new ApiError(response.status, "http_error", `case fetch failed: ${response.status}`);
    return response.text();
  }

  answer(caseId: string, nodeId: string, choice: string): Promise<AnswerResponse> {
    return request(`${this.baseUrl}/cases/${encodeURIComponent(caseId)}/answer`, {
      method: "POST",
      body: JSON.stringify({ node_id: nodeId, choice }),
    });
  }

  whatif(caseId: string, nodeId: string, alternative: string): Promise<WhatifResponse> {
    return request(`${this.baseUrl}/cases/${encodeURIComponent(caseId)}/whatif`, {
      method: "POST",
      body: JSON.stringify({ node_id: nodeId, alternative }),
    });
  }

  getDpia(caseId: string): Promise<DpiaView> {
    return request(`${this.baseUrl}/cases/${encodeURIComponent(caseId)}/dpia`);
  }
}
