import { ApiClient } from "./api";
import { WizardApp } from "./app";

function caseIdFromUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("case");
  if (fromQuery) return fromQuery;
  return `wizard-${Date.now().toString(36)}`;
}

function apiBaseFromUrl(): string {
  // Same origin by default; ?api=http://host:port for a detached backend.
  return new URLSearchParams(window.location.search).get("api") ?? "";
}

const root = document.querySelector<HTMLElement>("#app");
if (root) {
  const app = new WizardApp(root, new ApiClient(apiBaseFromUrl()), caseIdFromUrl());
  void app.boot();
}
