/** Entry point: binds the explorer to the page and the service URL. */

import { ApiClient } from "./api.js";
import { ExplorerController } from "./controller.js";
import { ReportPanel } from "./report.js";
import { ScatterView } from "./scatter.js";

function apiBaseUrl(): string {
  const params = new URLSearchParams(window.location.search);
  return (
    params.get("api") ??
    window.localStorage.getItem("clusterlens-api") ??
    "http://127.0.0.1:8000"
  );
}

function bootstrap(): void {
  const scatterHost = document.getElementById("scatter-host");
  const reportHost = document.getElementById("report-host");
  const fileInput = document.getElementById("dataset-file") as HTMLInputElement | null;
  const compareToggle = document.getElementById("compare-toggle") as HTMLInputElement | null;
  const apiInput = document.getElementById("api-url") as HTMLInputElement | null;
  if (!scatterHost || !reportHost || !fileInput || !compareToggle || !apiInput) {
    throw new Error("explorer markup is incomplete");
  }

  const api = new ApiClient(apiBaseUrl());
  apiInput.value = api.baseUrl;
  apiInput.addEventListener("change", () => {
    api.baseUrl = apiInput.value;
    window.localStorage.setItem("clusterlens-api", apiInput.value);
  });

  const scatter = new ScatterView(scatterHost, { width: 720, height: 540 });
  const panel = new ReportPanel(reportHost);
  const controller = new ExplorerController(api, scatter, panel);

  fileInput.addEventListener("change", () => {
    const file = fileInput.files?.[0];
    if (!file) return;
    controller.loadDataset(file, file.name).catch((err) => {
      panel.renderNetworkError(err instanceof Error ? err : new Error(String(err)));
    });
  });
  compareToggle.addEventListener("change", () => {
    controller.setCompareMode(compareToggle.checked);
  });
}

bootstrap();
