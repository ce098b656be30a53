/**
 * Orchestrates the explorer: lasso completions turn into explain or
 * compare requests, responses land in the report panel, and rejected
 * or failed requests surface as inline messages instead of dead air.
 */

import { ApiClient, Report, RequestSuperseded, ServiceError } from "./api.js";
import { ReportPanel } from "./report.js";
import { ScatterView } from "./scatter.js";
import {
  applyLasso,
  initialState,
  setCompareMode,
  ViewState,
  withDataset,
  withProjection,
  withReport,
} from "./state.js";

export class ExplorerController {
  state: ViewState = initialState();
  private lastRequest: (() => Promise<void>) | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly scatter: ScatterView,
    private readonly panel: ReportPanel,
  ) {
    this.scatter.onLasso((result) => {
      void this.handleLasso(result.ids);
    });
    this.panel.onRetry(() => {
      void this.lastRequest?.();
    });
  }

  /** Upload a CSV, compute its PCA projection and show the points. */
  async loadDataset(file: File | Blob, name?: string): Promise<void> {
    const summary = await this.api.uploadDataset(file, name);
    this.state = withDataset(summary.dataset_id, summary.n_rows);
    const projection = await this.api.computePca(summary.dataset_id);
    this.state = withProjection(this.state, projection.projection_id, projection.coords);
    this.scatter.setData(projection.coords);
    this.panel.clear();
  }

  setCompareMode(on: boolean): void {
    this.state = setCompareMode(this.state, on);
    this.scatter.setSelections(this.state.selectionA, this.state.selectionB);
  }

  /**
   * A completed lasso. Outside comparison mode it replaces selection A
   * and asks for an explanation. In comparison mode the second lasso
   * fills selection B and asks for a comparison; until B exists only
   * the highlight changes.
   */
  async handleLasso(ids: number[]): Promise<void> {
    if (this.state.datasetId === null) return;
    this.state = applyLasso(this.state, ids);
    this.scatter.setSelections(this.state.selectionA, this.state.selectionB);

    if (this.state.compareMode) {
      if (this.state.selectionA.length > 0 && this.state.selectionB.length > 0) {
        await this.requestCompare();
      }
      return;
    }
    await this.requestExplain();
  }

  private async requestExplain(): Promise<void> {
    const { datasetId, selectionA } = this.state;
    if (datasetId === null) return;
    const run = () =>
      this.runReport(() => this.api.requestExplain(datasetId, selectionA));
    this.lastRequest = run;
    await run();
  }

  private async requestCompare(): Promise<void> {
    const { datasetId, selectionA, selectionB } = this.state;
    if (datasetId === null) return;
    const run = () =>
      this.runReport(() => this.api.requestCompare(datasetId, selectionA, selectionB));
    this.lastRequest = run;
    await run();
  }

  private async runReport(request: () => Promise<Report>): Promise<void> {
    this.panel.renderLoading();
    try {
      const report = await request();
      this.state = withReport(this.state, report);
      this.panel.renderReport(report);
    } catch (err) {
      if (err instanceof RequestSuperseded) return; // a newer request owns the panel
      if (err instanceof ServiceError) {
        this.state = withReport(this.state, null);
        this.panel.renderServiceError(err);
        return;
      }
      this.state = withReport(this.state, null);
      this.panel.renderNetworkError(err instanceof Error ? err : new Error(String(err)));
    }
  }
}
