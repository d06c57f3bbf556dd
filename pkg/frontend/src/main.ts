/**
 * Application shell: wires the column view, related-attribute explorer,
 * through-join dialog, and table preview to the session API.
 */

import { ApiError, KgForageApi } from "./api.js";
import type { ColumnInfo, Descriptor, PlanJson, TablePreview } from "./api.js";
import { renderColumnView } from "./columns.js";
import { renderRelatedList } from "./related.js";
import { DialogLevel, ThroughJoinDialog } from "./dialog.js";

interface ViewState {
  sessionId: string | null;
  selectedColumn: string | null;
  columns: ColumnInfo[];
  descriptors: Descriptor[];
  discoveryAbort: AbortController | null;
}

export class App {
  private state: ViewState = {
    sessionId: null,
    selectedColumn: null,
    columns: [],
    descriptors: [],
    discoveryAbort: null,
  };

  constructor(
    private readonly doc: Document,
    private readonly api: KgForageApi,
    private readonly root: HTMLElement,
  ) {}

  banner(message: string): void {
    const el = this.doc.createElement("div");
    el.className = "banner";
    el.textContent = message;
    const dismiss = this.doc.createElement("button");
    dismiss.textContent = "×";
    dismiss.addEventListener("click", () => el.remove());
    el.appendChild(dismiss);
    this.root.prepend(el);
  }

  private handle(error: unknown): void {
    if (error instanceof ApiError) this.banner(`API ${error.status}: ${error.message}`);
    else this.banner(String(error));
  }

  async upload(file: File | Blob): Promise<void> {
    try {
      const body = await this.api.createSession(file);
      this.state.sessionId = body.session_id;
      this.state.columns = body.columns;
      this.renderColumns();
      await this.renderPreview();
    } catch (error) {
      this.handle(error);
    }
  }

  private host(id: string): HTMLElement {
    let el = this.doc.getElementById(id);
    if (!el) {
      el = this.doc.createElement("section");
      el.id = id;
      this.root.appendChild(el);
    }
    return el as HTMLElement;
  }

  renderColumns(): void {
    const view = renderColumnView(this.doc, this.state.columns, {
      onToggle: (name, enabled) => void this.toggle(name, enabled),
      onSelect: (name) => void this.selectColumn(name),
      onDetails: (name) => void this.showDetails(name),
    });
    this.host("columns").replaceChildren(view);
  }

  private async toggle(name: string, enabled: boolean): Promise<void> {
    if (!this.state.sessionId) return;
    try {
      this.state.columns = await this.api.setEnabled(this.state.sessionId, name, enabled);
      this.renderColumns();
      await this.renderPreview();
    } catch (error) {
      this.handle(error);
      this.renderColumns(); // restore the previous checkbox state
    }
  }

  private async showDetails(name: string): Promise<void> {
    this.state.selectedColumn = name;
    // details popover reuses the related list host for simplicity
    await this.selectColumn(name);
  }

  async selectColumn(name: string): Promise<void> {
    if (!this.state.sessionId) return;
    this.state.selectedColumn = name;
    this.state.discoveryAbort?.abort();
    const abort = new AbortController();
    this.state.discoveryAbort = abort;
    try {
      this.state.descriptors = await this.api.related(this.state.sessionId, name, undefined, abort.signal);
    } catch (error) {
      if ((error as Error).name === "AbortError") return;
      this.handle(error);
      return;
    }
    const list = renderRelatedList(this.doc, this.state.descriptors, {
      onPickAggregation: (descriptor, agg) => void this.commitSimple(descriptor, agg),
      onThrough: (descriptor) => void this.openThroughDialog(descriptor),
    });
    this.host("related").replaceChildren(list);
  }

  private planFor(descriptor: Descriptor, agg: string): PlanJson {
    return {
      source_column: this.state.selectedColumn ?? "",
      hops: [{ property: descriptor.property, agg }],
      output_name: "",
    };
  }

  private async commitSimple(descriptor: Descriptor, agg: string): Promise<void> {
    if (!this.state.sessionId) return;
    try {
      this.state.columns = await this.api.commitJoin(this.state.sessionId, this.planFor(descriptor, agg));
      this.renderColumns();
      await this.renderPreview();
    } catch (error) {
      this.handle(error);
    }
  }

  async openThroughDialog(throughDescriptor: Descriptor, target?: Descriptor, agg = "count"): Promise<void> {
    if (!this.state.sessionId || !this.state.selectedColumn) return;
    const final = target ?? this.state.descriptors.find((d) => d.property !== throughDescriptor.property);
    if (!final) {
      this.banner("No target attribute available for a through join.");
      return;
    }
    const plan: PlanJson = {
      source_column: this.state.selectedColumn,
      hops: [
        { property: throughDescriptor.property, agg: "through", combine: "count" },
        { property: final.property, agg },
      ],
      output_name: "",
    };
    // Combine options for the intermediate level come from the service too:
    // operators legal over the inner results' datatype.
    const response = await fetch(
      `/aggregations?datatype=${encodeURIComponent(final.datatype)}&cardinality=many`,
    );
    const combineOps = ((await response.json()) as { aggregations: string[] }).aggregations;
    const levels: DialogLevel[] = [
      { label: throughDescriptor.label, ops: combineOps },
      { label: final.label, ops: final.aggregations },
    ];
    const dialog = new ThroughJoinDialog(
      this.doc,
      this.api,
      this.state.sessionId,
      { plan, rowIndex: 0, overrides: {} },
      levels,
      {
        onCommit: (finalPlan) => void this.commitPlan(finalPlan),
        onClose: () => this.host("dialog").replaceChildren(),
        onError: (message) => this.banner(message),
      },
    );
    this.host("dialog").replaceChildren(dialog.element);
    await dialog.refresh();
  }

  private async commitPlan(plan: PlanJson): Promise<void> {
    if (!this.state.sessionId) return;
    try {
      this.state.columns = await this.api.commitJoin(this.state.sessionId, plan);
      this.host("dialog").replaceChildren();
      this.renderColumns();
      await this.renderPreview();
    } catch (error) {
      this.handle(error);
    }
  }

  async renderPreview(): Promise<void> {
    if (!this.state.sessionId) return;
    let preview: TablePreview;
    try {
      preview = await this.api.tablePreview(this.state.sessionId, 10);
    } catch (error) {
      this.handle(error);
      return;
    }
    const tableEl = this.doc.createElement("table");
    tableEl.className = "preview-table";
    const head = this.doc.createElement("tr");
    for (const name of preview.columns) {
      const th = this.doc.createElement("th");
      th.textContent = name;
      head.appendChild(th);
    }
    tableEl.appendChild(head);
    for (const row of preview.rows) {
      const tr = this.doc.createElement("tr");
      for (const cell of row) {
        const td = this.doc.createElement("td");
        td.textContent = cell ?? "";
        if (cell === null) td.className = "null-cell";
        tr.appendChild(td);
      }
      tableEl.appendChild(tr);
    }
    const exportLink = this.doc.createElement("a");
    exportLink.href = this.api.exportUrl(this.state.sessionId);
    exportLink.textContent = "Export CSV";
    exportLink.className = "export-link";
    this.host("preview").replaceChildren(tableEl, exportLink);
  }
}

export function boot(doc: Document): App {
  const root = doc.getElementById("app") ?? doc.body;
  const api = new KgForageApi("");
  const app = new App(doc, api, root);
  const input = doc.getElementById("csv-input") as HTMLInputElement | null;
  input?.addEventListener("change", () => {
    const file = input.files?.[0];
    if (file) void app.upload(file);
  });
  return app;
}

declare global {
  interface Window {
    __kgforage?: App;
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined" && document.getElementById("app")) {
  window.__kgforage = boot(document);
}
