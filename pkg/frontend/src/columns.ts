/**
 * Column view (Fig. 2-A): original columns with augmented columns nested
 * under their parent, datatype icons, and enable/disable toggles.
 */

import type { ColumnInfo, HistogramJson } from "./api.js";

const TYPE_ICONS: Record<string, string> = {
  string: "Abc",
  number: "#",
  datetime: "⏱",
};

export function typeIcon(ctype: string): string {
  return TYPE_ICONS[ctype] ?? "?";
}

/** Order columns so each augmented column follows its parent. */
export function nestColumns(columns: ColumnInfo[]): Array<{ column: ColumnInfo; depth: number }> {
  const roots = columns.filter((c) => !c.augmented);
  const byParent = new Map<string, ColumnInfo[]>();
  for (const c of columns) {
    if (!c.augmented || !c.parent_column) continue;
    const bucket = byParent.get(c.parent_column) ?? [];
    bucket.push(c);
    byParent.set(c.parent_column, bucket);
  }
  const ordered: Array<{ column: ColumnInfo; depth: number }> = [];
  for (const root of roots) {
    ordered.push({ column: root, depth: 0 });
    for (const child of byParent.get(root.name) ?? []) {
      ordered.push({ column: child, depth: 1 });
    }
  }
  // Orphans (parent disabled/renamed server-side) still need to show up.
  const seen = new Set(ordered.map((o) => o.column.name));
  for (const c of columns) {
    if (!seen.has(c.name)) ordered.push({ column: c, depth: 1 });
  }
  return ordered;
}

export interface ColumnViewHandlers {
  onToggle(name: string, enabled: boolean): void;
  onSelect(name: string): void;
  onDetails(name: string): void;
}

export function renderColumnView(
  doc: Document,
  columns: ColumnInfo[],
  handlers: ColumnViewHandlers,
): HTMLElement {
  const list = doc.createElement("ul");
  list.className = "column-list";
  for (const { column, depth } of nestColumns(columns)) {
    const item = doc.createElement("li");
    item.className = depth > 0 ? "column-row nested" : "column-row";
    if (!column.enabled) item.classList.add("disabled");
    item.dataset.name = column.name;

    const icon = doc.createElement("span");
    icon.className = "type-icon";
    icon.textContent = typeIcon(column.ctype);
    item.appendChild(icon);

    const name = doc.createElement("button");
    name.className = "column-name";
    name.textContent = column.name;
    name.addEventListener("click", () => handlers.onSelect(column.name));
    item.appendChild(name);

    const toggle = doc.createElement("input");
    toggle.type = "checkbox";
    toggle.checked = column.enabled;
    toggle.className = "column-toggle";
    toggle.addEventListener("change", () => handlers.onToggle(column.name, toggle.checked));
    item.appendChild(toggle);

    const details = doc.createElement("button");
    details.className = "column-details";
    details.textContent = "ⓘ";
    details.title = "details";
    details.addEventListener("click", () => handlers.onDetails(column.name));
    item.appendChild(details);

    list.appendChild(item);
  }
  return list;
}

/** Histogram bars straight from the API's precomputed bins. */
export function renderHistogram(doc: Document, histogram: HistogramJson | null): HTMLElement {
  const wrap = doc.createElement("div");
  wrap.className = "histogram";
  if (!histogram) {
    wrap.textContent = "no sample";
    return wrap;
  }
  const pairs: Array<[string, number]> =
    histogram.kind === "categorical"
      ? (histogram.categories ?? [])
      : (histogram.counts ?? []).map((n, i) => [String(histogram.edges?.[i] ?? i), n]);
  const peak = Math.max(1, ...pairs.map(([, n]) => n));
  for (const [key, count] of pairs) {
    const bar = doc.createElement("div");
    bar.className = "histogram-bar";
    bar.style.height = `${(count / peak) * 100}%`;
    bar.title = `${key}: ${count}`;
    bar.dataset.count = String(count);
    wrap.appendChild(bar);
  }
  return wrap;
}
