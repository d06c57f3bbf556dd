/**
 * Related-attribute explorer (Fig. 2-B): one row per descriptor with a
 * join-quality donut and a "+" that opens the aggregation menu. Menu
 * options come verbatim from the API's allowed_aggregations response.
 */

import type { Descriptor } from "./api.js";
import { renderDonut } from "./donut.js";
import { renderHistogram, typeIcon } from "./columns.js";

export interface RelatedHandlers {
  /** Called with the chosen attribute and terminal aggregation. */
  onPickAggregation(descriptor: Descriptor, agg: string): void;
  /** Called when the user starts a through-join from an entity attribute. */
  onThrough(descriptor: Descriptor): void;
}

/**
 * The menu is exactly the API's list: final aggregations first, then the
 * intermediate ("through the attribute") continuations for entity columns.
 */
export function menuOptions(descriptor: Descriptor): Array<{ op: string; through: boolean }> {
  const finals = descriptor.aggregations.map((op) => ({ op, through: false }));
  const through = descriptor.intermediate_aggregations
    .filter((op) => op === "through")
    .map((op) => ({ op, through: true }));
  return [...finals, ...through];
}

export function renderRelatedList(
  doc: Document,
  descriptors: Descriptor[],
  handlers: RelatedHandlers,
): HTMLElement {
  const list = doc.createElement("ul");
  list.className = "related-list";
  if (descriptors.length === 0) {
    const empty = doc.createElement("li");
    empty.className = "related-empty";
    empty.textContent = "No joinable attributes found for this column.";
    list.appendChild(empty);
    return list;
  }
  for (const descriptor of descriptors) {
    const item = doc.createElement("li");
    item.className = "related-row";
    item.dataset.property = descriptor.property;

    item.appendChild(renderDonut(doc, descriptor.coverage));

    const icon = doc.createElement("span");
    icon.className = "type-icon";
    icon.textContent = typeIcon(descriptor.datatype);
    item.appendChild(icon);

    const label = doc.createElement("span");
    label.className = "related-label";
    label.textContent = descriptor.unit
      ? `${descriptor.label} (${descriptor.unit})`
      : descriptor.label;
    label.title = descriptor.description;
    item.appendChild(label);

    const tooltip = doc.createElement("div");
    tooltip.className = "related-tooltip";
    tooltip.appendChild(renderHistogram(doc, descriptor.histogram));
    const examples = doc.createElement("div");
    examples.className = "related-examples";
    examples.textContent = descriptor.examples.join(", ");
    tooltip.appendChild(examples);
    item.appendChild(tooltip);

    const add = doc.createElement("button");
    add.className = "related-add";
    add.textContent = "+";
    add.addEventListener("click", () => {
      item.appendChild(renderMenu(doc, descriptor, handlers));
    });
    item.appendChild(add);

    list.appendChild(item);
  }
  return list;
}

export function renderMenu(
  doc: Document,
  descriptor: Descriptor,
  handlers: RelatedHandlers,
): HTMLElement {
  const menu = doc.createElement("div");
  menu.className = "agg-menu";
  for (const option of menuOptions(descriptor)) {
    const button = doc.createElement("button");
    button.className = option.through ? "agg-option through" : "agg-option";
    button.dataset.op = option.op;
    button.textContent = option.through ? "through…" : option.op;
    button.addEventListener("click", () => {
      menu.remove();
      if (option.through) handlers.onThrough(descriptor);
      else handlers.onPickAggregation(descriptor, option.op);
    });
    menu.appendChild(button);
  }
  return menu;
}
