/**
 * Through-join dialog (Fig. 3): a small node-link tree of one example row's
 * subgraph with an aggregation selector per level and the live result. The
 * displayed number is always the API's computed_result; changing a selector
 * refetches /subgraph with op overrides and never commits anything.
 */

import type { KgForageApi, PlanJson, SubgraphBranch, SubgraphSample } from "./api.js";

export interface DialogState {
  plan: PlanJson;
  rowIndex: number;
  overrides: Record<number, string>;
}

export interface DialogLevel {
  /** Human label for the hop's property. */
  label: string;
  /** Selector choices, sourced from the API (descriptor aggregations or the
   *  /aggregations endpoint) — never hardcoded here. */
  ops: string[];
}

export interface DialogHandlers {
  onCommit(plan: PlanJson): void;
  onClose(): void;
  onError(message: string): void;
}

/** Plan with the dialog's overrides baked in, for preview/commit. */
export function applyOverrides(plan: PlanJson, overrides: Record<number, string>): PlanJson {
  const hops = plan.hops.map((hop, i) => {
    const op = overrides[i];
    if (op === undefined) return { ...hop };
    return i === plan.hops.length - 1 ? { ...hop, agg: op } : { ...hop, combine: op };
  });
  return { ...plan, hops };
}

function renderBranch(doc: Document, branch: SubgraphBranch): HTMLElement {
  const node = doc.createElement("li");
  node.className = "tree-branch";
  const label = doc.createElement("span");
  label.className = "tree-label";
  label.textContent = branch.label;
  node.appendChild(label);
  if (branch.children && branch.children.length) {
    const children = doc.createElement("ul");
    for (const child of branch.children) children.appendChild(renderBranch(doc, child));
    node.appendChild(children);
  } else if (branch.values) {
    const leaves = doc.createElement("ul");
    for (const value of branch.values) {
      const leaf = doc.createElement("li");
      leaf.className = "tree-leaf";
      leaf.textContent = value;
      leaves.appendChild(leaf);
    }
    node.appendChild(leaves);
  }
  return node;
}

export function renderSubgraphTree(doc: Document, sample: SubgraphSample): HTMLElement {
  const tree = doc.createElement("ul");
  tree.className = "subgraph-tree";
  const root = doc.createElement("li");
  root.className = "tree-root";
  root.textContent = sample.root.label;
  const branches = doc.createElement("ul");
  for (const branch of sample.branches) branches.appendChild(renderBranch(doc, branch));
  root.appendChild(branches);
  tree.appendChild(root);
  return tree;
}

export class ThroughJoinDialog {
  readonly element: HTMLElement;
  private resultEl: HTMLElement;
  private treeHost: HTMLElement;

  constructor(
    private readonly doc: Document,
    private readonly api: KgForageApi,
    private readonly sessionId: string,
    private readonly state: DialogState,
    private readonly levels: DialogLevel[],
    private readonly handlers: DialogHandlers,
  ) {
    this.element = doc.createElement("div");
    this.element.className = "through-dialog";
    this.treeHost = doc.createElement("div");
    this.treeHost.className = "dialog-tree";
    this.resultEl = doc.createElement("div");
    this.resultEl.className = "dialog-result";
    this.build();
  }

  private build(): void {
    const lastIndex = this.state.plan.hops.length - 1;
    const selectors = this.doc.createElement("div");
    selectors.className = "dialog-selectors";
    this.state.plan.hops.forEach((hop, i) => {
      const level = this.levels[i];
      const wrap = this.doc.createElement("label");
      wrap.className = "level-selector";
      wrap.textContent = `${level.label}: `;
      const select = this.doc.createElement("select");
      select.dataset.level = String(i);
      const current = this.state.overrides[i] ?? (i === lastIndex ? hop.agg : hop.combine ?? "");
      for (const op of level.ops) {
        const option = this.doc.createElement("option");
        option.value = op;
        option.textContent = op;
        option.selected = op === current;
        select.appendChild(option);
      }
      select.addEventListener("change", () => {
        this.state.overrides[i] = select.value;
        void this.refresh();
      });
      wrap.appendChild(select);
      selectors.appendChild(wrap);
    });

    const commit = this.doc.createElement("button");
    commit.className = "dialog-commit";
    commit.textContent = "Join";
    commit.addEventListener("click", () => {
      this.handlers.onCommit(applyOverrides(this.state.plan, this.state.overrides));
    });

    const close = this.doc.createElement("button");
    close.className = "dialog-close";
    close.textContent = "Cancel";
    close.addEventListener("click", () => this.handlers.onClose());

    this.element.append(selectors, this.treeHost, this.resultEl, commit, close);
  }

  /** Fetch the example subgraph for the current overrides and re-render. */
  async refresh(): Promise<void> {
    try {
      const sample = await this.api.subgraph(
        this.sessionId,
        this.state.plan,
        this.state.rowIndex,
        this.state.overrides,
      );
      this.treeHost.replaceChildren(renderSubgraphTree(this.doc, sample));
      this.resultEl.textContent = sample.computed_result ?? "(null)";
      this.resultEl.dataset.result = sample.computed_result ?? "";
    } catch (error) {
      const message = error instanceof Error ? error.message : String(error);
      if (message.toLowerCase().includes("row")) {
        this.resultEl.textContent = "This row has no example; pick another row.";
      } else {
        this.handlers.onError(message);
      }
    }
  }
}
