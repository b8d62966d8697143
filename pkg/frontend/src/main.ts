// Single-page wiring: a merge-review tab and an explorer tab on top of the
// controllers. All graph math happens server-side; this file only renders.

import { ApiClient } from "./api.js";
import { Explorer, MONITOR_POLL_MS } from "./explorer.js";
import { computeLayout, NODE_HEIGHT, NODE_WIDTH } from "./layout.js";
import { ReviewSession } from "./review.js";
import type { Candidate, GraphDocument, GraphSummary } from "./types.js";

const api = new ApiClient("");
const app = document.getElementById("app")!;

const state: {
  tab: "review" | "explorer";
  graphs: GraphSummary[];
  mappings: string[];
  review: ReviewSession | null;
  explorer: Explorer | null;
  graphCache: Map<string, GraphDocument>;
  selectedNode: string | null;
} = {
  tab: "review",
  graphs: [],
  mappings: [],
  review: null,
  explorer: null,
  graphCache: new Map(),
  selectedNode: null,
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

async function sourceGraph(graphId: string): Promise<GraphDocument> {
  let doc = state.graphCache.get(graphId);
  if (!doc) {
    doc = await api.getGraph(graphId);
    state.graphCache.set(graphId, doc);
  }
  return doc;
}

// -- review tab ---------------------------------------------------------------

function renderSessionForm(): HTMLElement {
  const baseSelect = el("select", { id: "base-select" });
  for (const g of state.graphs) baseSelect.append(el("option", { value: g.id }, g.id));
  const othersBox = el("div", { class: "others" });
  for (const g of state.graphs) {
    const box = el("input", { type: "checkbox", value: g.id, id: `other-${g.id}` });
    othersBox.append(el("label", {}, box, ` ${g.id}`));
  }
  const threshold = el("input", { type: "number", step: "0.05", min: "0", max: "1", value: "0.3" });
  const sessionId = el("input", { type: "text", placeholder: "session id (optional)" });
  const start = el("button", {}, "Start review session");
  start.addEventListener("click", async () => {
    const others = [...othersBox.querySelectorAll("input:checked")].map(
      (box) => (box as HTMLInputElement).value,
    );
    if (!others.length) return;
    start.setAttribute("disabled", "true");
    try {
      state.review = await ReviewSession.open(api, {
        base: (baseSelect as HTMLSelectElement).value,
        others,
        threshold: Number(threshold.value),
        sessionId: sessionId.value || undefined,
      });
    } finally {
      start.removeAttribute("disabled");
    }
    render();
  });
  return el(
    "div",
    { class: "card" },
    el("h3", {}, "New merge-review session"),
    el("div", { class: "row" }, el("span", {}, "Base graph: "), baseSelect),
    el("div", { class: "row" }, el("span", {}, "Merge in: "), othersBox),
    el("div", { class: "row" }, el("span", {}, "Similarity threshold: "), threshold),
    el("div", { class: "row" }, sessionId, start),
  );
}

async function renderNeighborhood(candidate: Candidate): Promise<HTMLElement> {
  const wrap = el("div", { class: "neighborhood" });
  for (const member of candidate.members) {
    const doc = await sourceGraph(member.graph);
    const labelOf = (id: string) => doc.nodes.find((n) => n.id === id)?.label ?? id;
    const parents = doc.edges.filter((e) => e.to === member.node).map((e) => labelOf(e.from));
    const children = doc.edges.filter((e) => e.from === member.node).map((e) => labelOf(e.to));
    wrap.append(
      el(
        "div",
        { class: "member" },
        el("span", { class: "badge" }, member.graph),
        el("strong", {}, ` ${member.label}`),
        el("div", { class: "hop" }, `needed by: ${parents.join(", ") || "(root)"}`),
        el("div", { class: "hop" }, `depends on: ${children.join(", ") || "(leaf)"}`),
      ),
    );
  }
  return wrap;
}

function renderReview(): HTMLElement {
  const container = el("div", {});
  if (!state.review) {
    container.append(renderSessionForm());
    return container;
  }
  const review = state.review;
  const projected = review.projectedCounts();
  container.append(
    el(
      "div",
      { class: "stats-strip" },
      `session ${review.sessionId} · ${review.session.status} · projected merged size: ` +
        `${projected.nodes} nodes / ${projected.edges} edges`,
    ),
  );

  if (review.session.status === "applied") {
    container.append(
      el(
        "div",
        { class: "card" },
        el("h3", {}, "Session applied"),
        el("p", {}, `Merged graph: ${review.session.merged_graph_id}`),
      ),
    );
    return container;
  }

  const pending = review.pending();
  const current = pending[0];
  if (!current) {
    const applyButton = el("button", { class: "primary" }, "Apply merge");
    applyButton.addEventListener("click", async () => {
      applyButton.setAttribute("disabled", "true");
      await review.apply();
      render();
    });
    container.append(
      el("div", { class: "card" }, el("h3", {}, "All candidates decided"), applyButton),
    );
    return container;
  }

  const card = el("div", { class: "card candidate" });
  card.append(
    el(
      "h3",
      {},
      `${current.candidate_id} · similarity ${current.similarity.toFixed(3)} · ` +
        `${pending.length} pending`,
    ),
  );
  const holder = el("div", {}, "loading neighborhood…");
  card.append(holder);
  void renderNeighborhood(current).then((nodeEl) => holder.replaceChildren(nodeEl));

  const error = review.errors.get(current.candidate_id);
  if (error) card.append(el("div", { class: "error" }, error));

  const label = el("input", {
    type: "text",
    class: "canonical",
    value: review.defaultCanonicalLabel(current),
  });
  const approve = el("button", { class: "primary" }, "Approve");
  const reject = el("button", {}, "Reject");
  const disabled = review.busy.has(current.candidate_id);
  if (disabled) {
    approve.setAttribute("disabled", "true");
    reject.setAttribute("disabled", "true");
  }
  approve.addEventListener("click", async () => {
    await review.approve(current.candidate_id, label.value);
    render();
  });
  reject.addEventListener("click", async () => {
    await review.reject(current.candidate_id);
    render();
  });
  card.append(el("div", { class: "row" }, el("span", {}, "Canonical label: "), label));
  card.append(el("div", { class: "row" }, approve, reject));
  container.append(card);

  const decided = review.session.candidates.filter((c) => c.status !== "pending");
  if (decided.length) {
    const list = el("ul", {});
    for (const c of decided) {
      list.append(
        el("li", {}, `${c.candidate_id}: ${c.status}${c.canonical_label ? ` → ${c.canonical_label}` : ""}`),
      );
    }
    container.append(el("div", { class: "card" }, el("h3", {}, "Decided"), list));
  }
  return container;
}

// -- explorer tab ----------------------------------------------------------------

function heatColor(score: number): string {
  const hue = Math.round(score * 120); // red at 0, green at 1
  return `hsl(${hue}, 70%, 72%)`;
}

function renderGraphSvg(explorer: Explorer): SVGSVGElement {
  const doc = explorer.graph!;
  const layout = computeLayout(
    doc.nodes.map((n) => n.id),
    doc.edges.map((e) => ({ from: e.from, to: e.to })),
  );
  const svgNs = "http://www.w3.org/2000/svg";
  const svg = document.createElementNS(svgNs, "svg");
  svg.setAttribute("width", String(layout.width));
  svg.setAttribute("height", String(layout.height));
  svg.setAttribute("class", "graph-canvas");

  for (const edge of doc.edges) {
    const from = layout.positions.get(edge.from);
    const to = layout.positions.get(edge.to);
    if (!from || !to) continue;
    const line = document.createElementNS(svgNs, "line");
    line.setAttribute("x1", String(from.x + NODE_WIDTH / 2));
    line.setAttribute("y1", String(from.y + NODE_HEIGHT));
    line.setAttribute("x2", String(to.x + NODE_WIDTH / 2));
    line.setAttribute("y2", String(to.y));
    line.setAttribute("class", "edge");
    if (edge.multiplicity > 1) {
      const mid = document.createElementNS(svgNs, "text");
      mid.setAttribute("x", String((from.x + to.x) / 2 + NODE_WIDTH / 2));
      mid.setAttribute("y", String((from.y + to.y + NODE_HEIGHT) / 2));
      mid.setAttribute("class", "edge-label");
      mid.textContent = `×${edge.multiplicity}`;
      svg.append(mid);
    }
    svg.append(line);
  }

  for (const node of doc.nodes) {
    const pos = layout.positions.get(node.id);
    if (!pos) continue;
    const group = document.createElementNS(svgNs, "g");
    const rect = document.createElementNS(svgNs, "rect");
    rect.setAttribute("x", String(pos.x));
    rect.setAttribute("y", String(pos.y));
    rect.setAttribute("width", String(NODE_WIDTH));
    rect.setAttribute("height", String(NODE_HEIGHT));
    rect.setAttribute("rx", node.kind === "ability" ? "4" : "18");
    rect.setAttribute("class", explorer.nodeClass(node.id));
    if (explorer.options.colorMode === "monitor" && node.kind === "ability") {
      rect.setAttribute("style", `fill: ${heatColor(explorer.nodeScore(node.id))}`);
    }
    const text = document.createElementNS(svgNs, "text");
    text.setAttribute("x", String(pos.x + NODE_WIDTH / 2));
    text.setAttribute("y", String(pos.y + NODE_HEIGHT / 2 + 4));
    text.setAttribute("class", "node-label");
    text.textContent =
      node.label.length > 24 ? node.label.slice(0, 22) + "…" : node.label;
    group.append(rect, text);
    group.addEventListener("click", () => {
      state.selectedNode = node.id;
      render();
    });
    svg.append(group);
  }
  return svg;
}

function renderExplorerControls(explorer: Explorer): HTMLElement {
  const graphSelect = el("select", {});
  for (const g of state.graphs) {
    const option = el("option", { value: g.id }, `${g.id} (${g.node_count}n/${g.edge_count}e)`);
    if (g.id === explorer.graphId) option.setAttribute("selected", "true");
    graphSelect.append(option);
  }
  graphSelect.addEventListener("change", async () => {
    state.explorer = new Explorer(api, (graphSelect as HTMLSelectElement).value);
    state.selectedNode = null;
    await state.explorer.load();
    state.explorer.onChange = render;
    render();
  });

  const depth = el("input", {
    type: "range",
    min: "1",
    max: "8",
    value: String(explorer.options.depth),
  });
  depth.addEventListener("change", () => void explorer.setDepth(Number(depth.value)));

  const terminals = el("input", { type: "checkbox" });
  if (explorer.options.showTerminals) terminals.setAttribute("checked", "true");
  terminals.addEventListener("change", () =>
    void explorer.setShowTerminals((terminals as HTMLInputElement).checked),
  );

  const mode = el("select", {});
  for (const value of ["none", "coverage", "monitor"]) {
    const option = el("option", { value }, value);
    if (value === explorer.options.colorMode) option.setAttribute("selected", "true");
    mode.append(option);
  }
  const mapping = el("select", {});
  for (const m of state.mappings) {
    const option = el("option", { value: m }, m);
    if (m === explorer.options.mappingId) option.setAttribute("selected", "true");
    mapping.append(option);
  }
  const applyMode = () =>
    void explorer.setColorMode(
      (mode as HTMLSelectElement).value as "none" | "coverage" | "monitor",
      (mapping as HTMLSelectElement).value || undefined,
    );
  mode.addEventListener("change", applyMode);
  mapping.addEventListener("change", applyMode);

  return el(
    "div",
    { class: "controls" },
    el("label", {}, "Graph ", graphSelect),
    el("label", {}, ` Depth ${explorer.options.depth} `, depth),
    el("label", {}, " Terminals ", terminals),
    el("label", {}, " Color ", mode),
    el("label", {}, " Mapping ", mapping),
    explorer.stale ? el("span", { class: "stale" }, "⚠ stale") : "",
  );
}

function renderDetails(explorer: Explorer): HTMLElement {
  if (!state.selectedNode) return el("div", {});
  const details = explorer.details(state.selectedNode);
  if (!details) return el("div", {});
  const provenance = el("ul", {});
  for (const [source, label] of details.provenance) {
    provenance.append(el("li", {}, `${source}: ${label}`));
  }
  const panel = el(
    "div",
    { class: "card details" },
    el("h3", {}, details.label),
    el("p", {}, `${details.kind} · ${details.id}`),
    el("h4", {}, "Provenance"),
    provenance,
    el("h4", {}, "Mapped modules"),
    el("p", {}, details.modules.join(", ") || "(none mapped)"),
  );
  if (explorer.options.colorMode === "monitor" && explorer.monitorState) {
    const moduleList = el("div", {});
    for (const [name, value] of Object.entries(explorer.monitorState.modules)) {
      const toggle = el("button", {}, value === "down" ? "bring up" : "take down");
      toggle.addEventListener("click", () =>
        void explorer.setModule(name, { status: value === "down" ? "up" : "down" }),
      );
      moduleList.append(el("div", { class: "row" }, `${name}: ${value} `, toggle));
    }
    panel.append(el("h4", {}, "Modules"), moduleList);
  }
  return panel;
}

function renderExplorer(): HTMLElement {
  const container = el("div", {});
  if (!state.explorer && state.graphs.length) {
    const preferred =
      state.graphs.find((g) => g.id === "holistic-sample") ?? state.graphs[0];
    state.explorer = new Explorer(api, preferred.id);
    state.explorer.onChange = render;
    void state.explorer.load();
  }
  const explorer = state.explorer;
  if (!explorer) return el("div", {}, "no graphs in the workspace");
  if (explorer.banner) {
    const banner = el("div", { class: "banner" }, explorer.banner, " ");
    const dismiss = el("button", {}, "dismiss");
    dismiss.addEventListener("click", () => explorer.dismissBanner());
    banner.append(dismiss);
    container.append(banner);
  }
  container.append(renderExplorerControls(explorer));
  if (explorer.graph) {
    const split = el("div", { class: "split" });
    const canvas = el("div", { class: "canvas-holder" });
    canvas.append(renderGraphSvg(explorer));
    split.append(canvas, renderDetails(explorer));
    container.append(split);
  } else {
    container.append(el("p", {}, "loading…"));
  }
  return container;
}

// -- shell ------------------------------------------------------------------------

function render(): void {
  const reviewTab = el("button", { class: state.tab === "review" ? "tab active" : "tab" }, "Merge review");
  const explorerTab = el(
    "button",
    { class: state.tab === "explorer" ? "tab active" : "tab" },
    "Explorer",
  );
  reviewTab.addEventListener("click", () => {
    state.tab = "review";
    render();
  });
  explorerTab.addEventListener("click", () => {
    state.tab = "explorer";
    render();
  });
  app.replaceChildren(
    el("header", {}, el("h1", {}, "abig workbench"), el("nav", {}, reviewTab, explorerTab)),
    state.tab === "review" ? renderReview() : renderExplorer(),
  );
}

async function bootstrap(): Promise<void> {
  try {
    state.graphs = await api.listGraphs();
    state.mappings = await api.listMappings();
  } catch (error) {
    app.replaceChildren(
      el("div", { class: "banner" }, `cannot reach the service: ${(error as Error).message}`),
    );
    return;
  }
  render();
}

void bootstrap();

export { MONITOR_POLL_MS };
