import type { ApiClient } from "./api";
import {
  addConstraintTo,
  expandOperand,
  expandWithLink,
  localName,
  operatorsFor,
  removeConstraintFrom,
  removeLeafNode,
} from "./graphops";
import type { SessionStore } from "./state";
import type { Diagnostic, GraphJson, Suggestion } from "./types";
import { strokeFor } from "./widths";

const SVG_NS = "http://www.w3.org/2000/svg";

interface PopupState {
  nodeId: number;
  mode: "links" | "constraints";
  query: string;
  results: Suggestion[];
}

/**
 * Node-based prototype-graph editor. Every affordance extends or trims the
 * tree (a "+" on a node adds a leaf; only leaves can be removed), so cycles
 * are impossible by construction. Link stroke widths encode prevalence;
 * unknown prevalence renders dashed. Edits flow through the onChange
 * callback, which validates and (when valid) schedules execution.
 */
export class EditorView {
  private popup: PopupState | null = null;
  private prevalence = new Map<string, number | null>();

  constructor(
    private readonly root: HTMLElement,
    private readonly store: SessionStore,
    private readonly api: ApiClient,
    private readonly onChange: (graph: GraphJson) => void,
  ) {
    this.store.subscribe(() => this.render());
  }

  /** Remember prevalences from any suggestion list that passes through. */
  recordSuggestions(suggestions: Suggestion[]): void {
    for (const s of suggestions) this.prevalence.set(s.propertyIri, s.prevalence);
  }

  /** After a URL-fragment restore, look up widths for edges we never saw
   * suggestions for, using the public search API only. */
  async fillPrevalence(graph: GraphJson): Promise<void> {
    const missing = graph.edges.filter((e) => !this.prevalence.has(e.propertyIri));
    const byClass = new Map<string, Set<string>>();
    for (const edge of missing) {
      const source = graph.nodes.find((n) => n.nodeId === edge.sourceNodeId);
      if (!source) continue;
      const set = byClass.get(source.classIri) ?? new Set();
      set.add(edge.propertyIri);
      byClass.set(source.classIri, set);
    }
    for (const [classIri, props] of byClass) {
      try {
        const response = await this.api.outLinks(classIri, "", 50);
        this.recordSuggestions(response.suggestions);
      } catch {
        // widths stay unknown (dashed); not fatal
      }
      void props;
    }
    this.render();
  }

  async openPopup(nodeId: number, mode: "links" | "constraints"): Promise<void> {
    this.popup = { nodeId, mode, query: "", results: [] };
    await this.search("");
  }

  closePopup(): void {
    this.popup = null;
    this.render();
  }

  async search(query: string): Promise<void> {
    if (!this.popup) return;
    const graph = this.store.state.currentGraph;
    if (!graph) return;
    const node = graph.nodes.find((n) => n.nodeId === this.popup!.nodeId);
    if (!node) return;
    this.popup.query = query;
    const response =
      this.popup.mode === "links"
        ? await this.api.outLinks(node.classIri, query)
        : await this.api.constraintProps(node.classIri, query);
    this.recordSuggestions(response.suggestions);
    // latest-wins: a stale response for an older query is dropped
    if (this.popup && this.popup.query === query) {
      this.popup.results = response.suggestions;
      this.render();
    }
  }

  pickLink(suggestion: Suggestion): void {
    const graph = this.store.state.currentGraph;
    if (!graph || !this.popup) return;
    const next = expandWithLink(graph, this.popup.nodeId, suggestion);
    this.popup = null;
    this.onChange(next);
  }

  pickConstraint(suggestion: Suggestion, operator: string, rawOperand: string): void {
    const graph = this.store.state.currentGraph;
    if (!graph || !this.popup) return;
    const { literal } = expandOperand(rawOperand, suggestion.rangeClassOrDatatype);
    const next = addConstraintTo(graph, this.popup.nodeId, {
      propertyIri: suggestion.propertyIri,
      operator,
      operand: literal,
    });
    this.popup = null;
    this.onChange(next);
  }

  removeNode(nodeId: number): void {
    const graph = this.store.state.currentGraph;
    if (!graph) return;
    const next = removeLeafNode(graph, nodeId);
    if (next !== graph) this.onChange(next);
  }

  removeConstraint(nodeId: number, index: number): void {
    const graph = this.store.state.currentGraph;
    if (!graph) return;
    this.onChange(removeConstraintFrom(graph, nodeId, index));
  }

  /** BFS columns from the root; rows in visit order. */
  private positions(graph: GraphJson): Map<number, { x: number; y: number }> {
    const out = new Map<number, { x: number; y: number }>();
    const depth = new Map<number, number>([[graph.rootNodeId, 0]]);
    const queue = [graph.rootNodeId];
    const order: number[] = [];
    while (queue.length > 0) {
      const current = queue.shift()!;
      order.push(current);
      for (const edge of graph.edges) {
        const next =
          edge.sourceNodeId === current && !depth.has(edge.targetNodeId)
            ? edge.targetNodeId
            : edge.targetNodeId === current && !depth.has(edge.sourceNodeId)
              ? edge.sourceNodeId
              : null;
        if (next !== null) {
          depth.set(next, depth.get(current)! + 1);
          queue.push(next);
        }
      }
    }
    const rows = new Map<number, number>();
    for (const nodeId of order) {
      const d = depth.get(nodeId) ?? 0;
      const row = rows.get(d) ?? 0;
      rows.set(d, row + 1);
      out.set(nodeId, { x: 30 + d * 190, y: 30 + row * 110 });
    }
    return out;
  }

  render(): void {
    const graph = this.store.state.currentGraph;
    this.root.innerHTML = "";
    if (!graph) {
      const hint = document.createElement("p");
      hint.dataset.testid = "editor-empty";
      hint.textContent = "Pick topics and choose a start link to begin.";
      this.root.appendChild(hint);
      return;
    }

    const diagnostics = this.store.state.lastDiagnostics;
    const badNodes = new Set(
      diagnostics.map((d) => d.element["nodeId"]).filter((v): v is number => typeof v === "number"),
    );
    const badEdges = new Set(
      diagnostics
        .map((d) => d.element["edgeIndex"])
        .filter((v): v is number => typeof v === "number"),
    );

    const positions = this.positions(graph);
    const maxCount = Math.max(
      0,
      ...graph.edges.map((e) => this.prevalence.get(e.propertyIri) ?? 0),
    );

    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("width", "800");
    svg.setAttribute("height", String(40 + 110 * graph.nodes.length));
    svg.dataset.testid = "editor-canvas";

    graph.edges.forEach((edge, index) => {
      const from = positions.get(edge.sourceNodeId)!;
      const to = positions.get(edge.targetNodeId)!;
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(from.x + 150));
      line.setAttribute("y1", String(from.y + 20));
      line.setAttribute("x2", String(to.x));
      line.setAttribute("y2", String(to.y + 20));
      const stroke = strokeFor(this.prevalence.get(edge.propertyIri) ?? null, maxCount);
      line.setAttribute("stroke", badEdges.has(index) ? "#c0392b" : "#557");
      line.setAttribute("stroke-width", stroke.width.toFixed(3));
      if (stroke.dashed) line.setAttribute("stroke-dasharray", "6 4");
      line.dataset.testid = `edge-${index}`;
      line.dataset.width = stroke.width.toFixed(3);
      line.dataset.dashed = String(stroke.dashed);
      line.dataset.property = edge.propertyIri;
      svg.appendChild(line);
      const text = document.createElementNS(SVG_NS, "text");
      text.setAttribute("x", String((from.x + 150 + to.x) / 2));
      text.setAttribute("y", String((from.y + to.y) / 2 + 14));
      text.setAttribute("class", "edge-label");
      text.textContent = localName(edge.propertyIri);
      svg.appendChild(text);
    });

    for (const node of graph.nodes) {
      const pos = positions.get(node.nodeId)!;
      const group = document.createElementNS(SVG_NS, "g");
      group.dataset.testid = `node-${node.nodeId}`;
      const rect = document.createElementNS(SVG_NS, "rect");
      rect.setAttribute("x", String(pos.x));
      rect.setAttribute("y", String(pos.y));
      rect.setAttribute("width", "150");
      rect.setAttribute("height", "40");
      rect.setAttribute("rx", "6");
      rect.setAttribute("fill", "#eef3fb");
      rect.setAttribute("stroke", badNodes.has(node.nodeId) ? "#c0392b" : "#446");
      group.appendChild(rect);
      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String(pos.x + 75));
      label.setAttribute("y", String(pos.y + 24));
      label.setAttribute("text-anchor", "middle");
      label.textContent = localName(node.classIri);
      group.appendChild(label);

      node.constraints.forEach((constraint, index) => {
        const tag = document.createElementNS(SVG_NS, "text");
        tag.setAttribute("x", String(pos.x + 8));
        tag.setAttribute("y", String(pos.y + 58 + index * 16));
        tag.setAttribute("class", "constraint-tag");
        tag.dataset.testid = `constraint-${node.nodeId}-${index}`;
        tag.textContent =
          `${localName(constraint.propertyIri)} ${constraint.operator} ` +
          constraint.operand.lexical;
        tag.addEventListener("click", () => this.removeConstraint(node.nodeId, index));
        group.appendChild(tag);
      });
      svg.appendChild(group);
    }
    this.root.appendChild(svg);

    const toolbar = document.createElement("div");
    toolbar.className = "editor-toolbar";
    for (const node of graph.nodes) {
      const addLink = document.createElement("button");
      addLink.dataset.testid = `add-link-${node.nodeId}`;
      addLink.textContent = `+ link from ${localName(node.classIri)} #${node.nodeId}`;
      addLink.addEventListener("click", () => void this.openPopup(node.nodeId, "links"));
      toolbar.appendChild(addLink);
      const addConstraint = document.createElement("button");
      addConstraint.dataset.testid = `add-constraint-${node.nodeId}`;
      addConstraint.textContent = `+ constraint #${node.nodeId}`;
      addConstraint.addEventListener(
        "click",
        () => void this.openPopup(node.nodeId, "constraints"),
      );
      toolbar.appendChild(addConstraint);
      const degree = graph.edges.filter(
        (e) => e.sourceNodeId === node.nodeId || e.targetNodeId === node.nodeId,
      ).length;
      if (node.nodeId !== graph.rootNodeId && degree === 1) {
        const remove = document.createElement("button");
        remove.dataset.testid = `remove-node-${node.nodeId}`;
        remove.textContent = `remove #${node.nodeId}`;
        remove.addEventListener("click", () => this.removeNode(node.nodeId));
        toolbar.appendChild(remove);
      }
    }
    this.root.appendChild(toolbar);

    if (diagnostics.length > 0) {
      const list = document.createElement("ul");
      list.dataset.testid = "diagnostics";
      for (const diagnostic of diagnostics) {
        const item = document.createElement("li");
        item.textContent = `${diagnostic.code}: ${diagnostic.message}`;
        list.appendChild(item);
      }
      this.root.appendChild(list);
    }

    if (this.popup) this.renderPopup(this.popup);
  }

  private renderPopup(popup: PopupState): void {
    const panel = document.createElement("div");
    panel.className = "search-popup";
    panel.dataset.testid = "search-popup";

    const input = document.createElement("input");
    input.type = "search";
    input.value = popup.query;
    input.placeholder =
      popup.mode === "links" ? "Search outgoing links…" : "Search constraint properties…";
    input.dataset.testid = "popup-query";
    let timer: ReturnType<typeof setTimeout> | null = null;
    input.addEventListener("input", () => {
      if (timer !== null) clearTimeout(timer);
      timer = setTimeout(() => void this.search(input.value), 200);
    });
    panel.appendChild(input);

    const close = document.createElement("button");
    close.textContent = "Close";
    close.dataset.testid = "popup-close";
    close.addEventListener("click", () => this.closePopup());
    panel.appendChild(close);

    const maxCount = Math.max(0, ...popup.results.map((s) => s.prevalence ?? 0));
    const list = document.createElement("ol");
    list.dataset.testid = "popup-results";
    for (const suggestion of popup.results) {
      const item = document.createElement("li");
      const stroke = strokeFor(suggestion.prevalence, maxCount);
      const bar = document.createElement("span");
      bar.className = "prevalence-bar";
      bar.style.borderBottom = stroke.dashed
        ? "2px dashed #999"
        : `${stroke.width.toFixed(1)}px solid #557`;
      bar.textContent = suggestion.label;
      item.appendChild(bar);

      if (popup.mode === "links") {
        const pick = document.createElement("button");
        pick.dataset.testid = `pick-link-${suggestion.propertyIri}`;
        pick.textContent = "add";
        pick.addEventListener("click", () => this.pickLink(suggestion));
        item.appendChild(pick);
      } else {
        const operator = document.createElement("select");
        for (const op of operatorsFor(suggestion.rangeClassOrDatatype)) {
          const option = document.createElement("option");
          option.value = op;
          option.textContent = op;
          operator.appendChild(option);
        }
        const operand = document.createElement("input");
        operand.placeholder = "value";
        operand.dataset.testid = `operand-${suggestion.propertyIri}`;
        const chip = document.createElement("span");
        chip.className = "expansion-chip";
        chip.dataset.testid = `chip-${suggestion.propertyIri}`;
        operand.addEventListener("input", () => {
          const expanded = expandOperand(operand.value, suggestion.rangeClassOrDatatype);
          chip.textContent = expanded.expandedFrom
            ? `${expanded.expandedFrom} → ${expanded.literal.lexical}`
            : "";
        });
        const pick = document.createElement("button");
        pick.dataset.testid = `pick-constraint-${suggestion.propertyIri}`;
        pick.textContent = "add";
        pick.addEventListener("click", () =>
          this.pickConstraint(suggestion, operator.value, operand.value),
        );
        item.appendChild(operator);
        item.appendChild(operand);
        item.appendChild(chip);
        item.appendChild(pick);
      }
      list.appendChild(item);
    }
    panel.appendChild(list);
    this.root.appendChild(panel);
  }

  /** Contract-test hook: rendered popup ranking order. */
  displayedPopupIris(): string[] {
    return [
      ...this.root.querySelectorAll<HTMLElement>(
        "[data-testid^='pick-link-'], [data-testid^='pick-constraint-']",
      ),
    ].map((el) =>
      el.dataset.testid!.replace("pick-link-", "").replace("pick-constraint-", ""),
    );
  }

  edgeStrokes(): { property: string; width: number; dashed: boolean }[] {
    return [...this.root.querySelectorAll<SVGLineElement>("[data-testid^='edge-']")].map(
      (el) => ({
        property: el.dataset.property!,
        width: Number(el.dataset.width),
        dashed: el.dataset.dashed === "true",
      }),
    );
  }
}
