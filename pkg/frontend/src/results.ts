import { localName } from "./graphops";
import type { SessionStore } from "./state";
import type { GraphJson, InstanceJson } from "./types";

const SVG_NS = "http://www.w3.org/2000/svg";

/**
 * Small-multiples grid: one mini graph per result instance, drawn in the
 * prototype graph's shape, with click-to-expand details and pagination.
 */
export class ResultsView {
  private expanded: number | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly store: SessionStore,
    private readonly onPage: (offset: number) => void,
  ) {
    this.store.subscribe(() => {
      this.expanded = null;
      this.render();
    });
  }

  private miniGraph(graph: GraphJson, instance: InstanceJson): SVGElement {
    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", "0 0 220 140");
    svg.setAttribute("class", "mini-graph");
    const positions = new Map<number, { x: number; y: number }>();
    const depth = new Map<number, number>([[graph.rootNodeId, 0]]);
    const queue = [graph.rootNodeId];
    const rows = new Map<number, number>();
    while (queue.length > 0) {
      const current = queue.shift()!;
      const d = depth.get(current)!;
      const row = rows.get(d) ?? 0;
      rows.set(d, row + 1);
      positions.set(current, { x: 10 + d * 70, y: 10 + row * 44 });
      for (const edge of graph.edges) {
        const next =
          edge.sourceNodeId === current && !depth.has(edge.targetNodeId)
            ? edge.targetNodeId
            : edge.targetNodeId === current && !depth.has(edge.sourceNodeId)
              ? edge.sourceNodeId
              : null;
        if (next !== null) {
          depth.set(next, d + 1);
          queue.push(next);
        }
      }
    }
    for (const edge of graph.edges) {
      const from = positions.get(edge.sourceNodeId)!;
      const to = positions.get(edge.targetNodeId)!;
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(from.x + 60));
      line.setAttribute("y1", String(from.y + 12));
      line.setAttribute("x2", String(to.x));
      line.setAttribute("y2", String(to.y + 12));
      line.setAttribute("stroke", "#668");
      svg.appendChild(line);
    }
    for (const node of graph.nodes) {
      const pos = positions.get(node.nodeId)!;
      const iri = instance.nodeAssignments[String(node.nodeId)];
      const rect = document.createElementNS(SVG_NS, "rect");
      rect.setAttribute("x", String(pos.x));
      rect.setAttribute("y", String(pos.y));
      rect.setAttribute("width", "60");
      rect.setAttribute("height", "24");
      rect.setAttribute("rx", "4");
      rect.setAttribute("fill", "#f2f6ee");
      rect.setAttribute("stroke", "#575");
      svg.appendChild(rect);
      const text = document.createElementNS(SVG_NS, "text");
      text.setAttribute("x", String(pos.x + 30));
      text.setAttribute("y", String(pos.y + 16));
      text.setAttribute("text-anchor", "middle");
      text.setAttribute("font-size", "8");
      text.textContent = iri ? (instance.displayLabels[iri] ?? localName(iri)) : "?";
      svg.appendChild(text);
    }
    return svg;
  }

  render(): void {
    const { currentGraph, lastResults, resultsOffset } = this.store.state;
    this.root.innerHTML = "";
    if (!currentGraph || !lastResults) return;

    if (lastResults.instances.length === 0) {
      const empty = document.createElement("p");
      empty.dataset.testid = "no-matches";
      empty.textContent =
        "No matches. Try relaxing a constraint or picking a thicker (more prevalent) link.";
      this.root.appendChild(empty);
      return;
    }

    const grid = document.createElement("div");
    grid.className = "results-grid";
    grid.dataset.testid = "results-grid";
    lastResults.instances.forEach((instance, index) => {
      const cell = document.createElement("figure");
      cell.dataset.testid = `result-${index}`;
      cell.appendChild(this.miniGraph(currentGraph, instance));
      const caption = document.createElement("figcaption");
      const rootIri = instance.nodeAssignments[String(currentGraph.rootNodeId)];
      caption.textContent = rootIri
        ? (instance.displayLabels[rootIri] ?? localName(rootIri))
        : `result ${index + 1}`;
      cell.appendChild(caption);
      cell.addEventListener("click", () => {
        this.expanded = this.expanded === index ? null : index;
        this.render();
      });
      if (this.expanded === index) {
        const detail = document.createElement("dl");
        detail.dataset.testid = `result-detail-${index}`;
        for (const [nodeId, iri] of Object.entries(instance.nodeAssignments)) {
          const dt = document.createElement("dt");
          dt.textContent = `node ${nodeId}`;
          const dd = document.createElement("dd");
          dd.textContent = `${instance.displayLabels[iri] ?? localName(iri)} <${iri}>`;
          detail.appendChild(dt);
          detail.appendChild(dd);
        }
        for (const cv of instance.constraintValues) {
          const dt = document.createElement("dt");
          dt.textContent = `constraint ${cv.nodeId}.${cv.index}`;
          const dd = document.createElement("dd");
          dd.textContent = cv.value.lexical;
          detail.appendChild(dt);
          detail.appendChild(dd);
        }
        cell.appendChild(detail);
      }
      grid.appendChild(cell);
    });
    this.root.appendChild(grid);

    const pager = document.createElement("div");
    pager.className = "pager";
    const prev = document.createElement("button");
    prev.textContent = "‹ prev";
    prev.dataset.testid = "page-prev";
    prev.disabled = resultsOffset === 0;
    prev.addEventListener("click", () =>
      this.onPage(Math.max(0, resultsOffset - lastResults.query.limit)),
    );
    const next = document.createElement("button");
    next.textContent = "next ›";
    next.dataset.testid = "page-next";
    next.disabled = lastResults.instances.length < lastResults.query.limit;
    next.addEventListener("click", () => this.onPage(resultsOffset + lastResults.query.limit));
    pager.appendChild(prev);
    pager.appendChild(next);
    this.root.appendChild(pager);
  }

  displayedCount(): number {
    return this.root.querySelectorAll("[data-testid^='result-']").length -
      this.root.querySelectorAll("[data-testid^='result-detail-']").length;
  }
}
