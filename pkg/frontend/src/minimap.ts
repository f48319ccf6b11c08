import type { ApiClient } from "./api";
import { localName } from "./graphops";
import type { SessionStore } from "./state";
import type { CircleJson, MinimapResponse } from "./types";

const SVG_NS = "http://www.w3.org/2000/svg";

/**
 * Ontology overview: the packed circles of the class hierarchy, extruded by
 * hierarchy depth along an isometric third axis. Dragging orbits (yaw),
 * shift-drag tilts (pitch), the wheel zooms; highlighted circles mark the
 * classes of the current prototype graph.
 */
export class MinimapView {
  private layout: MinimapResponse | null = null;
  private highlighted = new Set<string>();

  constructor(
    private readonly root: HTMLElement,
    private readonly store: SessionStore,
    private readonly api: ApiClient,
  ) {
    this.store.subscribe(() => this.render());
  }

  async load(): Promise<void> {
    this.layout = await this.api.minimap();
    this.render();
  }

  async refreshHighlights(): Promise<void> {
    const graph = this.store.state.currentGraph;
    if (!graph) {
      this.highlighted = new Set();
      this.render();
      return;
    }
    try {
      const response = await this.api.highlight(graph);
      this.highlighted = new Set(response.highlights.map((h) => h.classIri));
    } catch {
      this.highlighted = new Set();
    }
    this.render();
  }

  private project(circle: CircleJson): { cx: number; cy: number; rx: number; ry: number } {
    const { yawDeg, pitchDeg, zoom } = this.store.state.minimapCamera;
    const yaw = (yawDeg * Math.PI) / 180;
    const pitch = (pitchDeg * Math.PI) / 180;
    const extrusion = 14;
    const rotatedX = circle.x * Math.cos(yaw) - circle.y * Math.sin(yaw);
    const rotatedY = circle.x * Math.sin(yaw) + circle.y * Math.cos(yaw);
    return {
      cx: zoom * rotatedX,
      cy: zoom * (rotatedY * Math.cos(pitch) - circle.depth * extrusion),
      rx: zoom * circle.radius,
      ry: zoom * circle.radius * Math.cos(pitch),
    };
  }

  render(): void {
    this.root.innerHTML = "";
    if (!this.layout) return;
    const svg = document.createElementNS(SVG_NS, "svg");
    svg.dataset.testid = "minimap";
    const circles = [...this.layout.circles].sort((a, b) => a.depth - b.depth);

    let minX = Infinity;
    let minY = Infinity;
    let maxX = -Infinity;
    let maxY = -Infinity;
    const projected = circles.map((circle) => {
      const p = this.project(circle);
      minX = Math.min(minX, p.cx - p.rx);
      maxX = Math.max(maxX, p.cx + p.rx);
      minY = Math.min(minY, p.cy - p.ry);
      maxY = Math.max(maxY, p.cy + p.ry);
      return { circle, p };
    });
    if (projected.length === 0) return;
    const pad = 10;
    svg.setAttribute(
      "viewBox",
      `${minX - pad} ${minY - pad} ${maxX - minX + 2 * pad} ${maxY - minY + 2 * pad}`,
    );
    svg.setAttribute("width", "320");
    svg.setAttribute("height", "260");

    for (const { circle, p } of projected) {
      const ellipse = document.createElementNS(SVG_NS, "ellipse");
      ellipse.setAttribute("cx", p.cx.toFixed(2));
      ellipse.setAttribute("cy", p.cy.toFixed(2));
      ellipse.setAttribute("rx", p.rx.toFixed(2));
      ellipse.setAttribute("ry", p.ry.toFixed(2));
      const lit = this.highlighted.has(circle.classIri);
      ellipse.setAttribute("fill", lit ? "rgba(220,120,40,0.55)" : "rgba(90,110,160,0.12)");
      ellipse.setAttribute("stroke", lit ? "#b35c10" : "#8894b8");
      ellipse.dataset.testid = `circle-${circle.classIri}`;
      ellipse.dataset.highlighted = String(lit);
      const title = document.createElementNS(SVG_NS, "title");
      title.textContent = `${localName(circle.classIri)} (depth ${circle.depth})`;
      ellipse.appendChild(title);
      svg.appendChild(ellipse);
    }

    let dragging = false;
    let lastX = 0;
    let lastY = 0;
    svg.addEventListener("pointerdown", (event) => {
      dragging = true;
      lastX = event.clientX;
      lastY = event.clientY;
    });
    svg.addEventListener("pointerup", () => {
      dragging = false;
    });
    svg.addEventListener("pointermove", (event) => {
      if (!dragging) return;
      const camera = this.store.state.minimapCamera;
      const dx = event.clientX - lastX;
      const dy = event.clientY - lastY;
      lastX = event.clientX;
      lastY = event.clientY;
      if (event.shiftKey) {
        this.store.update({
          minimapCamera: {
            ...camera,
            pitchDeg: Math.min(85, Math.max(5, camera.pitchDeg + dy / 2)),
          },
        });
      } else {
        this.store.update({
          minimapCamera: { ...camera, yawDeg: (camera.yawDeg + dx / 2) % 360 },
        });
      }
    });
    svg.addEventListener("wheel", (event) => {
      event.preventDefault();
      const camera = this.store.state.minimapCamera;
      const factor = event.deltaY < 0 ? 1.1 : 1 / 1.1;
      this.store.update({
        minimapCamera: {
          ...camera,
          zoom: Math.min(8, Math.max(0.2, camera.zoom * factor)),
        },
      });
    });

    this.root.appendChild(svg);
  }

  highlightedIris(): string[] {
    return [...this.root.querySelectorAll<SVGElement>("[data-highlighted='true']")].map(
      (el) => el.dataset.testid!.replace("circle-", ""),
    );
  }
}
