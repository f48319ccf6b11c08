import { ApiClient, ApiError } from "./api";
import { EditorView } from "./editor";
import { graphFromStartLink } from "./graphops";
import { MinimapView } from "./minimap";
import { ResultsView } from "./results";
import { SessionStore, decodeFragment, encodeFragment, initialState } from "./state";
import { TopicView } from "./topicView";
import type { GraphJson, Suggestion } from "./types";

export const EXECUTE_DEBOUNCE_MS = 300;
export const PAGE_SIZE = 12;

/**
 * Wires the four views together. Every edit validates first; only a valid
 * graph schedules a debounced execute (300 ms), and a newer edit aborts the
 * in-flight request (latest wins). The shareable session state mirrors into
 * the URL fragment after every change.
 */
export class App {
  readonly store: SessionStore;
  readonly topics: TopicView;
  readonly editor: EditorView;
  readonly results: ResultsView;
  readonly minimap: MinimapView;

  private debounceTimer: ReturnType<typeof setTimeout> | null = null;
  private inflight: AbortController | null = null;
  private pendingEdit: Promise<void> | null = null;
  executeError: string | null = null;

  constructor(
    readonly api: ApiClient,
    mounts: {
      topics: HTMLElement;
      editor: HTMLElement;
      results: HTMLElement;
      minimap: HTMLElement;
    },
    fragment?: string,
  ) {
    const restored = fragment ? decodeFragment(fragment) : null;
    this.store = new SessionStore(restored ?? initialState());
    this.topics = new TopicView(mounts.topics, this.store, api, (link) =>
      this.chooseStartLink(link),
    );
    this.editor = new EditorView(mounts.editor, this.store, api, (graph) =>
      this.submitEdit(graph),
    );
    this.results = new ResultsView(mounts.results, this.store, (offset) => {
      this.store.update({ resultsOffset: offset });
      this.scheduleExecute(0);
    });
    this.minimap = new MinimapView(mounts.minimap, this.store, api);
    this.store.subscribe(() => this.syncFragment());
  }

  async start(): Promise<void> {
    await Promise.all([this.topics.load(), this.minimap.load()]);
    const graph = this.store.state.currentGraph;
    if (graph) {
      // restored from a shared URL: re-derive everything displayed
      await this.editor.fillPrevalence(graph);
      await this.applyEdit(graph, { resetOffset: false });
    }
  }

  chooseStartLink(link: Suggestion): void {
    this.editor.recordSuggestions([link]);
    this.submitEdit(graphFromStartLink(link));
  }

  /** Fire-and-forget entry point for DOM handlers; settle() awaits it. */
  submitEdit(graph: GraphJson): void {
    this.pendingEdit = this.applyEdit(graph).finally(() => {
      this.pendingEdit = null;
    });
  }

  /** Validate; keep the graph either way so diagnostics can render; execute
   * only when valid. */
  async applyEdit(graph: GraphJson, opts: { resetOffset?: boolean } = {}): Promise<void> {
    const resetOffset = opts.resetOffset ?? true;
    const validation = await this.api.validate(graph);
    this.store.update({
      currentGraph: graph,
      lastDiagnostics: validation.diagnostics,
      ...(resetOffset ? { resultsOffset: 0 } : {}),
    });
    void this.minimap.refreshHighlights();
    if (validation.valid) {
      this.scheduleExecute();
    }
  }

  scheduleExecute(delayMs: number = EXECUTE_DEBOUNCE_MS): void {
    if (this.debounceTimer !== null) clearTimeout(this.debounceTimer);
    this.debounceTimer = setTimeout(() => {
      this.debounceTimer = null;
      void this.executeNow();
    }, delayMs);
  }

  async executeNow(): Promise<void> {
    const graph = this.store.state.currentGraph;
    if (!graph) return;
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    try {
      const response = await this.api.execute(
        graph,
        PAGE_SIZE,
        this.store.state.resultsOffset,
        controller.signal,
      );
      if (this.inflight === controller) {
        this.executeError = null;
        this.store.update({ lastResults: response });
      }
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") return;
      if (this.inflight === controller) {
        this.executeError = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
        this.store.update({
          lastResults: { query: { text: "", limit: PAGE_SIZE, offset: 0 }, count: 0, instances: [] },
        });
      }
    } finally {
      if (this.inflight === controller) this.inflight = null;
    }
  }

  /** Wait until no edit, debounce, or execute is in flight (test helper). */
  async settle(): Promise<void> {
    for (let guard = 0; guard < 200; guard++) {
      if (this.pendingEdit !== null) {
        await this.pendingEdit;
      } else if (this.debounceTimer !== null) {
        clearTimeout(this.debounceTimer);
        this.debounceTimer = null;
        await this.executeNow();
      } else if (this.inflight !== null) {
        await new Promise((resolve) => setTimeout(resolve, 10));
      } else {
        return;
      }
    }
    throw new Error("settle() never drained");
  }

  fragment(): string {
    return encodeFragment(this.store.state);
  }

  private syncFragment(): void {
    if (typeof window !== "undefined" && window.history?.replaceState) {
      window.history.replaceState(null, "", "#" + this.fragment());
    }
  }
}
