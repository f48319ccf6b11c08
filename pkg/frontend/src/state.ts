import type { Diagnostic, ExecuteResponse, GraphJson } from "./types";

export interface MinimapCamera {
  yawDeg: number;
  pitchDeg: number;
  zoom: number;
}

export const DEFAULT_CAMERA: MinimapCamera = { yawDeg: 30, pitchDeg: 55, zoom: 1 };

/**
 * All user-visible state. The shareable part (topic selection, current
 * graph, camera) round-trips through the URL fragment; results and
 * diagnostics are re-derived from the API after a reload.
 */
export interface UiSessionState {
  selectedTopicIds: number[];
  currentGraph: GraphJson | null;
  lastResults: ExecuteResponse | null;
  lastDiagnostics: Diagnostic[];
  minimapCamera: MinimapCamera;
  resultsOffset: number;
}

export function initialState(): UiSessionState {
  return {
    selectedTopicIds: [],
    currentGraph: null,
    lastResults: null,
    lastDiagnostics: [],
    minimapCamera: { ...DEFAULT_CAMERA },
    resultsOffset: 0,
  };
}

interface FragmentPayload {
  t: number[];
  g: GraphJson | null;
  c: MinimapCamera;
  o: number;
}

function toBase64Url(text: string): string {
  const bytes = new TextEncoder().encode(text);
  let binary = "";
  for (const b of bytes) binary += String.fromCharCode(b);
  return btoa(binary).replace(/\+/g, "-").replace(/\//g, "_").replace(/=+$/, "");
}

function fromBase64Url(encoded: string): string {
  const padded = encoded.replace(/-/g, "+").replace(/_/g, "/");
  const binary = atob(padded + "=".repeat((4 - (padded.length % 4)) % 4));
  const bytes = Uint8Array.from(binary, (ch) => ch.charCodeAt(0));
  return new TextDecoder().decode(bytes);
}

/** Serialize the shareable session state into a URL fragment value. */
export function encodeFragment(state: UiSessionState): string {
  const payload: FragmentPayload = {
    t: state.selectedTopicIds,
    g: state.currentGraph,
    c: state.minimapCamera,
    o: state.resultsOffset,
  };
  return "s=" + toBase64Url(JSON.stringify(payload));
}

/** Restore the shareable parts; returns null for absent/garbled fragments. */
export function decodeFragment(fragment: string): UiSessionState | null {
  const raw = fragment.startsWith("#") ? fragment.slice(1) : fragment;
  if (!raw.startsWith("s=")) return null;
  try {
    const payload = JSON.parse(fromBase64Url(raw.slice(2))) as FragmentPayload;
    if (!Array.isArray(payload.t)) return null;
    return {
      selectedTopicIds: payload.t,
      currentGraph: payload.g ?? null,
      lastResults: null,
      lastDiagnostics: [],
      minimapCamera: payload.c ?? { ...DEFAULT_CAMERA },
      resultsOffset: payload.o ?? 0,
    };
  } catch {
    return null;
  }
}

export type Listener = () => void;

/** Minimal store: mutate through update() so views re-render consistently. */
export class SessionStore {
  state: UiSessionState;
  private listeners: Listener[] = [];

  constructor(state?: UiSessionState) {
    this.state = state ?? initialState();
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  update(patch: Partial<UiSessionState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of [...this.listeners]) listener();
  }
}
