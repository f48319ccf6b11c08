import type { ApiClient } from "./api";
import { ApiError } from "./api";
import type { SessionStore } from "./state";
import type { Suggestion, TopicRow } from "./types";

/**
 * Topic forest with multi-select; confirming queries /suggest/start-links
 * and hands the list to the caller. API failures render an inline banner
 * with a retry button.
 */
export class TopicView {
  private topics: TopicRow[] = [];
  private error: string | null = null;
  private suggestions: Suggestion[] = [];

  constructor(
    private readonly root: HTMLElement,
    private readonly store: SessionStore,
    private readonly api: ApiClient,
    private readonly onStartLink: (link: Suggestion) => void,
  ) {
    this.store.subscribe(() => this.render());
  }

  async load(): Promise<void> {
    try {
      const response = await this.api.topics();
      this.topics = response.topics;
      this.error = null;
    } catch (err) {
      this.error = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    }
    this.render();
  }

  async confirm(): Promise<void> {
    const ids = this.store.state.selectedTopicIds;
    if (ids.length === 0) return;
    try {
      const response = await this.api.startLinks(ids);
      this.suggestions = response.suggestions;
      this.error = null;
    } catch (err) {
      this.error = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    }
    this.render();
  }

  toggle(topicId: number): void {
    const current = this.store.state.selectedTopicIds;
    const next = current.includes(topicId)
      ? current.filter((id) => id !== topicId)
      : [...current, topicId].sort((a, b) => a - b);
    this.store.update({ selectedTopicIds: next });
  }

  render(): void {
    const selected = new Set(this.store.state.selectedTopicIds);
    this.root.innerHTML = "";

    if (this.error) {
      const banner = document.createElement("div");
      banner.className = "error-banner";
      banner.dataset.testid = "topic-error";
      banner.textContent = this.error;
      const retry = document.createElement("button");
      retry.textContent = "Retry";
      retry.addEventListener("click", () => void this.load().then(() => this.confirm()));
      banner.appendChild(retry);
      this.root.appendChild(banner);
    }

    const list = document.createElement("ul");
    list.className = "topic-list";
    const byParent = new Map<number | null, TopicRow[]>();
    for (const topic of this.topics) {
      const key = topic.parentTopicId;
      byParent.set(key, [...(byParent.get(key) ?? []), topic]);
    }
    const renderLevel = (parent: number | null, depth: number) => {
      for (const topic of byParent.get(parent) ?? []) {
        const item = document.createElement("li");
        item.style.marginLeft = `${depth}em`;
        const label = document.createElement("label");
        label.title = topic.keywords.map(([term]) => term).join(", ");
        const box = document.createElement("input");
        box.type = "checkbox";
        box.checked = selected.has(topic.id);
        box.dataset.testid = `topic-${topic.id}`;
        box.addEventListener("change", () => this.toggle(topic.id));
        label.appendChild(box);
        label.appendChild(document.createTextNode(` ${topic.label} (${topic.size})`));
        item.appendChild(label);
        list.appendChild(item);
        renderLevel(topic.id, depth + 1);
      }
    };
    renderLevel(null, 0);
    this.root.appendChild(list);

    const confirm = document.createElement("button");
    confirm.textContent = "Find start links";
    confirm.dataset.testid = "confirm-topics";
    confirm.disabled = selected.size === 0;
    confirm.addEventListener("click", () => void this.confirm());
    this.root.appendChild(confirm);

    if (this.suggestions.length > 0) {
      const links = document.createElement("ol");
      links.dataset.testid = "start-links";
      for (const suggestion of this.suggestions) {
        const item = document.createElement("li");
        const button = document.createElement("button");
        button.dataset.testid = `start-link-${suggestion.propertyIri}`;
        button.textContent =
          `${suggestion.label} (${suggestion.score.toFixed(3)}` +
          (suggestion.prevalence === null ? ")" : `, ${suggestion.prevalence} uses)`);
        button.addEventListener("click", () => this.onStartLink(suggestion));
        item.appendChild(button);
        links.appendChild(item);
      }
      this.root.appendChild(links);
    }
  }

  /** Exposed for contract tests: the rendering order of the ranking. */
  displayedStartLinkIris(): string[] {
    return [...this.root.querySelectorAll<HTMLElement>("[data-testid^='start-link-']")].map(
      (el) => el.dataset.testid!.replace("start-link-", ""),
    );
  }
}
