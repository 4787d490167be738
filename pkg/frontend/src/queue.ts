// Triage queue: server-filtered relation cards, keyboard-first labeling,
// optimistic submits with rollback, and client-side drafts that survive
// reloads and connection loss.

import { ApiClient, ApiError, FieldError, RelationDetail, RelationSummary } from "./api";
import { clearDraft, loadDraft, saveDraft } from "./drafts";
import { formatCount, formatScore } from "./format";

interface CardState {
  item: RelationSummary;
  detail: RelationDetail | null;
  draftLabel: string;
  errors: FieldError[];
}

export interface QueueOptions {
  annotator: () => string;
  onLabeled?: () => void;
  pageSize?: number;
}

const HOTKEY_LABELS: Record<string, string> = { y: "yes", n: "no", m: "maybe", a: "na" };

function el(tag: string, attrs: Record<string, string> = {}, text?: string): HTMLElement {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

export class QueueView {
  readonly root: HTMLElement;
  private api: ApiClient;
  private options: QueueOptions;
  private cards: CardState[] = [];
  private total = 0;
  private offset = 0;
  private focusIndex = 0;
  private filters: { label?: string; sr?: string; cce?: string } = {};
  private banner: HTMLElement;
  private list: HTMLElement;
  private pager: HTMLElement;
  private retryAction: (() => void) | null = null;
  private keyHandler: (event: KeyboardEvent) => void;

  constructor(root: HTMLElement, api: ApiClient, options: QueueOptions) {
    this.root = root;
    this.api = api;
    this.options = options;
    this.banner = el("div", { class: "banner", hidden: "", "data-testid": "retry-banner" });
    this.list = el("div", { class: "cards" });
    this.pager = el("div", { class: "pager" });
    this.root.appendChild(this.buildFilterBar());
    this.root.appendChild(this.banner);
    this.root.appendChild(this.list);
    this.root.appendChild(this.pager);
    this.keyHandler = (event) => this.handleKey(event);
    document.addEventListener("keydown", this.keyHandler);
  }

  detach(): void {
    document.removeEventListener("keydown", this.keyHandler);
  }

  private buildFilterBar(): HTMLElement {
    const bar = el("div", { class: "filters" });
    const select = el("select", { "data-testid": "filter-label" }) as HTMLSelectElement;
    for (const value of ["", "pending", "yes", "no", "maybe", "na"]) {
      const option = el("option", { value }, value || "all labels") as HTMLOptionElement;
      select.appendChild(option);
    }
    select.addEventListener("change", () => {
      this.filters.label = select.value || undefined;
      void this.load(0);
    });
    const sr = el("input", {
      placeholder: "filter SR (e.g. SR 5.2)",
      "data-testid": "filter-sr",
    }) as HTMLInputElement;
    sr.addEventListener("change", () => {
      this.filters.sr = sr.value || undefined;
      void this.load(0);
    });
    const cce = el("input", {
      placeholder: "filter CCE id",
      "data-testid": "filter-cce",
    }) as HTMLInputElement;
    cce.addEventListener("change", () => {
      this.filters.cce = cce.value || undefined;
      void this.load(0);
    });
    bar.appendChild(select);
    bar.appendChild(sr);
    bar.appendChild(cce);
    return bar;
  }

  async load(offset = this.offset): Promise<void> {
    try {
      const page = await this.api.listRelations({
        ...this.filters,
        offset,
        limit: this.options.pageSize ?? 50,
      });
      this.offset = page.offset;
      this.total = page.total;
      this.cards = page.items.map((item) => ({
        item,
        detail: null,
        draftLabel: loadDraft(item.cce_id, item.sr)?.label ?? "",
        errors: [],
      }));
      this.hideBanner();
      this.render();
      this.focusCard(0);
    } catch (error) {
      this.showBanner("Could not load the queue.", () => void this.load(offset));
    }
  }

  private render(): void {
    this.list.textContent = "";
    this.cards.forEach((card, index) => this.list.appendChild(this.renderCard(card, index)));
    this.pager.textContent = "";
    const prev = el("button", { "data-testid": "page-prev" }, "previous") as HTMLButtonElement;
    const next = el("button", { "data-testid": "page-next" }, "next") as HTMLButtonElement;
    const size = this.options.pageSize ?? 50;
    prev.disabled = this.offset === 0;
    next.disabled = this.offset + size >= this.total;
    prev.addEventListener("click", () => void this.load(Math.max(0, this.offset - size)));
    next.addEventListener("click", () => void this.load(this.offset + size));
    this.pager.appendChild(prev);
    this.pager.appendChild(
      el("span", { "data-testid": "page-info" }, `${formatCount(this.total)} relations`)
    );
    this.pager.appendChild(next);
  }

  private renderCard(card: CardState, index: number): HTMLElement {
    const { item } = card;
    const id = `${item.cce_id}|${item.sr}`;
    const box = el("article", {
      class: `card label-${item.label}` + (index === this.focusIndex ? " focused" : ""),
      "data-testid": `card-${id}`,
      tabindex: "-1",
    });
    const head = el("header");
    head.appendChild(el("b", {}, item.cce_id));
    head.appendChild(el("span", { class: "sr" }, ` ${item.sr}`));
    if (item.sr_theme) head.appendChild(el("i", { class: "theme" }, ` ${item.sr_theme}`));
    head.appendChild(
      el("span", { class: "score", "data-testid": `score-${id}` }, formatScore(item.score))
    );
    head.appendChild(el("span", { class: "rank" }, `#${item.rank}`));
    head.appendChild(
      el("span", { class: `chip chip-${item.label}`, "data-testid": `label-${id}` }, item.label)
    );
    box.appendChild(head);

    const detail = el("div", { class: "detail", "data-testid": `detail-${id}` });
    if (card.detail?.attributes) {
      const table = el("table", { class: "attributes" });
      for (const [key, value] of Object.entries(card.detail.attributes)) {
        const row = el("tr");
        row.appendChild(el("th", {}, key));
        row.appendChild(el("td", {}, value));
        table.appendChild(row);
      }
      detail.appendChild(table);
    }
    if (card.detail && card.detail.history.length) {
      const history = el("ul", { class: "history" });
      for (const entry of card.detail.history) {
        history.appendChild(
          el("li", {}, `${entry.at} ${entry.annotator}: ${entry.label} (${entry.explanation})`)
        );
      }
      detail.appendChild(history);
    }
    box.appendChild(detail);

    const form = el("div", { class: "labeling" });
    for (const label of ["yes", "no", "maybe", "na"]) {
      const button = el(
        "button",
        {
          class: "label-pick" + (card.draftLabel === label ? " picked" : ""),
          "data-testid": `pick-${label}-${id}`,
        },
        label
      ) as HTMLButtonElement;
      button.addEventListener("click", () => {
        this.focusCard(index);
        this.setDraftLabel(label);
      });
      form.appendChild(button);
    }
    const explanation = el("textarea", {
      placeholder: "explanation (required for yes/no/maybe)",
      "data-testid": `explanation-${id}`,
    }) as HTMLTextAreaElement;
    explanation.value = loadDraft(item.cce_id, item.sr)?.explanation ?? "";
    explanation.addEventListener("input", () => {
      saveDraft(item.cce_id, item.sr, {
        label: card.draftLabel,
        explanation: explanation.value,
      });
      submit.disabled = this.submitDisabled(card, explanation.value);
    });
    explanation.addEventListener("keydown", (event) => {
      if (event.key === "Enter" && !event.shiftKey) {
        event.preventDefault();
        void this.submit();
      } else if (event.key === "Escape") {
        explanation.blur();
      }
    });
    const submit = el(
      "button",
      { class: "submit", "data-testid": `submit-${id}` },
      "submit"
    ) as HTMLButtonElement;
    submit.disabled = this.submitDisabled(card, explanation.value);
    submit.addEventListener("click", () => {
      this.focusCard(index);
      void this.submit();
    });
    const errors = el("div", { class: "errors", "data-testid": `errors-${id}` });
    for (const err of card.errors) {
      errors.appendChild(el("p", { class: "error" }, `${err.field}: ${err.message}`));
    }
    form.appendChild(explanation);
    form.appendChild(submit);
    form.appendChild(errors);
    box.appendChild(form);
    return box;
  }

  private submitDisabled(card: CardState, explanation: string): boolean {
    if (!card.draftLabel) return true;
    if (card.draftLabel !== "na" && explanation.trim() === "") return true;
    return false;
  }

  private card(): CardState | null {
    return this.cards[this.focusIndex] ?? null;
  }

  private explanationBox(card: CardState): HTMLTextAreaElement | null {
    const id = `${card.item.cce_id}|${card.item.sr}`;
    return this.list.querySelector(`[data-testid="explanation-${id}"]`);
  }

  focusCard(index: number): void {
    if (index < 0 || index >= this.cards.length) return;
    this.focusIndex = index;
    this.list.querySelectorAll(".card").forEach((node, i) => {
      node.classList.toggle("focused", i === index);
    });
    const card = this.card();
    if (card && !card.detail) {
      void this.api
        .getRelation(card.item.cce_id, card.item.sr)
        .then((detail) => {
          card.detail = detail;
          this.rerenderCard(card);
        })
        .catch(() => undefined); // detail is cosmetic; the card still works
    }
  }

  private rerenderCard(card: CardState): void {
    const index = this.cards.indexOf(card);
    if (index < 0) return;
    const id = `${card.item.cce_id}|${card.item.sr}`;
    const existing = this.list.querySelector(`[data-testid="card-${id}"]`);
    if (existing) {
      const draft = loadDraft(card.item.cce_id, card.item.sr);
      const replacement = this.renderCard(card, index);
      existing.replaceWith(replacement);
      if (draft) {
        const box = this.explanationBox(card);
        if (box) box.value = draft.explanation;
      }
    }
  }

  setDraftLabel(label: string): void {
    const card = this.card();
    if (!card) return;
    card.draftLabel = label;
    const box = this.explanationBox(card);
    saveDraft(card.item.cce_id, card.item.sr, {
      label,
      explanation: box?.value ?? "",
    });
    this.rerenderCard(card);
  }

  async submit(): Promise<void> {
    const card = this.card();
    if (!card) return;
    const box = this.explanationBox(card);
    const explanation = box?.value ?? "";
    card.errors = [];
    // client-side validation mirrors the server's rules
    if (!card.draftLabel) {
      card.errors = [{ field: "label", message: "pick yes, no, maybe, or na first" }];
      this.rerenderCard(card);
      return;
    }
    if (card.draftLabel !== "na" && explanation.trim() === "") {
      card.errors = [
        { field: "explanation", message: `label '${card.draftLabel}' requires an explanation` },
      ];
      this.rerenderCard(card);
      return;
    }
    const annotator = this.options.annotator();
    const previous = card.item;
    // optimistic update
    card.item = { ...previous, label: card.draftLabel, explanation };
    this.rerenderCard(card);
    try {
      const confirmed = await this.api.submitLabel(previous.cce_id, previous.sr, {
        label: card.draftLabel,
        explanation,
        annotator,
      });
      card.item = confirmed;
      card.detail = confirmed;
      card.draftLabel = "";
      card.errors = [];
      clearDraft(previous.cce_id, previous.sr);
      this.hideBanner();
      this.rerenderCard(card);
      this.options.onLabeled?.();
      this.focusNextPending();
    } catch (error) {
      card.item = previous; // revert the optimistic update
      if (error instanceof ApiError) {
        card.errors = error.fieldErrors.length
          ? error.fieldErrors
          : [{ field: "submit", message: error.message }];
        this.rerenderCard(card);
      } else {
        // network failure: draft stays in storage, offer a retry
        saveDraft(previous.cce_id, previous.sr, { label: card.draftLabel, explanation });
        this.rerenderCard(card);
        const restore = this.explanationBox(card);
        if (restore) restore.value = explanation;
        this.showBanner("Connection lost; your draft is saved.", () => void this.submit());
      }
    }
  }

  focusNextPending(): void {
    for (let step = 1; step <= this.cards.length; step += 1) {
      const index = (this.focusIndex + step) % this.cards.length;
      if (this.cards[index].item.label === "pending") {
        this.focusCard(index);
        return;
      }
    }
  }

  private showBanner(message: string, retry: () => void): void {
    this.retryAction = retry;
    this.banner.textContent = "";
    this.banner.appendChild(el("span", {}, message));
    const button = el("button", { "data-testid": "retry-button" }, "retry") as HTMLButtonElement;
    button.addEventListener("click", () => {
      this.retryAction?.();
    });
    this.banner.appendChild(button);
    this.banner.removeAttribute("hidden");
  }

  private hideBanner(): void {
    this.retryAction = null;
    this.banner.setAttribute("hidden", "");
  }

  handleKey(event: KeyboardEvent): void {
    const target = event.target as HTMLElement | null;
    if (target && (target.tagName === "TEXTAREA" || target.tagName === "INPUT")) {
      return; // the textarea has its own Enter/Escape handling
    }
    if (event.key in HOTKEY_LABELS) {
      event.preventDefault();
      this.setDraftLabel(HOTKEY_LABELS[event.key]);
    } else if (event.key === "Enter") {
      event.preventDefault();
      void this.submit();
    } else if (event.key === "j" || event.key === "ArrowDown") {
      event.preventDefault();
      this.focusCard(this.focusIndex + 1);
    } else if (event.key === "k" || event.key === "ArrowUp") {
      event.preventDefault();
      this.focusCard(this.focusIndex - 1);
    } else if (event.key === "e") {
      event.preventDefault();
      const card = this.card();
      if (card) this.explanationBox(card)?.focus();
    }
  }
}
