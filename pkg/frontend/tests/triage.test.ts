// Keyboard-only triage: label all ten fixture relations through the full
// app without a single pointer event, then check the live progress line.

import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { initApp, App } from "../src/app";
import { FakeServer, flush } from "./helpers";

import relationsPending from "./fixtures/relations_pending.json";

let server: FakeServer;
let app: App;
let pointerEvents: number;

function key(target: EventTarget, value: string): void {
  target.dispatchEvent(
    new KeyboardEvent("keydown", { key: value, bubbles: true, cancelable: true })
  );
}

function focusedCard(): HTMLElement {
  const node = document.querySelector(".card.focused");
  if (!node) throw new Error("no focused card");
  return node as HTMLElement;
}

beforeEach(async () => {
  localStorage.clear();
  document.body.innerHTML = '<div id="app"></div>';
  server = new FakeServer();
  pointerEvents = 0;
  for (const type of ["click", "mousedown", "mouseup", "pointerdown"]) {
    document.addEventListener(type, () => (pointerEvents += 1), true);
  }
  app = await initApp(document.getElementById("app") as HTMLElement, new ApiClient(server.fetch));
  await flush();
});

afterEach(() => {
  app.queue.detach();
});

describe("keyboard triage", () => {
  it("labels all ten fixture relations without pointer input", async () => {
    const plan = ["y", "n", "m", "y", "y", "n", "m", "y", "n", "y"];
    const expected: Record<string, string> = { y: "yes", n: "no", m: "maybe" };

    for (let i = 0; i < plan.length; i += 1) {
      const card = focusedCard();
      const id = card.getAttribute("data-testid")!.replace(/^card-/, "");
      key(document, plan[i]); // y/n/m picks the label on the focused card
      await flush();
      key(document, "e"); // move focus into the explanation box
      const box = document.querySelector(
        `[data-testid="explanation-${id}"]`
      ) as HTMLTextAreaElement;
      box.value = `assessment ${i + 1}`; // keyboard entry
      box.dispatchEvent(new Event("input", { bubbles: true }));
      key(box, "Enter"); // submit from the textarea
      await flush();
      await flush();
      expect(server.relations.get(id)?.label).toBe(expected[plan[i]]);
    }

    expect(server.posts.length).toBe(10);
    expect(pointerEvents).toBe(0);
    const labels = [...server.relations.values()].map((rel) => rel.label);
    expect(labels.filter((l) => l === "pending")).toHaveLength(0);
    expect(relationsPending.items).toHaveLength(10);

    const progress = document.querySelector('[data-testid="progress-text"]');
    expect(progress?.textContent).toBe("10/10 (100%)");
  });

  it("navigates between cards with j and k", async () => {
    const first = focusedCard().getAttribute("data-testid");
    key(document, "j");
    await flush();
    const second = focusedCard().getAttribute("data-testid");
    expect(second).not.toBe(first);
    key(document, "k");
    await flush();
    expect(focusedCard().getAttribute("data-testid")).toBe(first);
  });

  it("shows 40% progress once two of five relations are labeled", async () => {
    // trim the fake store to five relations, two already labeled
    const keys = [...server.relations.keys()];
    for (const extra of keys.slice(5)) server.relations.delete(extra);
    const remaining = [...server.relations.values()];
    for (const rel of remaining.slice(0, 2)) {
      rel.label = "yes";
      rel.explanation = "done";
      rel.annotator = "x";
    }
    await app.refresh();
    const progress = document.querySelector('[data-testid="progress-text"]');
    expect(progress?.textContent).toBe("2/5 (40%)");
  });
});
