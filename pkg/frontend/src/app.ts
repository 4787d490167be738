// Application shell: header with live progress, the triage queue, and the
// agreement dashboard, refreshed after every confirmed label.

import { ApiClient } from "./api";
import { renderDashboard } from "./dashboard";
import { formatCount, progressPercent } from "./format";
import { QueueView } from "./queue";

function el(tag: string, attrs: Record<string, string> = {}, text?: string): HTMLElement {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

export interface App {
  queue: QueueView;
  refresh: () => Promise<void>;
}

export async function initApp(root: HTMLElement, api: ApiClient): Promise<App> {
  root.textContent = "";
  const header = el("header", { class: "top" });
  const title = el("h1", {}, "ccemap review");
  const progressWrap = el("div", { class: "progress" });
  const progressBar = el("div", { class: "bar" });
  const progressFill = el("span", { class: "fill" });
  progressBar.appendChild(progressFill);
  const progressText = el("span", { class: "label", "data-testid": "progress-text" });
  progressWrap.appendChild(progressBar);
  progressWrap.appendChild(progressText);
  const annotator = el("input", {
    class: "annotator",
    value: "reviewer-ui",
    title: "annotator id recorded with every label",
    "data-testid": "annotator",
  }) as HTMLInputElement;

  const tabs = el("nav");
  const queueTab = el("button", { class: "tab active", "data-testid": "tab-queue" }, "Queue");
  const dashTab = el("button", { class: "tab", "data-testid": "tab-dashboard" }, "Dashboard");
  tabs.appendChild(queueTab);
  tabs.appendChild(dashTab);

  header.appendChild(title);
  header.appendChild(progressWrap);
  header.appendChild(annotator);
  header.appendChild(tabs);
  root.appendChild(header);

  const queueRoot = el("main", { id: "queue-view" });
  const dashRoot = el("section", { id: "dashboard-view", hidden: "" });
  root.appendChild(queueRoot);
  root.appendChild(dashRoot);

  queueTab.addEventListener("click", () => {
    queueRoot.removeAttribute("hidden");
    dashRoot.setAttribute("hidden", "");
    queueTab.classList.add("active");
    dashTab.classList.remove("active");
  });
  dashTab.addEventListener("click", () => {
    dashRoot.removeAttribute("hidden");
    queueRoot.setAttribute("hidden", "");
    dashTab.classList.add("active");
    queueTab.classList.remove("active");
  });

  async function refresh(): Promise<void> {
    const [progress, agreement] = await Promise.all([api.progress(), api.agreement()]);
    progressText.textContent =
      `${formatCount(progress.labeled)}/${formatCount(progress.total)} ` +
      `(${progressPercent(progress.labeled, progress.total)})`;
    progressFill.style.width = progressPercent(progress.labeled, progress.total);
    renderDashboard(dashRoot, agreement, progress);
  }

  const queue = new QueueView(queueRoot, api, {
    annotator: () => annotator.value || "reviewer-ui",
    onLabeled: () => void refresh(),
  });
  await queue.load(0);
  await refresh();
  return { queue, refresh };
}
