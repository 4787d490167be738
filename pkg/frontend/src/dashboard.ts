// Agreement and progress panels. Every number on this view is taken
// verbatim from the API payloads and run through the shared formatters;
// the dashboard never aggregates, sums, or rederives statistics.

import { AgreementReport, Progress } from "./api";
import { format3, formatCount } from "./format";

function el(tag: string, attrs: Record<string, string> = {}, text?: string): HTMLElement {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function matrixTable(report: AgreementReport): HTMLElement {
  const labels = report.labels ?? [];
  const table = el("table", { class: "matrix", "data-testid": "confusion-matrix" });
  const head = el("tr");
  head.appendChild(el("th", {}, "human \\ second"));
  for (const label of labels) head.appendChild(el("th", {}, label));
  head.appendChild(el("th", { class: "totals" }, "total"));
  table.appendChild(head);
  const matrix = report.matrix ?? [];
  labels.forEach((rowLabel, i) => {
    const row = el("tr");
    row.appendChild(el("th", {}, rowLabel));
    labels.forEach((colLabel, j) => {
      row.appendChild(
        el(
          "td",
          { "data-testid": `cell-${rowLabel}-${colLabel}` },
          formatCount(matrix[i][j])
        )
      );
    });
    row.appendChild(
      el(
        "td",
        { class: "totals", "data-testid": `human-total-${rowLabel}` },
        formatCount(report.human_totals?.[rowLabel] ?? 0)
      )
    );
    table.appendChild(row);
  });
  const totals = el("tr");
  totals.appendChild(el("th", { class: "totals" }, "total"));
  for (const label of labels) {
    totals.appendChild(
      el(
        "td",
        { class: "totals", "data-testid": `source-total-${label}` },
        formatCount(report.source_totals?.[label] ?? 0)
      )
    );
  }
  totals.appendChild(el("td", { class: "totals" }, ""));
  table.appendChild(totals);
  return table;
}

export function renderDashboard(
  root: HTMLElement,
  agreement: AgreementReport,
  progress: Progress
): void {
  root.textContent = "";

  const distribution = el("div", { class: "panel" });
  distribution.appendChild(el("h3", {}, "Labels"));
  const counters = el("div", { class: "counters" });
  for (const [label, count] of Object.entries(progress.by_label)) {
    const box = el("span", { class: `counter label-${label}` });
    box.appendChild(el("b", { "data-testid": `count-${label}` }, formatCount(count)));
    box.appendChild(el("i", {}, ` ${label}`));
    counters.appendChild(box);
  }
  distribution.appendChild(counters);
  distribution.appendChild(
    el(
      "p",
      {},
      `${formatCount(progress.labeled)} of ${formatCount(progress.total)} relations labeled; ` +
        `${formatCount(progress.unmapped_targets)} targets without proposals`
    )
  );
  root.appendChild(distribution);

  const panel = el("div", { class: "panel" });
  panel.appendChild(el("h3", {}, "Agreement"));
  if (!agreement.available) {
    panel.appendChild(
      el(
        "p",
        { class: "guidance", "data-testid": "agreement-guidance" },
        "No second label source imported yet. Import one with " +
          "`ccemap review import-second` to compare assessments. " +
          `(${agreement.reason ?? ""})`
      )
    );
    root.appendChild(panel);
    return;
  }

  panel.appendChild(
    el("p", {}, `second source: ${agreement.source} over ${formatCount(agreement.total ?? 0)} relations`)
  );
  const overall = el("p", { class: "big" });
  overall.appendChild(el("span", {}, "overall agreement "));
  overall.appendChild(
    el("b", { "data-testid": "overall-agreement" }, format3(agreement.overall ?? 0))
  );
  panel.appendChild(overall);

  const perLabel = el("ul", { class: "per-label" });
  for (const label of agreement.labels ?? []) {
    const value = agreement.per_label?.[label];
    const item = el("li");
    item.appendChild(el("span", {}, `${label}: `));
    item.appendChild(
      el(
        "b",
        { "data-testid": `agreement-${label}` },
        value === null || value === undefined ? "n/a" : format3(value)
      )
    );
    perLabel.appendChild(item);
  }
  panel.appendChild(perLabel);
  panel.appendChild(matrixTable(agreement));

  const disagree = el("div", { class: "panel" });
  disagree.appendChild(el("h3", {}, "Most disputed requirements"));
  const list = el("table", { class: "per-sr", "data-testid": "per-sr" });
  const head = el("tr");
  for (const title of ["SR", "disagreement", "count"]) head.appendChild(el("th", {}, title));
  list.appendChild(head);
  for (const row of agreement.per_sr ?? []) {
    const tr = el("tr");
    tr.appendChild(el("td", {}, row.sr));
    tr.appendChild(el("td", { "data-testid": `sr-rate-${row.sr}` }, format3(row.rate)));
    tr.appendChild(el("td", {}, `${formatCount(row.disagreements)}/${formatCount(row.total)}`));
    list.appendChild(tr);
  }
  disagree.appendChild(list);

  root.appendChild(panel);
  root.appendChild(disagree);
}
