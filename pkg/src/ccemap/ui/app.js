//#region src/api.ts
var ApiError = class extends Error {
	constructor(status, message, fieldErrors = []) {
		super(message);
		this.status = status;
		this.fieldErrors = fieldErrors;
	}
};
const API = "/api/v1";
var ApiClient = class {
	constructor(fetchFn, base = "") {
		this.fetchFn = fetchFn ?? ((input, init) => globalThis.fetch(input, init));
		this.base = base;
	}
	async request(path, init) {
		const response = await this.fetchFn(this.base + API + path, init);
		if (!response.ok) {
			let detail = null;
			try {
				detail = (await response.json()).detail;
			} catch {}
			if (Array.isArray(detail)) {
				const fields = detail.filter((d) => typeof d === "object" && d !== null && "field" in d);
				throw new ApiError(response.status, "validation failed", fields);
			}
			throw new ApiError(response.status, String(detail ?? response.status));
		}
		return await response.json();
	}
	session() {
		return this.request("/session");
	}
	progress() {
		return this.request("/progress");
	}
	agreement() {
		return this.request("/agreement");
	}
	listRelations(params = {}) {
		const query = new URLSearchParams();
		for (const [key, value] of Object.entries(params)) if (value !== void 0 && value !== "") query.set(key, String(value));
		const suffix = query.toString() ? `?${query.toString()}` : "";
		return this.request(`/relations${suffix}`);
	}
	getRelation(cceId, sr) {
		return this.request(`/relations/${encodeURIComponent(cceId)}/${encodeURIComponent(sr)}`);
	}
	submitLabel(cceId, sr, body) {
		return this.request(`/relations/${encodeURIComponent(cceId)}/${encodeURIComponent(sr)}/label`, {
			method: "POST",
			headers: { "Content-Type": "application/json" },
			body: JSON.stringify(body)
		});
	}
};
//#endregion
//#region src/format.ts
function format3(value) {
	return value.toFixed(3);
}
function formatScore(value) {
	return format3(value);
}
function formatCount(value) {
	return String(value);
}
function progressPercent(labeled, total) {
	if (total === 0) return "0%";
	return `${Math.round(labeled / total * 100)}%`;
}
//#endregion
//#region src/dashboard.ts
function el$2(tag, attrs = {}, text) {
	const node = document.createElement(tag);
	for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
	if (text !== void 0) node.textContent = text;
	return node;
}
function matrixTable(report) {
	const labels = report.labels ?? [];
	const table = el$2("table", {
		class: "matrix",
		"data-testid": "confusion-matrix"
	});
	const head = el$2("tr");
	head.appendChild(el$2("th", {}, "human \\ second"));
	for (const label of labels) head.appendChild(el$2("th", {}, label));
	head.appendChild(el$2("th", { class: "totals" }, "total"));
	table.appendChild(head);
	const matrix = report.matrix ?? [];
	labels.forEach((rowLabel, i) => {
		const row = el$2("tr");
		row.appendChild(el$2("th", {}, rowLabel));
		labels.forEach((colLabel, j) => {
			row.appendChild(el$2("td", { "data-testid": `cell-${rowLabel}-${colLabel}` }, formatCount(matrix[i][j])));
		});
		row.appendChild(el$2("td", {
			class: "totals",
			"data-testid": `human-total-${rowLabel}`
		}, formatCount(report.human_totals?.[rowLabel] ?? 0)));
		table.appendChild(row);
	});
	const totals = el$2("tr");
	totals.appendChild(el$2("th", { class: "totals" }, "total"));
	for (const label of labels) totals.appendChild(el$2("td", {
		class: "totals",
		"data-testid": `source-total-${label}`
	}, formatCount(report.source_totals?.[label] ?? 0)));
	totals.appendChild(el$2("td", { class: "totals" }, ""));
	table.appendChild(totals);
	return table;
}
function renderDashboard(root, agreement, progress) {
	root.textContent = "";
	const distribution = el$2("div", { class: "panel" });
	distribution.appendChild(el$2("h3", {}, "Labels"));
	const counters = el$2("div", { class: "counters" });
	for (const [label, count] of Object.entries(progress.by_label)) {
		const box = el$2("span", { class: `counter label-${label}` });
		box.appendChild(el$2("b", { "data-testid": `count-${label}` }, formatCount(count)));
		box.appendChild(el$2("i", {}, ` ${label}`));
		counters.appendChild(box);
	}
	distribution.appendChild(counters);
	distribution.appendChild(el$2("p", {}, `${formatCount(progress.labeled)} of ${formatCount(progress.total)} relations labeled; ${formatCount(progress.unmapped_targets)} targets without proposals`));
	root.appendChild(distribution);
	const panel = el$2("div", { class: "panel" });
	panel.appendChild(el$2("h3", {}, "Agreement"));
	if (!agreement.available) {
		panel.appendChild(el$2("p", {
			class: "guidance",
			"data-testid": "agreement-guidance"
		}, `No second label source imported yet. Import one with \`ccemap review import-second\` to compare assessments. (${agreement.reason ?? ""})`));
		root.appendChild(panel);
		return;
	}
	panel.appendChild(el$2("p", {}, `second source: ${agreement.source} over ${formatCount(agreement.total ?? 0)} relations`));
	const overall = el$2("p", { class: "big" });
	overall.appendChild(el$2("span", {}, "overall agreement "));
	overall.appendChild(el$2("b", { "data-testid": "overall-agreement" }, format3(agreement.overall ?? 0)));
	panel.appendChild(overall);
	const perLabel = el$2("ul", { class: "per-label" });
	for (const label of agreement.labels ?? []) {
		const value = agreement.per_label?.[label];
		const item = el$2("li");
		item.appendChild(el$2("span", {}, `${label}: `));
		item.appendChild(el$2("b", { "data-testid": `agreement-${label}` }, value === null || value === void 0 ? "n/a" : format3(value)));
		perLabel.appendChild(item);
	}
	panel.appendChild(perLabel);
	panel.appendChild(matrixTable(agreement));
	const disagree = el$2("div", { class: "panel" });
	disagree.appendChild(el$2("h3", {}, "Most disputed requirements"));
	const list = el$2("table", {
		class: "per-sr",
		"data-testid": "per-sr"
	});
	const head = el$2("tr");
	for (const title of [
		"SR",
		"disagreement",
		"count"
	]) head.appendChild(el$2("th", {}, title));
	list.appendChild(head);
	for (const row of agreement.per_sr ?? []) {
		const tr = el$2("tr");
		tr.appendChild(el$2("td", {}, row.sr));
		tr.appendChild(el$2("td", { "data-testid": `sr-rate-${row.sr}` }, format3(row.rate)));
		tr.appendChild(el$2("td", {}, `${formatCount(row.disagreements)}/${formatCount(row.total)}`));
		list.appendChild(tr);
	}
	disagree.appendChild(list);
	root.appendChild(panel);
	root.appendChild(disagree);
}
//#endregion
//#region src/drafts.ts
const PREFIX = "ccemap-draft:";
function storage() {
	try {
		return globalThis.localStorage ?? null;
	} catch {
		return null;
	}
}
const memory = /* @__PURE__ */ new Map();
function key(cceId, sr) {
	return `${PREFIX}${cceId}|${sr}`;
}
function saveDraft(cceId, sr, draft) {
	const k = key(cceId, sr);
	const value = JSON.stringify(draft);
	const store = storage();
	if (store) store.setItem(k, value);
	else memory.set(k, value);
}
function loadDraft(cceId, sr) {
	const k = key(cceId, sr);
	const store = storage();
	const raw = store ? store.getItem(k) : memory.get(k) ?? null;
	if (!raw) return null;
	try {
		return JSON.parse(raw);
	} catch {
		return null;
	}
}
function clearDraft(cceId, sr) {
	const k = key(cceId, sr);
	const store = storage();
	if (store) store.removeItem(k);
	memory.delete(k);
}
//#endregion
//#region src/queue.ts
const HOTKEY_LABELS = {
	y: "yes",
	n: "no",
	m: "maybe",
	a: "na"
};
function el$1(tag, attrs = {}, text) {
	const node = document.createElement(tag);
	for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
	if (text !== void 0) node.textContent = text;
	return node;
}
var QueueView = class {
	constructor(root, api, options) {
		this.cards = [];
		this.total = 0;
		this.offset = 0;
		this.focusIndex = 0;
		this.filters = {};
		this.retryAction = null;
		this.root = root;
		this.api = api;
		this.options = options;
		this.banner = el$1("div", {
			class: "banner",
			hidden: "",
			"data-testid": "retry-banner"
		});
		this.list = el$1("div", { class: "cards" });
		this.pager = el$1("div", { class: "pager" });
		this.root.appendChild(this.buildFilterBar());
		this.root.appendChild(this.banner);
		this.root.appendChild(this.list);
		this.root.appendChild(this.pager);
		this.keyHandler = (event) => this.handleKey(event);
		document.addEventListener("keydown", this.keyHandler);
	}
	detach() {
		document.removeEventListener("keydown", this.keyHandler);
	}
	buildFilterBar() {
		const bar = el$1("div", { class: "filters" });
		const select = el$1("select", { "data-testid": "filter-label" });
		for (const value of [
			"",
			"pending",
			"yes",
			"no",
			"maybe",
			"na"
		]) {
			const option = el$1("option", { value }, value || "all labels");
			select.appendChild(option);
		}
		select.addEventListener("change", () => {
			this.filters.label = select.value || void 0;
			this.load(0);
		});
		const sr = el$1("input", {
			placeholder: "filter SR (e.g. SR 5.2)",
			"data-testid": "filter-sr"
		});
		sr.addEventListener("change", () => {
			this.filters.sr = sr.value || void 0;
			this.load(0);
		});
		const cce = el$1("input", {
			placeholder: "filter CCE id",
			"data-testid": "filter-cce"
		});
		cce.addEventListener("change", () => {
			this.filters.cce = cce.value || void 0;
			this.load(0);
		});
		bar.appendChild(select);
		bar.appendChild(sr);
		bar.appendChild(cce);
		return bar;
	}
	async load(offset = this.offset) {
		try {
			const page = await this.api.listRelations({
				...this.filters,
				offset,
				limit: this.options.pageSize ?? 50
			});
			this.offset = page.offset;
			this.total = page.total;
			this.cards = page.items.map((item) => ({
				item,
				detail: null,
				draftLabel: loadDraft(item.cce_id, item.sr)?.label ?? "",
				errors: []
			}));
			this.hideBanner();
			this.render();
			this.focusCard(0);
		} catch (error) {
			this.showBanner("Could not load the queue.", () => void this.load(offset));
		}
	}
	render() {
		this.list.textContent = "";
		this.cards.forEach((card, index) => this.list.appendChild(this.renderCard(card, index)));
		this.pager.textContent = "";
		const prev = el$1("button", { "data-testid": "page-prev" }, "previous");
		const next = el$1("button", { "data-testid": "page-next" }, "next");
		const size = this.options.pageSize ?? 50;
		prev.disabled = this.offset === 0;
		next.disabled = this.offset + size >= this.total;
		prev.addEventListener("click", () => void this.load(Math.max(0, this.offset - size)));
		next.addEventListener("click", () => void this.load(this.offset + size));
		this.pager.appendChild(prev);
		this.pager.appendChild(el$1("span", { "data-testid": "page-info" }, `${formatCount(this.total)} relations`));
		this.pager.appendChild(next);
	}
	renderCard(card, index) {
		const { item } = card;
		const id = `${item.cce_id}|${item.sr}`;
		const box = el$1("article", {
			class: `card label-${item.label}` + (index === this.focusIndex ? " focused" : ""),
			"data-testid": `card-${id}`,
			tabindex: "-1"
		});
		const head = el$1("header");
		head.appendChild(el$1("b", {}, item.cce_id));
		head.appendChild(el$1("span", { class: "sr" }, ` ${item.sr}`));
		if (item.sr_theme) head.appendChild(el$1("i", { class: "theme" }, ` ${item.sr_theme}`));
		head.appendChild(el$1("span", {
			class: "score",
			"data-testid": `score-${id}`
		}, formatScore(item.score)));
		head.appendChild(el$1("span", { class: "rank" }, `#${item.rank}`));
		head.appendChild(el$1("span", {
			class: `chip chip-${item.label}`,
			"data-testid": `label-${id}`
		}, item.label));
		box.appendChild(head);
		const detail = el$1("div", {
			class: "detail",
			"data-testid": `detail-${id}`
		});
		if (card.detail?.attributes) {
			const table = el$1("table", { class: "attributes" });
			for (const [key, value] of Object.entries(card.detail.attributes)) {
				const row = el$1("tr");
				row.appendChild(el$1("th", {}, key));
				row.appendChild(el$1("td", {}, value));
				table.appendChild(row);
			}
			detail.appendChild(table);
		}
		if (card.detail && card.detail.history.length) {
			const history = el$1("ul", { class: "history" });
			for (const entry of card.detail.history) history.appendChild(el$1("li", {}, `${entry.at} ${entry.annotator}: ${entry.label} (${entry.explanation})`));
			detail.appendChild(history);
		}
		box.appendChild(detail);
		const form = el$1("div", { class: "labeling" });
		for (const label of [
			"yes",
			"no",
			"maybe",
			"na"
		]) {
			const button = el$1("button", {
				class: "label-pick" + (card.draftLabel === label ? " picked" : ""),
				"data-testid": `pick-${label}-${id}`
			}, label);
			button.addEventListener("click", () => {
				this.focusCard(index);
				this.setDraftLabel(label);
			});
			form.appendChild(button);
		}
		const explanation = el$1("textarea", {
			placeholder: "explanation (required for yes/no/maybe)",
			"data-testid": `explanation-${id}`
		});
		explanation.value = loadDraft(item.cce_id, item.sr)?.explanation ?? "";
		explanation.addEventListener("input", () => {
			saveDraft(item.cce_id, item.sr, {
				label: card.draftLabel,
				explanation: explanation.value
			});
			submit.disabled = this.submitDisabled(card, explanation.value);
		});
		explanation.addEventListener("keydown", (event) => {
			if (event.key === "Enter" && !event.shiftKey) {
				event.preventDefault();
				this.submit();
			} else if (event.key === "Escape") explanation.blur();
		});
		const submit = el$1("button", {
			class: "submit",
			"data-testid": `submit-${id}`
		}, "submit");
		submit.disabled = this.submitDisabled(card, explanation.value);
		submit.addEventListener("click", () => {
			this.focusCard(index);
			this.submit();
		});
		const errors = el$1("div", {
			class: "errors",
			"data-testid": `errors-${id}`
		});
		for (const err of card.errors) errors.appendChild(el$1("p", { class: "error" }, `${err.field}: ${err.message}`));
		form.appendChild(explanation);
		form.appendChild(submit);
		form.appendChild(errors);
		box.appendChild(form);
		return box;
	}
	submitDisabled(card, explanation) {
		if (!card.draftLabel) return true;
		if (card.draftLabel !== "na" && explanation.trim() === "") return true;
		return false;
	}
	card() {
		return this.cards[this.focusIndex] ?? null;
	}
	explanationBox(card) {
		const id = `${card.item.cce_id}|${card.item.sr}`;
		return this.list.querySelector(`[data-testid="explanation-${id}"]`);
	}
	focusCard(index) {
		if (index < 0 || index >= this.cards.length) return;
		this.focusIndex = index;
		this.list.querySelectorAll(".card").forEach((node, i) => {
			node.classList.toggle("focused", i === index);
		});
		const card = this.card();
		if (card && !card.detail) this.api.getRelation(card.item.cce_id, card.item.sr).then((detail) => {
			card.detail = detail;
			this.rerenderCard(card);
		}).catch(() => void 0);
	}
	rerenderCard(card) {
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
	setDraftLabel(label) {
		const card = this.card();
		if (!card) return;
		card.draftLabel = label;
		const box = this.explanationBox(card);
		saveDraft(card.item.cce_id, card.item.sr, {
			label,
			explanation: box?.value ?? ""
		});
		this.rerenderCard(card);
	}
	async submit() {
		const card = this.card();
		if (!card) return;
		const explanation = this.explanationBox(card)?.value ?? "";
		card.errors = [];
		if (!card.draftLabel) {
			card.errors = [{
				field: "label",
				message: "pick yes, no, maybe, or na first"
			}];
			this.rerenderCard(card);
			return;
		}
		if (card.draftLabel !== "na" && explanation.trim() === "") {
			card.errors = [{
				field: "explanation",
				message: `label '${card.draftLabel}' requires an explanation`
			}];
			this.rerenderCard(card);
			return;
		}
		const annotator = this.options.annotator();
		const previous = card.item;
		card.item = {
			...previous,
			label: card.draftLabel,
			explanation
		};
		this.rerenderCard(card);
		try {
			const confirmed = await this.api.submitLabel(previous.cce_id, previous.sr, {
				label: card.draftLabel,
				explanation,
				annotator
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
			card.item = previous;
			if (error instanceof ApiError) {
				card.errors = error.fieldErrors.length ? error.fieldErrors : [{
					field: "submit",
					message: error.message
				}];
				this.rerenderCard(card);
			} else {
				saveDraft(previous.cce_id, previous.sr, {
					label: card.draftLabel,
					explanation
				});
				this.rerenderCard(card);
				const restore = this.explanationBox(card);
				if (restore) restore.value = explanation;
				this.showBanner("Connection lost; your draft is saved.", () => void this.submit());
			}
		}
	}
	focusNextPending() {
		for (let step = 1; step <= this.cards.length; step += 1) {
			const index = (this.focusIndex + step) % this.cards.length;
			if (this.cards[index].item.label === "pending") {
				this.focusCard(index);
				return;
			}
		}
	}
	showBanner(message, retry) {
		this.retryAction = retry;
		this.banner.textContent = "";
		this.banner.appendChild(el$1("span", {}, message));
		const button = el$1("button", { "data-testid": "retry-button" }, "retry");
		button.addEventListener("click", () => {
			this.retryAction?.();
		});
		this.banner.appendChild(button);
		this.banner.removeAttribute("hidden");
	}
	hideBanner() {
		this.retryAction = null;
		this.banner.setAttribute("hidden", "");
	}
	handleKey(event) {
		const target = event.target;
		if (target && (target.tagName === "TEXTAREA" || target.tagName === "INPUT")) return;
		if (event.key in HOTKEY_LABELS) {
			event.preventDefault();
			this.setDraftLabel(HOTKEY_LABELS[event.key]);
		} else if (event.key === "Enter") {
			event.preventDefault();
			this.submit();
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
};
//#endregion
//#region src/app.ts
function el(tag, attrs = {}, text) {
	const node = document.createElement(tag);
	for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
	if (text !== void 0) node.textContent = text;
	return node;
}
async function initApp(root, api) {
	root.textContent = "";
	const header = el("header", { class: "top" });
	const title = el("h1", {}, "ccemap review");
	const progressWrap = el("div", { class: "progress" });
	const progressBar = el("div", { class: "bar" });
	const progressFill = el("span", { class: "fill" });
	progressBar.appendChild(progressFill);
	const progressText = el("span", {
		class: "label",
		"data-testid": "progress-text"
	});
	progressWrap.appendChild(progressBar);
	progressWrap.appendChild(progressText);
	const annotator = el("input", {
		class: "annotator",
		value: "reviewer-ui",
		title: "annotator id recorded with every label",
		"data-testid": "annotator"
	});
	const tabs = el("nav");
	const queueTab = el("button", {
		class: "tab active",
		"data-testid": "tab-queue"
	}, "Queue");
	const dashTab = el("button", {
		class: "tab",
		"data-testid": "tab-dashboard"
	}, "Dashboard");
	tabs.appendChild(queueTab);
	tabs.appendChild(dashTab);
	header.appendChild(title);
	header.appendChild(progressWrap);
	header.appendChild(annotator);
	header.appendChild(tabs);
	root.appendChild(header);
	const queueRoot = el("main", { id: "queue-view" });
	const dashRoot = el("section", {
		id: "dashboard-view",
		hidden: ""
	});
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
	async function refresh() {
		const [progress, agreement] = await Promise.all([api.progress(), api.agreement()]);
		progressText.textContent = `${formatCount(progress.labeled)}/${formatCount(progress.total)} (${progressPercent(progress.labeled, progress.total)})`;
		progressFill.style.width = progressPercent(progress.labeled, progress.total);
		renderDashboard(dashRoot, agreement, progress);
	}
	const queue = new QueueView(queueRoot, api, {
		annotator: () => annotator.value || "reviewer-ui",
		onLabeled: () => void refresh()
	});
	await queue.load(0);
	await refresh();
	return {
		queue,
		refresh
	};
}
//#endregion
//#region src/main.ts
const root = document.getElementById("app");
if (root) initApp(root, new ApiClient());
//#endregion
