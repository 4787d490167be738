// Per-relation drafts stored client-side until the server confirms a label,
// so an accidental reload or a dropped connection never loses typed text.

export interface Draft {
  label: string;
  explanation: string;
}

const PREFIX = "ccemap-draft:";

function storage(): Storage | null {
  try {
    return globalThis.localStorage ?? null;
  } catch {
    return null;
  }
}

const memory = new Map<string, string>();

function key(cceId: string, sr: string): string {
  return `${PREFIX}${cceId}|${sr}`;
}

export function saveDraft(cceId: string, sr: string, draft: Draft): void {
  const k = key(cceId, sr);
  const value = JSON.stringify(draft);
  const store = storage();
  if (store) store.setItem(k, value);
  else memory.set(k, value);
}

export function loadDraft(cceId: string, sr: string): Draft | null {
  const k = key(cceId, sr);
  const store = storage();
  const raw = store ? store.getItem(k) : memory.get(k) ?? null;
  if (!raw) return null;
  try {
    return JSON.parse(raw) as Draft;
  } catch {
    return null;
  }
}

export function clearDraft(cceId: string, sr: string): void {
  const k = key(cceId, sr);
  const store = storage();
  if (store) store.removeItem(k);
  memory.delete(k);
}
