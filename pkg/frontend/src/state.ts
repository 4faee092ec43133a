import { candidateId, type QueueItem } from './types.ts';

export type FailureKind = 'compile_fail' | 'nli_fail' | 'sampled_pass';

export interface Filters {
  tag: string | null;
  kind: FailureKind | null;
}

export interface QueueState {
  items: QueueItem[];
  filters: Filters;
  currentId: string | null;
  editorText: string;
  checkPending: boolean;
}

export function failureKind(item: QueueItem): FailureKind {
  if (!item.compile || item.compile.kind !== 'statement_pass') return 'compile_fail';
  if (item.nli !== 'positive') return 'nli_fail';
  return 'sampled_pass';
}

export function visibleItems(state: QueueState): QueueItem[] {
  return state.items.filter((item) => {
    if (state.filters.tag && !(item.problem?.tags ?? []).includes(state.filters.tag)) {
      return false;
    }
    if (state.filters.kind && failureKind(item) !== state.filters.kind) {
      return false;
    }
    return true;
  });
}

export function availableTags(items: QueueItem[]): string[] {
  const tags = new Set<string>();
  for (const item of items) for (const tag of item.problem?.tags ?? []) tags.add(tag);
  return [...tags].sort();
}

export function currentItem(state: QueueState): QueueItem | null {
  const visible = visibleItems(state);
  if (visible.length === 0) return null;
  const found = visible.find((i) => candidateId(i.candidate) === state.currentId);
  return found ?? visible[0] ?? null;
}

export function initialState(items: QueueItem[]): QueueState {
  const first = items[0] ?? null;
  return {
    items,
    filters: { tag: null, kind: null },
    currentId: first ? candidateId(first.candidate) : null,
    editorText: first?.candidate.statement_text ?? '',
    checkPending: false,
  };
}

export function selectItem(state: QueueState, id: string): QueueState {
  const item = state.items.find((i) => candidateId(i.candidate) === id);
  if (!item) return state;
  return {
    ...state,
    currentId: id,
    editorText: item.candidate.statement_text,
    checkPending: false,
  };
}

export function setFilters(state: QueueState, filters: Filters): QueueState {
  const next = { ...state, filters };
  const visible = visibleItems(next);
  const stillVisible = visible.some((i) => candidateId(i.candidate) === state.currentId);
  if (stillVisible) return next;
  const first = visible[0] ?? null;
  return {
    ...next,
    currentId: first ? candidateId(first.candidate) : null,
    editorText: first?.candidate.statement_text ?? '',
  };
}

export function editText(state: QueueState, text: string): QueueState {
  return { ...state, editorText: text };
}

export function beginCheck(state: QueueState): QueueState {
  // one in-flight check per item; submit stays disabled while pending
  return { ...state, checkPending: true };
}

export function endCheck(state: QueueState): QueueState {
  return { ...state, checkPending: false };
}

export function isEdited(state: QueueState): boolean {
  const item = currentItem(state);
  return item !== null && state.editorText !== item.candidate.statement_text;
}

/** Optimistic advance: drop the reviewed item and move to the next visible one. */
export function completeVerdict(state: QueueState, reviewedId: string): QueueState {
  const remaining = state.items.filter((i) => candidateId(i.candidate) !== reviewedId);
  const next: QueueState = { ...state, items: remaining, checkPending: false };
  const visible = visibleItems(next);
  const first = visible[0] ?? null;
  return {
    ...next,
    currentId: first ? candidateId(first.candidate) : null,
    editorText: first?.candidate.statement_text ?? '',
  };
}
