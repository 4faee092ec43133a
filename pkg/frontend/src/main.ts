import { ApiClient, ApiError } from './api.ts';
import { tickerRows, weightedAverageDisplay } from './accuracy.ts';
import { annotate } from './bytespan.ts';
import {
  beginCheck,
  completeVerdict,
  currentItem,
  editText,
  endCheck,
  failureKind,
  initialState,
  isEdited,
  availableTags,
  selectItem,
  setFilters,
  visibleItems,
  type QueueState,
} from './state.ts';
import { candidateId, type CompileVerdict, type QueueItem } from './types.ts';

const params = new URLSearchParams(window.location.search);
const round = Number(params.get('round') ?? '1');
const baseUrl = params.get('api') ?? localStorage.getItem('forge-api-base') ?? '';
const api = new ApiClient(baseUrl);

let state: QueueState = initialState([]);

const el = {
  banner: byId('banner'),
  queue: byId('queue'),
  tagFilter: byId('tag-filter') as HTMLSelectElement,
  kindFilter: byId('kind-filter') as HTMLSelectElement,
  nlText: byId('nl-text'),
  backTranslation: byId('back-translation'),
  nliBadge: byId('nli-badge'),
  tagChips: byId('tag-chips'),
  lintPanel: byId('lint-panel'),
  annotated: byId('annotated'),
  editor: byId('editor') as HTMLTextAreaElement,
  verdictPanel: byId('verdict-panel'),
  checkButton: byId('check-button') as HTMLButtonElement,
  correctButton: byId('correct-button') as HTMLButtonElement,
  modifiedButton: byId('modified-button') as HTMLButtonElement,
  rejectedButton: byId('rejected-button') as HTMLButtonElement,
  ticker: byId('ticker'),
  tickerAverage: byId('ticker-average'),
  empty: byId('empty-state'),
  workspace: byId('workspace'),
};

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

async function loadQueue(): Promise<void> {
  hideBanner();
  try {
    const items = await api.queue(round);
    state = initialState(items);
    render();
    await refreshStats();
  } catch (error) {
    showBanner(`Could not reach the review server: ${message(error)}`, loadQueue);
  }
}

function message(error: unknown): string {
  return error instanceof Error ? error.message : String(error);
}

function showBanner(text: string, retry: () => void): void {
  el.banner.hidden = false;
  el.banner.textContent = '';
  el.banner.append(text + ' ');
  const button = document.createElement('button');
  button.textContent = 'Retry';
  button.addEventListener('click', retry);
  el.banner.append(button);
}

function hideBanner(): void {
  el.banner.hidden = true;
}

function render(): void {
  renderFilters();
  renderQueue();
  renderCurrent();
}

function renderFilters(): void {
  const tags = availableTags(state.items);
  const selected = state.filters.tag ?? '';
  el.tagFilter.innerHTML = '<option value="">all tags</option>';
  for (const tag of tags) {
    const option = document.createElement('option');
    option.value = tag;
    option.textContent = tag;
    option.selected = tag === selected;
    el.tagFilter.append(option);
  }
  el.kindFilter.value = state.filters.kind ?? '';
}

function renderQueue(): void {
  const visible = visibleItems(state);
  el.queue.innerHTML = '';
  for (const item of visible) {
    const id = candidateId(item.candidate);
    const li = document.createElement('li');
    li.className = id === state.currentId ? 'active' : '';
    const kind = failureKind(item);
    li.innerHTML = `<span class="kind ${kind}">${kind.replace('_', ' ')}</span> ${id}`;
    li.addEventListener('click', () => {
      state = selectItem(state, id);
      render();
    });
    el.queue.append(li);
  }
  el.empty.hidden = visible.length > 0;
  el.workspace.hidden = visible.length === 0;
}

function renderCurrent(): void {
  const item = currentItem(state);
  if (!item) return;
  el.nlText.textContent = item.problem?.nl_text ?? '(problem text unavailable)';
  el.backTranslation.textContent = item.back_translation ?? '(no back-translation)';
  el.nliBadge.textContent = `NLI: ${item.nli}`;
  el.nliBadge.className = `badge ${item.nli}`;
  el.tagChips.innerHTML = '';
  for (const tag of item.problem?.tags ?? []) {
    const chip = document.createElement('span');
    chip.className = 'chip';
    chip.textContent = tag;
    el.tagChips.append(chip);
  }
  if (el.editor.value !== state.editorText) el.editor.value = state.editorText;
  renderLint(item);
  renderVerdict(item.compile);
  updateButtons();
}

function renderLint(item: QueueItem): void {
  const findings = item.lint.findings;
  el.lintPanel.innerHTML = '';
  el.annotated.innerHTML = '';
  for (const segment of annotate(item.candidate.statement_text, findings)) {
    if (segment.marked) {
      const mark = document.createElement('mark');
      mark.title = segment.ruleId ?? '';
      mark.textContent = segment.text;
      el.annotated.append(mark);
    } else {
      el.annotated.append(segment.text);
    }
  }
  for (const finding of findings) {
    const li = document.createElement('li');
    li.textContent = finding.suggestion
      ? `${finding.rule_id} (${finding.severity}): suggest ${finding.suggestion}`
      : `${finding.rule_id} (${finding.severity})`;
    el.lintPanel.append(li);
  }
}

function renderVerdict(verdict: CompileVerdict | null): void {
  el.verdictPanel.innerHTML = '';
  if (!verdict) {
    el.verdictPanel.textContent = 'not compiled yet';
    return;
  }
  const head = document.createElement('div');
  head.className = `verdict ${verdict.kind}`;
  head.textContent = `${verdict.kind} (${verdict.elapsed_ms} ms)`;
  el.verdictPanel.append(head);
  for (const m of verdict.messages) {
    const line = document.createElement('div');
    line.className = `msg ${m.severity}`;
    const where = m.position ? ` @${m.position[0]}:${m.position[1]}` : '';
    line.textContent = `${m.severity}${where}: ${m.text}`;
    el.verdictPanel.append(line);
  }
}

function updateButtons(): void {
  el.checkButton.disabled = state.checkPending;
  // submit is disabled while a live check is pending
  const blocked = state.checkPending;
  el.correctButton.disabled = blocked || isEdited(state);
  el.modifiedButton.disabled = blocked || !isEdited(state);
  el.rejectedButton.disabled = blocked;
}

async function runCheck(): Promise<void> {
  const item = currentItem(state);
  if (!item || state.checkPending) return;
  state = beginCheck(state);
  updateButtons();
  try {
    const verdict = await api.check(state.editorText);
    renderVerdict(verdict);
    hideBanner();
  } catch (error) {
    if (error instanceof ApiError && error.status === 503) {
      showBanner(`Compile pool busy, retry in ${error.retryAfterSeconds ?? 2}s`, runCheck);
    } else {
      showBanner(`Check failed: ${message(error)}`, runCheck);
    }
  } finally {
    state = endCheck(state);
    updateButtons();
  }
}

async function submit(verdict: 'correct' | 'modified' | 'rejected'): Promise<void> {
  const item = currentItem(state);
  if (!item) return;
  const id = candidateId(item.candidate);
  try {
    await api.submitVerdict({
      candidate_id: id,
      verdict,
      ...(verdict === 'modified' ? { modified_text: state.editorText } : {}),
    });
    state = completeVerdict(state, id);
    render();
    await refreshStats();
  } catch (error) {
    if (error instanceof ApiError && error.status === 422) {
      showBanner(`Rejected by the server: ${error.message}`, () => submit(verdict));
      renderVerdictFromError(error);
    } else {
      showBanner(`Submit failed: ${message(error)}`, () => submit(verdict));
    }
  }
}

function renderVerdictFromError(error: ApiError): void {
  const div = document.createElement('div');
  div.className = 'msg error';
  div.textContent = error.message;
  el.verdictPanel.append(div);
}

async function refreshStats(): Promise<void> {
  try {
    const stats = await api.stats(round);
    el.ticker.innerHTML =
      '<tr><th>Tag</th><th>Count</th><th>Sampled accuracy</th></tr>';
    for (const row of tickerRows(stats)) {
      const tr = document.createElement('tr');
      tr.innerHTML = `<td>${row.tag}</td><td>${row.count}</td><td>${row.sampled}</td>`;
      el.ticker.append(tr);
    }
    el.tickerAverage.textContent = weightedAverageDisplay(stats);
  } catch {
    // stats are advisory; the queue keeps working without them
  }
}

el.tagFilter.addEventListener('change', () => {
  state = setFilters(state, { ...state.filters, tag: el.tagFilter.value || null });
  render();
});
el.kindFilter.addEventListener('change', () => {
  const kind = el.kindFilter.value as '' | 'compile_fail' | 'nli_fail' | 'sampled_pass';
  state = setFilters(state, { ...state.filters, kind: kind || null });
  render();
});
el.editor.addEventListener('input', () => {
  state = editText(state, el.editor.value);
  updateButtons();
});
el.checkButton.addEventListener('click', runCheck);
el.correctButton.addEventListener('click', () => submit('correct'));
el.modifiedButton.addEventListener('click', () => submit('modified'));
el.rejectedButton.addEventListener('click', () => submit('rejected'));

void loadQueue();
