import type { Candidate, QueueItem } from '../src/types.ts';

export function makeItem(overrides: {
  problemId: string;
  tags?: string[];
  compileKind?: Candidate['compile'] extends null ? never : string;
  compiled?: boolean;
  nli?: Candidate['nli'];
  statement?: string;
}): QueueItem {
  const compiled = overrides.compiled ?? true;
  const candidate: Candidate = {
    problem_id: overrides.problemId,
    round: 1,
    sample_index: 0,
    statement_text: overrides.statement ?? 'theorem t (x : ℕ) : x = x := by sorry',
    lint: { findings: [] },
    compile: {
      kind: compiled ? 'statement_pass' : 'error',
      messages: [],
      elapsed_ms: 5,
      env_tag: 'fake',
    },
    back_translation: compiled ? 'restated problem' : null,
    nli: overrides.nli ?? (compiled ? 'positive' : 'indeterminate'),
    human: 'unreviewed',
    modified_text: null,
    fingerprint: 'st:x',
  };
  return {
    candidate,
    problem: {
      id: overrides.problemId,
      source: 'post',
      nl_text: `Problem ${overrides.problemId}`,
      answer: '',
      tags: overrides.tags ?? ['inequality'],
      well_defined: 'positive',
    },
    lint: candidate.lint,
    compile: candidate.compile,
    back_translation: candidate.back_translation,
    nli: candidate.nli,
  };
}

export function jsonResponse(body: unknown, status = 200, headers: Record<string, string> = {}) {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json', ...headers },
  });
}
