// Mirrors of the review API's JSON shapes. The server is the single source of
// truth for every verdict-affecting number; the client only renders them.

export interface LintFinding {
  rule_id: string;
  span: [number, number]; // byte offsets into the UTF-8 statement text
  severity: 'fixable' | 'flag';
  suggestion: string | null;
}

export interface LintReport {
  findings: LintFinding[];
}

export interface CompileMessage {
  severity: 'error' | 'warning' | 'info';
  text: string;
  position: [number, number] | null;
}

export interface CompileVerdict {
  kind: 'statement_pass' | 'proof_pass' | 'error' | 'timeout' | 'worker_crash';
  messages: CompileMessage[];
  elapsed_ms: number;
  env_tag: string;
}

export interface Candidate {
  problem_id: string;
  round: number;
  sample_index: number;
  statement_text: string;
  lint: LintReport;
  compile: CompileVerdict | null;
  back_translation: string | null;
  nli: 'positive' | 'negative' | 'indeterminate';
  human: 'unreviewed' | 'correct' | 'modified' | 'rejected';
  modified_text: string | null;
  fingerprint: string;
}

export interface Problem {
  id: string;
  source: string;
  nl_text: string;
  answer: string;
  tags: string[];
  well_defined: string;
}

export interface QueueItem {
  candidate: Candidate;
  problem: Problem | null;
  lint: LintReport;
  compile: CompileVerdict | null;
  back_translation: string | null;
  nli: Candidate['nli'];
}

export interface VerdictSubmission {
  candidate_id: string;
  verdict: 'correct' | 'modified' | 'rejected';
  modified_text?: string;
  note?: string;
}

export interface VerdictAck {
  ok: boolean;
  stored: string;
  next: string | null;
  remaining: number;
}

export type AccuracyRow = [tag: string, count: number, correct: number, total: number];

export interface StatsResponse {
  manifest: Record<string, unknown> | null;
  rows: AccuracyRow[];
  weighted_accuracy: number | null;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  details: unknown;
}

export function candidateId(c: Candidate): string {
  return `${c.problem_id}/${c.round}/${c.sample_index}`;
}
