import { describe, expect, it } from 'vitest';

import { annotate, sliceByteSpan } from '../src/bytespan.ts';

// byte spans come from the linter, which indexes the UTF-8 encoding;
// 'ℝ' (the reals symbol) is three bytes.
const STATEMENT = 'theorem t (a b : ℝ) (h : a ≥ b ≥ 0) : a ≥ 0 := by sorry';

describe('byte spans', () => {
  it('slices multi-byte statements correctly', () => {
    const bytes = new TextEncoder().encode(STATEMENT);
    const start = STATEMENT.indexOf('a ≥ b');
    const byteStart = new TextEncoder().encode(STATEMENT.slice(0, start)).length;
    const chain = 'a ≥ b ≥ 0';
    const byteEnd = byteStart + new TextEncoder().encode(chain).length;
    expect(byteEnd).toBeLessThanOrEqual(bytes.length);
    expect(sliceByteSpan(STATEMENT, byteStart, byteEnd)).toBe(chain);
  });

  it('annotates marked and plain segments in order', () => {
    const text = 'abℝcd';
    // bytes: a=1, b=1, ℝ=3, c=1, d=1 -> mark the symbol (bytes 2..5)
    const segments = annotate(text, [{ span: [2, 5], rule_id: 'demo' }]);
    expect(segments).toEqual([
      { text: 'ab', marked: false },
      { text: 'ℝ', marked: true, ruleId: 'demo' },
      { text: 'cd', marked: false },
    ]);
  });

  it('skips out-of-bounds spans defensively', () => {
    const segments = annotate('abc', [{ span: [0, 99], rule_id: 'bad' }]);
    expect(segments).toEqual([{ text: 'abc', marked: false }]);
  });
});
