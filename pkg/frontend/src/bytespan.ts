// Lint finding spans are byte offsets into the UTF-8 statement text; unicode
// math symbols are multi-byte, so slicing needs an encode/decode round trip.

const encoder = new TextEncoder();
const decoder = new TextDecoder();

export interface Segment {
  text: string;
  marked: boolean;
  ruleId?: string;
}

export function sliceByteSpan(text: string, start: number, end: number): string {
  const bytes = encoder.encode(text);
  return decoder.decode(bytes.slice(start, end));
}

/** Split text into plain/marked segments for non-overlapping byte spans. */
export function annotate(
  text: string,
  spans: Array<{ span: [number, number]; rule_id: string }>,
): Segment[] {
  const bytes = encoder.encode(text);
  const ordered = [...spans].sort((a, b) => a.span[0] - b.span[0]);
  const segments: Segment[] = [];
  let cursor = 0;
  for (const { span, rule_id } of ordered) {
    const [start, end] = span;
    if (start < cursor || end > bytes.length) continue; // defensive: skip bad spans
    if (start > cursor) {
      segments.push({ text: decoder.decode(bytes.slice(cursor, start)), marked: false });
    }
    segments.push({
      text: decoder.decode(bytes.slice(start, end)),
      marked: true,
      ruleId: rule_id,
    });
    cursor = end;
  }
  if (cursor < bytes.length) {
    segments.push({ text: decoder.decode(bytes.slice(cursor)), marked: false });
  }
  return segments;
}
