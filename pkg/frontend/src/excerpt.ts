import { escapeHtml } from "./html.js";
import type { Excerpt, Span, SpanKind } from "./types.js";

/** How each span kind is drawn. The classes are styled in styles.css:
 * matched APIs on a yellow background, prose-mentioned APIs in bold, the
 * recommended snippet on a gray block, and the phrase attributes as
 * distinctly colored underlines. */
export const SPAN_CLASS: Record<SpanKind, string> = {
  recommended_snippet: "hl-snippet",
  api_matched: "hl-api-matched",
  api_bold: "hl-api-bold",
  action_phrase: "hl-action-phrase",
  goal: "hl-goal",
  location: "hl-location",
  condition: "hl-condition",
};

/** Stacking order when several kinds cover the same character. */
const KIND_ORDER: SpanKind[] = [
  "recommended_snippet",
  "api_matched",
  "api_bold",
  "action_phrase",
  "goal",
  "location",
  "condition",
];

export const LEGEND: Array<{ kind: SpanKind; label: string }> = [
  { kind: "api_matched", label: "API matched to your code" },
  { kind: "api_bold", label: "API named in the text" },
  { kind: "recommended_snippet", label: "recommended snippet" },
  { kind: "action_phrase", label: "action" },
  { kind: "goal", label: "goal" },
  { kind: "location", label: "location" },
  { kind: "condition", label: "condition" },
];

/** Same-kind spans must not overlap. If they do the first one (by start,
 * longest first) is kept and the rest are dropped with a console warning. */
export function prepareSpans(spans: Span[]): Span[] {
  const byKind = new Map<SpanKind, Span[]>();
  for (const span of spans) {
    const bucket = byKind.get(span.kind);
    if (bucket === undefined) {
      byKind.set(span.kind, [span]);
    } else {
      bucket.push(span);
    }
  }
  const kept: Span[] = [];
  for (const [kind, bucket] of byKind) {
    bucket.sort((a, b) => a.start - b.start || b.end - a.end);
    let lastEnd = -1;
    for (const span of bucket) {
      if (span.start < lastEnd) {
        console.warn(`overlapping ${kind} spans; dropping [${span.start}, ${span.end})`);
        continue;
      }
      kept.push(span);
      lastEnd = span.end;
    }
  }
  return kept;
}

export interface Segment {
  text: string;
  kinds: SpanKind[];
}

/** Cut the excerpt text at every span boundary. Each segment carries the
 * kinds covering it, so arbitrary cross-kind overlap renders cleanly. */
export function segmentExcerpt(excerpt: Excerpt): Segment[] {
  const spans = prepareSpans(excerpt.spans);
  const cuts = new Set<number>([0, excerpt.text.length]);
  for (const span of spans) {
    cuts.add(Math.max(0, Math.min(span.start, excerpt.text.length)));
    cuts.add(Math.max(0, Math.min(span.end, excerpt.text.length)));
  }
  const points = [...cuts].sort((a, b) => a - b);
  const segments: Segment[] = [];
  for (let i = 0; i + 1 < points.length; i += 1) {
    const start = points[i] as number;
    const end = points[i + 1] as number;
    if (start === end) {
      continue;
    }
    const kinds = KIND_ORDER.filter((kind) =>
      spans.some((s) => s.kind === kind && s.start <= start && end <= s.end),
    );
    segments.push({ text: excerpt.text.slice(start, end), kinds });
  }
  return segments;
}

export function renderExcerpt(excerpt: Excerpt): string {
  const note = excerpt.degraded
    ? `<p class="degraded-note">Source page unavailable; showing the snippet text only.</p>`
    : "";
  const body = segmentExcerpt(excerpt)
    .map(({ text, kinds }) => {
      const escaped = escapeHtml(text);
      if (kinds.length === 0) {
        return escaped;
      }
      const classes = kinds.map((kind) => SPAN_CLASS[kind]).join(" ");
      return `<span class="${classes}">${escaped}</span>`;
    })
    .join("");
  const uri = excerpt.page_uri ? `<p class="excerpt-uri">${escapeHtml(excerpt.page_uri)}</p>` : "";
  return `${note}${uri}<pre class="excerpt">${body}</pre>`;
}

export function renderLegend(): string {
  const items = LEGEND.map(
    ({ kind, label }) =>
      `<span class="legend-item"><span class="${SPAN_CLASS[kind]}">   </span> ${escapeHtml(label)}</span>`,
  );
  return `<div class="legend">${items.join("")}</div>`;
}
