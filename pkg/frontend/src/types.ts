/** Wire types for the recommendation service HTTP contract. */

export type SpanKind =
  | "recommended_snippet"
  | "api_matched"
  | "api_bold"
  | "action_phrase"
  | "goal"
  | "location"
  | "condition";

export interface Span {
  start: number;
  end: number;
  kind: SpanKind;
}

export interface Excerpt {
  page_uri: string;
  degraded: boolean;
  text: string;
  spans: Span[];
}

export interface ApiMention {
  fqn: string;
  kind: string;
  declaring_class: string;
}

export interface SnippetInfo {
  id: string;
  text: string;
  kind: string;
  page_uri: string;
  parent_block: string | null;
  language_hint: string | null;
  apis: ApiMention[];
}

export interface ActionInfo {
  id: string;
  verb: string;
  object: string;
  label: string;
  sentence: string;
  source: string;
  page_uri: string;
  anchor: string | null;
}

export interface Recommendation {
  rank: number;
  snippet_id: string;
  score: number;
  matched: number;
  unmatched: number;
  matched_keys: string[];
  snippet: SnippetInfo;
  actions: ActionInfo[];
  excerpt: Excerpt;
}

export interface HierarchyNode {
  action_id: string;
  label: string;
  source: string;
  rank: number | null;
  expanded: boolean;
  has_children: boolean;
  children: HierarchyNode[];
}

export interface RecommendResponse {
  config: string;
  top_n: number;
  query_keys: string[];
  recommendations: Recommendation[];
  hierarchy: HierarchyNode[];
}

export interface ActionDetail {
  action: ActionInfo;
  attributes: Record<string, unknown>;
  relations: Array<Record<string, unknown>>;
  snippets: SnippetInfo[];
}

export interface StatsResponse {
  corpus_id: string;
  built_at: string | null;
  pages: number;
  counts: Record<string, Record<string, number>>;
}

export type RecommendRequest =
  | { code: string; config?: string; top_n?: number }
  | { selection: string; config?: string; top_n?: number };
