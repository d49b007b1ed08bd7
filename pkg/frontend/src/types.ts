/**
 * Wire types for the review service HTTP API.
 *
 * These mirror the server's JSON exactly; the UI renders server-provided
 * data and never mutates diffs client-side.
 */

export interface SuggestionSummary {
  suggestion_id: string;
  rule_id: string;
  file: string;
  line: number;
  message: string;
  severity: string;
  state: string;
  created_at: string;
}

export interface IssueRecord {
  issue_id: string;
  rule_id: string;
  file: string;
  message: string;
  severity: string;
  category: string;
  span: [number, number, number, number];
}

export interface SuggestionDetail extends SuggestionSummary {
  issue: IssueRecord;
  patch_text: string;
  unified_diff: string;
  rationale: string;
  context_excerpt: string;
  rule_description: string;
}

export interface RuleInfo {
  rule_id: string;
  description: string;
}

export type ReviewAction = 'stage' | 'copy' | 'reject' | 'commit';

export interface ActionOptions {
  committedDiff?: string;
  adopter?: string;
  idempotencyKey?: string;
}
