import { ApiError, ReviewApiClient, newIdempotencyKey } from './api.js';
import { parseUnifiedDiff, sideBySideRows } from './diff.js';
import { ReviewAction, SuggestionDetail, SuggestionSummary } from './types.js';

export interface AppOptions {
  /** clipboard hook, injectable for tests; defaults to navigator.clipboard */
  copyText?: (text: string) => Promise<void>;
  adopter?: string;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

async function defaultCopy(text: string): Promise<void> {
  await navigator.clipboard.writeText(text);
}

/**
 * Single-page review surface: a pending list and a detail view with
 * side-by-side panes and the three review actions. All state lives on
 * the server; the app refetches after every action and on conflicts.
 */
export class App {
  private busy = false;
  private view: HTMLElement;

  constructor(
    private root: HTMLElement,
    private api: ReviewApiClient,
    private options: AppOptions = {},
  ) {
    // views swap inside this host; toasts live beside it so a
    // re-render does not erase them mid-animation
    this.view = el('div', 'view-host');
    this.root.replaceChildren(this.view);
  }

  async start(): Promise<void> {
    await this.showList();
  }

  async showList(): Promise<void> {
    let pending: SuggestionSummary[];
    try {
      pending = await this.api.listSuggestions();
    } catch (err) {
      this.renderError(err);
      return;
    }
    this.renderList(pending);
  }

  private renderError(err: unknown): void {
    this.view.replaceChildren();
    const banner = el('div', 'error-banner');
    const message = err instanceof Error ? err.message : String(err);
    banner.appendChild(el('span', 'error-text', `Could not reach the review service: ${message}`));
    const retry = el('button', 'retry-button', 'Retry');
    retry.addEventListener('click', () => void this.showList());
    banner.appendChild(retry);
    this.view.appendChild(banner);
  }

  private renderList(pending: SuggestionSummary[]): void {
    this.view.replaceChildren();
    const view = el('div', 'list-view');
    view.appendChild(el('h1', 'app-title', 'Fix suggestions'));
    if (pending.length === 0) {
      view.appendChild(el('p', 'empty-state', 'No pending suggestions.'));
      this.view.appendChild(view);
      return;
    }
    const table = el('div', 'suggestion-list');
    for (const item of pending) {
      const row = el('div', 'suggestion-row');
      row.dataset.suggestionId = item.suggestion_id;
      row.appendChild(el('span', 'row-rule', item.rule_id));
      row.appendChild(el('span', 'row-file', `${item.file}:${item.line}`));
      row.appendChild(el('span', 'row-message', item.message));
      row.addEventListener('click', () => void this.openDetail(item.suggestion_id));
      table.appendChild(row);
    }
    view.appendChild(table);
    this.view.appendChild(view);
  }

  async openDetail(id: string): Promise<void> {
    let detail: SuggestionDetail;
    try {
      detail = await this.api.getSuggestion(id);
    } catch (err) {
      this.renderError(err);
      return;
    }
    this.renderDetail(detail);
  }

  private renderDetail(detail: SuggestionDetail): void {
    this.view.replaceChildren();
    const view = el('div', 'detail-view');
    view.dataset.suggestionId = detail.suggestion_id;

    const back = el('button', 'back-button', '< All suggestions');
    back.addEventListener('click', () => void this.showList());
    view.appendChild(back);

    const heading = el('div', 'detail-heading');
    heading.appendChild(el('h2', 'detail-rule', detail.rule_id));
    heading.appendChild(el('span', 'detail-file', `${detail.file}:${detail.line}`));
    heading.appendChild(el('span', `detail-state state-${detail.state}`, detail.state));
    view.appendChild(heading);

    view.appendChild(this.buildTabs(detail));
    view.appendChild(this.buildPanes(detail.unified_diff));
    view.appendChild(this.buildActions(detail));
    this.view.appendChild(view);
  }

  private buildTabs(detail: SuggestionDetail): HTMLElement {
    const wrap = el('div', 'tabs');
    const bar = el('div', 'tab-bar');
    const issueTab = el('button', 'tab tab-issue active', 'Issue Description');
    const ruleTab = el('button', 'tab tab-rule', 'View Rules');
    bar.appendChild(issueTab);
    bar.appendChild(ruleTab);
    wrap.appendChild(bar);

    const issuePanel = el('div', 'tab-panel panel-issue');
    issuePanel.appendChild(el('p', 'issue-message', detail.message));
    if (detail.rationale) issuePanel.appendChild(el('p', 'issue-rationale', detail.rationale));
    if (detail.context_excerpt) {
      issuePanel.appendChild(el('pre', 'issue-context', detail.context_excerpt));
    }
    const rulePanel = el('div', 'tab-panel panel-rule hidden');
    rulePanel.appendChild(el('p', 'rule-description', detail.rule_description));
    wrap.appendChild(issuePanel);
    wrap.appendChild(rulePanel);

    issueTab.addEventListener('click', () => {
      issueTab.classList.add('active');
      ruleTab.classList.remove('active');
      issuePanel.classList.remove('hidden');
      rulePanel.classList.add('hidden');
    });
    ruleTab.addEventListener('click', () => {
      ruleTab.classList.add('active');
      issueTab.classList.remove('active');
      rulePanel.classList.remove('hidden');
      issuePanel.classList.add('hidden');
    });
    return wrap;
  }

  private buildPanes(unifiedDiff: string): HTMLElement {
    const container = el('div', 'diff-view');
    container.appendChild(el('div', 'pane-label-row'));
    const labels = container.firstElementChild as HTMLElement;
    labels.appendChild(el('span', 'pane-label pane-label-before', 'Original'));
    labels.appendChild(el('span', 'pane-label pane-label-after', 'Fixed'));

    const doc = parseUnifiedDiff(unifiedDiff);
    for (const file of doc.files) {
      const fileBox = el('div', 'diff-file');
      fileBox.appendChild(el('div', 'diff-path', file.path));
      for (const hunk of file.hunks) {
        const table = el('table', 'diff-hunk');
        for (const row of sideBySideRows(hunk)) {
          const tr = el('tr', 'diff-row');
          const leftNo = el('td', 'line-no', row.left.lineNo === null ? '' : String(row.left.lineNo));
          const left = el('td', `pane-before cell-${row.left.kind}`, row.left.text);
          const rightNo = el('td', 'line-no', row.right.lineNo === null ? '' : String(row.right.lineNo));
          const right = el('td', `pane-after cell-${row.right.kind}`, row.right.text);
          tr.appendChild(leftNo);
          tr.appendChild(left);
          tr.appendChild(rightNo);
          tr.appendChild(right);
          table.appendChild(tr);
        }
        fileBox.appendChild(table);
      }
      container.appendChild(fileBox);
    }
    return container;
  }

  private buildActions(detail: SuggestionDetail): HTMLElement {
    const bar = el('div', 'action-bar');
    const stage = el('button', 'action action-stage', 'Stage Fix Suggestion to Commit Queue');
    const copy = el('button', 'action action-copy', 'Copy Fix Suggestion');
    const reject = el('button', 'action action-reject', 'Reject');
    bar.appendChild(stage);
    bar.appendChild(copy);
    bar.appendChild(reject);

    stage.addEventListener('click', () =>
      void this.runAction(detail, 'stage', async () => {
        this.toast('Fix staged to the commit queue.');
        await this.showList();
      }),
    );
    copy.addEventListener('click', () =>
      void this.runAction(detail, 'copy', async (updated) => {
        const copyText = this.options.copyText ?? defaultCopy;
        await copyText(detail.patch_text);
        this.toast('Fix copied to clipboard.');
        this.renderDetail(updated);
      }),
    );
    reject.addEventListener('click', () =>
      void this.runAction(detail, 'reject', async () => {
        this.toast('Suggestion rejected.');
        await this.showList();
      }),
    );
    return bar;
  }

  /**
   * One server action per click: a fresh idempotency key is minted here,
   * and the busy flag swallows double-clicks while the request is in
   * flight. 409 means our state was stale; refetch instead of failing.
   */
  private async runAction(
    detail: SuggestionDetail,
    action: ReviewAction,
    onDone: (updated: SuggestionDetail) => Promise<void> | void,
  ): Promise<void> {
    if (this.busy) return;
    this.busy = true;
    this.root.querySelectorAll<HTMLButtonElement>('.action').forEach((b) => (b.disabled = true));
    try {
      const updated = await this.api.act(detail.suggestion_id, action, {
        idempotencyKey: newIdempotencyKey(),
        adopter: this.options.adopter,
      });
      await onDone(updated);
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.toast('Suggestion changed elsewhere; view refreshed.');
        await this.openDetail(detail.suggestion_id);
      } else {
        this.renderError(err);
      }
    } finally {
      this.busy = false;
    }
  }

  toast(message: string): void {
    const note = el('div', 'toast', message);
    this.root.appendChild(note);
    setTimeout(() => note.remove(), 4000);
  }
}
