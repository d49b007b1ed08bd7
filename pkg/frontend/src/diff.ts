/**
 * Unified-diff parsing and the side-by-side pane model.
 *
 * The parser keeps every line of the server's diff, so serializing the
 * parsed document reproduces the input byte for byte. The panes are a
 * projection of that model; they never feed back into it.
 */

export type RowTag = 'context' | 'removed' | 'added' | 'meta';

export interface HunkRow {
  tag: RowTag;
  text: string;
  /** context line that arrived with no leading space (some diff tools) */
  bare?: boolean;
}

export interface HunkView {
  header: string;
  oldStart: number;
  newStart: number;
  rows: HunkRow[];
}

export interface FileDiffView {
  oldLabel: string;
  newLabel: string;
  path: string;
  hunks: HunkView[];
}

export interface DiffDocument {
  preamble: string[];
  files: FileDiffView[];
  trailingNewline: boolean;
}

export interface PaneCell {
  lineNo: number | null;
  text: string;
  kind: 'context' | 'removed' | 'added' | 'filler';
}

export interface PaneRow {
  left: PaneCell;
  right: PaneCell;
}

const HUNK_RE = /^@@ -(\d+)(?:,\d+)? \+(\d+)(?:,\d+)? @@/;

function stripLabel(label: string): string {
  const name = label.split('\t')[0];
  if (name.startsWith('a/') || name.startsWith('b/')) return name.slice(2);
  return name;
}

export function parseUnifiedDiff(text: string): DiffDocument {
  const trailingNewline = text.endsWith('\n');
  const lines = text.split('\n');
  if (trailingNewline) lines.pop();

  const doc: DiffDocument = { preamble: [], files: [], trailingNewline };
  let file: FileDiffView | null = null;
  let hunk: HunkView | null = null;

  for (let i = 0; i < lines.length; i++) {
    const line = lines[i];
    if (line.startsWith('--- ') && i + 1 < lines.length && lines[i + 1].startsWith('+++ ')) {
      const newLabel = lines[i + 1].slice(4);
      file = {
        oldLabel: line.slice(4),
        newLabel,
        path: stripLabel(newLabel),
        hunks: [],
      };
      doc.files.push(file);
      hunk = null;
      i++;
      continue;
    }
    const match = file ? HUNK_RE.exec(line) : null;
    if (match) {
      hunk = {
        header: line,
        oldStart: parseInt(match[1], 10),
        newStart: parseInt(match[2], 10),
        rows: [],
      };
      file!.hunks.push(hunk);
      continue;
    }
    if (hunk) {
      if (line.startsWith('-')) hunk.rows.push({ tag: 'removed', text: line.slice(1) });
      else if (line.startsWith('+')) hunk.rows.push({ tag: 'added', text: line.slice(1) });
      else if (line.startsWith(' ')) hunk.rows.push({ tag: 'context', text: line.slice(1) });
      else if (line.startsWith('\\')) hunk.rows.push({ tag: 'meta', text: line });
      else if (line === '') hunk.rows.push({ tag: 'context', text: '', bare: true });
      else {
        // unknown line ends the hunk (git noise between files)
        hunk = null;
        doc.preamble.push(line);
      }
      continue;
    }
    doc.preamble.push(line);
  }
  return doc;
}

export function serializeUnifiedDiff(doc: DiffDocument): string {
  const out: string[] = [...doc.preamble];
  for (const file of doc.files) {
    out.push(`--- ${file.oldLabel}`);
    out.push(`+++ ${file.newLabel}`);
    for (const hunk of file.hunks) {
      out.push(hunk.header);
      for (const row of hunk.rows) {
        if (row.tag === 'meta') out.push(row.text);
        else if (row.tag === 'removed') out.push(`-${row.text}`);
        else if (row.tag === 'added') out.push(`+${row.text}`);
        else out.push(row.bare ? '' : ` ${row.text}`);
      }
    }
  }
  return out.join('\n') + (doc.trailingNewline ? '\n' : '');
}

/**
 * Pair hunk rows into side-by-side rows: context spans both panes, a
 * run of removals pairs index-wise with the following run of additions,
 * and the unpaired tail gets filler cells on the other side.
 */
export function sideBySideRows(hunk: HunkView): PaneRow[] {
  const rows: PaneRow[] = [];
  let oldNo = hunk.oldStart;
  let newNo = hunk.newStart;
  let i = 0;
  const body = hunk.rows.filter((r) => r.tag !== 'meta');

  while (i < body.length) {
    const row = body[i];
    if (row.tag === 'context') {
      rows.push({
        left: { lineNo: oldNo++, text: row.text, kind: 'context' },
        right: { lineNo: newNo++, text: row.text, kind: 'context' },
      });
      i++;
      continue;
    }
    const removed: HunkRow[] = [];
    while (i < body.length && body[i].tag === 'removed') removed.push(body[i++]);
    const added: HunkRow[] = [];
    while (i < body.length && body[i].tag === 'added') added.push(body[i++]);
    const span = Math.max(removed.length, added.length);
    for (let k = 0; k < span; k++) {
      const left: PaneCell = removed[k]
        ? { lineNo: oldNo++, text: removed[k].text, kind: 'removed' }
        : { lineNo: null, text: '', kind: 'filler' };
      const right: PaneCell = added[k]
        ? { lineNo: newNo++, text: added[k].text, kind: 'added' }
        : { lineNo: null, text: '', kind: 'filler' };
      rows.push({ left, right });
    }
  }
  return rows;
}
