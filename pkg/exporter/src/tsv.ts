export interface TsvRow {
  label: string;
  text: string;
}

export interface TsvResult {
  rows: TsvRow[];
  skippedEmpty: number;
}

/**
 * Parse a (label, text) TSV. An optional literal "label\ttext" header is
 * tolerated. Rows whose text is empty after trimming are skipped and
 * counted, matching how they are reported by the exporter. Text may
 * contain further tabs; only the first one separates the columns.
 */
export function parseTsv(content: string): TsvResult {
  const rows: TsvRow[] = [];
  let skippedEmpty = 0;
  const lines = content.split("\n");
  for (let ln = 0; ln < lines.length; ln++) {
    const line = lines[ln].replace(/\r$/, "");
    if (line === "") continue;
    if (ln === 0 && line === "label\ttext") continue;
    const tab = line.indexOf("\t");
    if (tab < 0) throw new Error(`line ${ln + 1}: expected 'label<TAB>text'`);
    const label = line.slice(0, tab).trim();
    const text = line.slice(tab + 1).trim();
    if (label === "") throw new Error(`line ${ln + 1}: empty label`);
    if (text === "") {
      skippedEmpty++;
      continue;
    }
    rows.push({ label, text });
  }
  return { rows, skippedEmpty };
}
