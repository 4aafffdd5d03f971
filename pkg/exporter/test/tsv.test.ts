import { describe, expect, it } from "vitest";

import { parseTsv } from "../src/tsv.js";

describe("tsv parsing", () => {
  it("reads label/text rows", () => {
    const { rows, skippedEmpty } = parseTsv("a\thello there\nb\tbye now\n");
    expect(rows).toEqual([
      { label: "a", text: "hello there" },
      { label: "b", text: "bye now" },
    ]);
    expect(skippedEmpty).toBe(0);
  });

  it("tolerates a header line and blank lines", () => {
    const { rows } = parseTsv("label\ttext\n\na\thi\n\n");
    expect(rows).toEqual([{ label: "a", text: "hi" }]);
  });

  it("keeps tabs inside the text column", () => {
    const { rows } = parseTsv("a\tfirst\tsecond\n");
    expect(rows[0].text).toBe("first\tsecond");
  });

  it("skips and counts empty-text rows", () => {
    const { rows, skippedEmpty } = parseTsv("a\thi\nb\t\nc\t   \nd\tok\n");
    expect(rows.map((r) => r.label)).toEqual(["a", "d"]);
    expect(skippedEmpty).toBe(2);
  });

  it("reports malformed lines by number", () => {
    expect(() => parseTsv("a\thi\nno tab here\n")).toThrow("line 2");
    expect(() => parseTsv("\tjust text\n")).toThrow("line 1: empty label");
  });
});
