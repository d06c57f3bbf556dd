import { readFileSync, readdirSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

const SRC = join(__dirname, "..", "src");

/**
 * Guard for the single-source-of-truth invariant: every number the UI shows
 * (coverage, histogram counts, computed results) arrives rendered or
 * pre-binned from the API. No source module may implement an aggregation.
 */
describe("no client-side aggregation code path", () => {
  const files = readdirSync(SRC).filter((name) => name.endsWith(".ts"));

  it("has source files to scan", () => {
    expect(files.length).toBeGreaterThanOrEqual(5);
  });

  const forbidden = [
    /\.reduce\(/, // folding value lists
    /\bmean\s*\(/i,
    /\bvariance\s*\(/i,
    /\baverage\s*\(/i,
    /\baggregate\s*\(/i,
  ];

  for (const name of files) {
    it(`${name} performs no aggregation`, () => {
      const text = readFileSync(join(SRC, name), "utf-8");
      for (const pattern of forbidden) {
        expect(text).not.toMatch(pattern);
      }
    });
  }

  it("the dialog result element is populated only from computed_result", () => {
    const text = readFileSync(join(SRC, "dialog.ts"), "utf-8");
    const assignments = [...text.matchAll(/resultEl\.textContent\s*=\s*([^;]+);/g)].map((m) => m[1]);
    expect(assignments.length).toBeGreaterThan(0);
    for (const rhs of assignments) {
      expect(rhs.includes("computed_result") || rhs.startsWith('"')).toBe(true);
    }
  });
});
