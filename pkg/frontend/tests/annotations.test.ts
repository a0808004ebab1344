import { describe, expect, it } from "vitest";

import { exportAnnotations, importAnnotations } from "../src/annotations.js";
import { initialViewState, markRules, pin } from "../src/state.js";
import { loadGolden } from "./fixture.js";

const doc = loadGolden();
const CANVAS = { width: 760, height: 640 };
const known = new Set(doc.meta.rules.map((r) => r.id));

describe("annotation sidecar", () => {
  it("export then import restores pins and marks exactly", () => {
    let v = pin(initialViewState(), 0, 12, 34, CANVAS);
    v = pin(v, 7, 56, 78, CANVAS);
    v = markRules(v, [1, 2], "#ff0000", "drivers");
    v = markRules(v, [5], "#0000ff", undefined, 0);
    const file = exportAnnotations(v, doc.meta.model);
    const { view: restored, skipped } = importAnnotations(initialViewState(), file, known);
    expect(skipped).toEqual([]);
    expect(restored.pinned).toEqual(v.pinned);
    expect(restored.marks).toEqual(v.marks);
    // and the file itself round-trips through JSON unchanged
    expect(JSON.parse(JSON.stringify(file))).toEqual(file);
  });

  it("unknown rule ids are reported and skipped, known ones still land", () => {
    const file = {
      version: 1,
      model: doc.meta.model,
      pins: [
        { rule: 0, x: 1, y: 2 },
        { rule: 999, x: 3, y: 4 },
      ],
      marks: [{ rule: 998, color: "#123456" }],
    };
    const { view, skipped } = importAnnotations(initialViewState(), file, known);
    expect(skipped).toEqual([999, 998]);
    expect(view.pinned.get(0)).toEqual({ x: 1, y: 2 });
    expect(view.pinned.has(999)).toBe(false);
    expect(view.marks.size).toBe(0);
  });

  it("rejects unknown versions", () => {
    expect(() =>
      importAnnotations(initialViewState(), { version: 99, model: "m", pins: [], marks: [] }, known),
    ).toThrow(/version/);
  });
});
