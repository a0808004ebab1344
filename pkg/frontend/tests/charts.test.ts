import { describe, expect, it } from "vitest";

import {
  OTHER_COLOR,
  SELF_COLOR,
  clipLines,
  hoverValue,
  incomingLines,
  linearScale,
  outgoingLines,
  phenotypeLines,
  valueExtent,
  windowTimes,
} from "../src/charts.js";
import { ForceLayout } from "../src/layout.js";
import { loadGolden } from "./fixture.js";

const doc = loadGolden();

describe("phenotype chart", () => {
  it("plots every observable with exact served values", () => {
    const lines = phenotypeLines(doc.observables);
    expect(lines.map((l) => l.id)).toEqual(doc.observables.names);
    lines.forEach((line, j) => {
      line.points.forEach((p, i) => {
        expect(p.t).toBe(doc.observables.times[i]);
        expect(p.v).toBe(doc.observables.values[i]![j]);
      });
    });
  });
});

describe("rule influence charts", () => {
  const times = windowTimes(doc.windows);
  const series = {
    rule: 2,
    incoming: { "0": [0.5, null], "2": [0.1, 0.2] },
    outgoing: { "1": [null, -0.3] },
    self: [0.1, 0.2] as (number | null)[],
  };

  it("self series is red, others gray", () => {
    const inc = incomingLines(series, times.slice(0, 2));
    const self = inc.find((l) => l.id === "self")!;
    expect(self.color).toBe(SELF_COLOR);
    expect(self.emphasized).toBe(true);
    expect(self.points.map((p) => p.v)).toEqual([0.1, 0.2]);
    const others = inc.filter((l) => l.id !== "self");
    expect(others.map((l) => l.color)).toEqual([OTHER_COLOR]);
    expect(others[0]!.id).toBe("rule 0"); // the q == rule entry is folded into the self line
    const out = outgoingLines(series, times.slice(0, 2));
    expect(out.map((l) => l.id).sort()).toEqual(["rule 1", "self"]);
  });

  it("gaps stay gaps", () => {
    const inc = incomingLines(series, times.slice(0, 2));
    expect(inc.find((l) => l.id === "rule 0")!.points[1]!.v).toBeNull();
  });
});

describe("zoom and hover", () => {
  it("clipping keeps exactly the in-range points on all lines", () => {
    const lines = phenotypeLines(doc.observables);
    const t0 = doc.observables.times[3]!;
    const t1 = doc.observables.times[10]!;
    for (const line of clipLines(lines, t0, t1)) {
      expect(line.points.length).toBe(8);
      expect(line.points.every((p) => p.t >= t0 && p.t <= t1)).toBe(true);
    }
  });

  it("hover returns the exact served value at the nearest time", () => {
    const line = phenotypeLines(doc.observables)[0]!;
    const i = 5;
    const hit = hoverValue(line, doc.observables.times[i]! + 0.01)!;
    expect(hit.t).toBe(doc.observables.times[i]);
    expect(hit.v).toBe(doc.observables.values[i]![0]);
  });

  it("linear scales invert", () => {
    const s = linearScale([0, 60], [34, 414]);
    expect(s.invert(s.apply(17))).toBeCloseTo(17, 9);
  });

  it("value extent handles flat and empty lines", () => {
    expect(valueExtent([])).toEqual([0, 1]);
    expect(valueExtent([{ id: "x", color: "#000", emphasized: false, points: [{ t: 0, v: 2 }] }])).toEqual([1.5, 2.5]);
  });
});

describe("force layout", () => {
  it("pinned bodies never move; unpinned bodies do", () => {
    const layout = new ForceLayout(760, 640);
    layout.update(
      [
        { id: 0, radius: 8, pinned: { x: 100, y: 100 } },
        { id: 1, radius: 8, pinned: null },
        { id: 2, radius: 8, pinned: null },
      ],
      [{ src: 0, dst: 1, strength: 0.5 }],
    );
    const before1 = { ...layout.position(1)! };
    for (let i = 0; i < 50; i++) layout.step();
    expect(layout.position(0)).toEqual({ x: 100, y: 100 });
    const after1 = layout.position(1)!;
    expect(after1.x !== before1.x || after1.y !== before1.y).toBe(true);
    // everything stays on canvas
    for (const id of [0, 1, 2]) {
      const p = layout.position(id)!;
      expect(p.x).toBeGreaterThanOrEqual(0);
      expect(p.x).toBeLessThanOrEqual(760);
      expect(p.y).toBeGreaterThanOrEqual(0);
      expect(p.y).toBeLessThanOrEqual(640);
    }
  });

  it("positions persist across scene updates (temporal coherence)", () => {
    const layout = new ForceLayout(760, 640);
    const bodies = [
      { id: 0, radius: 8, pinned: null },
      { id: 1, radius: 8, pinned: null },
    ];
    layout.update(bodies, []);
    for (let i = 0; i < 20; i++) layout.step();
    const settled = { ...layout.position(0)! };
    layout.update(bodies, []); // same nodes, new window
    expect(layout.position(0)).toEqual(settled);
  });
});
