import { describe, expect, it } from "vitest";

import { cursorTime } from "../src/charts.js";
import {
  clusterModeQuery,
  initialViewState,
  markRules,
  pause,
  pin,
  pinnedQuery,
  play,
  seek,
  setThresholds,
  setZoom,
  tick,
  toggleInterpolation,
  unpin,
} from "../src/state.js";
import { loadGolden } from "./fixture.js";

const doc = loadGolden();
const N = doc.windows.length;
const CANVAS = { width: 760, height: 640 };

describe("timeline", () => {
  it("seek clamps to the window range", () => {
    const v = initialViewState();
    expect(seek(v, -3, N).windowIndex).toBe(0);
    expect(seek(v, N + 10, N).windowIndex).toBe(N - 1);
    expect(seek(v, 4.25, N).windowIndex).toBe(4.25);
  });

  it("seeking moves the dashed cursor to the window's start time", () => {
    let v = initialViewState();
    for (const k of [0, 3, 7, N - 1]) {
      v = seek(v, k, N);
      expect(cursorTime(doc.windows, v.windowIndex)).toBe(doc.windows[k]!.t_start);
    }
    // fractional playback position still points at the containing window
    v = seek(v, 5.9, N);
    expect(cursorTime(doc.windows, v.windowIndex)).toBe(doc.windows[5]!.t_start);
  });

  it("play advances monotonically and pause freezes the position", () => {
    let v = play(seek(initialViewState(), 2, N));
    const positions = [v.windowIndex];
    for (let i = 0; i < 5; i++) {
      v = tick(v, 0.1, N);
      positions.push(v.windowIndex);
    }
    for (let i = 1; i < positions.length; i++) {
      expect(positions[i]!).toBeGreaterThan(positions[i - 1]!);
    }
    const frozen = pause(v);
    expect(tick(frozen, 10, N).windowIndex).toBe(frozen.windowIndex);
  });

  it("playback at 2x advances twice as fast", () => {
    const base = play(initialViewState());
    const fast = { ...base, playback: { ...base.playback, speed: 2 } };
    expect(tick(fast, 0.5, N).windowIndex).toBeCloseTo(2 * tick(base, 0.5, N).windowIndex, 12);
  });

  it("interpolation toggles", () => {
    const v = initialViewState();
    expect(toggleInterpolation(v).playback.interpolation).toBe(!v.playback.interpolation);
  });
});

describe("pinning", () => {
  it("pin positions clamp to the canvas", () => {
    const v = pin(initialViewState(), 3, -50, 9e9, CANVAS);
    expect(v.pinned.get(3)).toEqual({ x: 0, y: CANVAS.height });
  });

  it("a pin survives 100 seeks", () => {
    let v = pin(initialViewState(), 2, 321, 111, CANVAS);
    for (let i = 0; i < 100; i++) {
      v = seek(v, i % N, N);
    }
    expect(v.pinned.get(2)).toEqual({ x: 321, y: 111 });
  });

  it("pins survive threshold and zoom changes, unpin removes exactly one", () => {
    let v = pin(initialViewState(), 1, 10, 20, CANVAS);
    v = pin(v, 5, 30, 40, CANVAS);
    v = setThresholds(v, { cluster: 0.4, visibility: 0.2 });
    v = setZoom(v, { t0: 10, t1: 30 });
    expect(v.pinned.size).toBe(2);
    v = unpin(v, 1);
    expect([...v.pinned.keys()]).toEqual([5]);
  });

  it("pinned set is what the server's cluster query excludes", () => {
    let v = pin(initialViewState(), 9, 1, 1, CANVAS);
    v = pin(v, 4, 2, 2, CANVAS);
    expect(pinnedQuery(v)).toBe("4,9");
  });
});

describe("marks and misc", () => {
  it("marking a set of rules applies one shared color and label", () => {
    const v = markRules(initialViewState(), [1, 2, 3], "#00ff00", "dephosphorylation");
    for (const r of [1, 2, 3]) {
      expect(v.marks.get(r)).toEqual({ color: "#00ff00", label: "dephosphorylation", cluster: undefined });
    }
  });

  it("cluster mode serializes to the server's query syntax", () => {
    expect(clusterModeQuery("step")).toBe("step");
    expect(clusterModeQuery("global")).toBe("global");
    expect(clusterModeQuery({ window: 10 })).toBe("window:10");
  });

  it("zoom normalizes inverted ranges", () => {
    const v = setZoom(initialViewState(), { t0: 30, t1: 10 });
    expect(v.zoom).toEqual({ t0: 10, t1: 30 });
  });
});
