/** View state and its pure transition functions.
 *
 * Everything the panels render is derived from this object plus served
 * payloads; reducers return fresh objects so the UI can diff cheaply and
 * tests can replay interaction sequences.
 */

export type LabelMode = "none" | "selected" | "all";
export type ClusterMode = "step" | { window: number } | "global";

export interface Mark {
  color: string;
  label?: string;
  /** Painted-cluster id; marks without one color nodes but group nothing. */
  cluster?: number;
}

export interface Playback {
  playing: boolean;
  speed: number;
  interpolation: boolean;
}

export interface ViewState {
  /** Continuous during playback; integer part selects the window. */
  windowIndex: number;
  playback: Playback;
  clusterThreshold: number;
  clusterMode: ClusterMode;
  visibilityThreshold: number;
  pinned: Map<number, { x: number; y: number }>;
  marks: Map<number, Mark>;
  selected: number | null;
  colorblindSafe: boolean;
  curvedEdges: boolean;
  labelMode: LabelMode;
  zoom: { t0: number; t1: number } | null;
}

export function initialViewState(): ViewState {
  return {
    windowIndex: 0,
    playback: { playing: false, speed: 1, interpolation: true },
    clusterThreshold: 0.05,
    clusterMode: "step",
    visibilityThreshold: 0,
    pinned: new Map(),
    marks: new Map(),
    selected: null,
    colorblindSafe: false,
    curvedEdges: true,
    labelMode: "selected",
    zoom: null,
  };
}

function clampIndex(k: number, windowCount: number): number {
  if (!Number.isFinite(k)) return 0;
  return Math.min(Math.max(k, 0), Math.max(windowCount - 1, 0));
}

export function seek(view: ViewState, k: number, windowCount: number): ViewState {
  return { ...view, windowIndex: clampIndex(k, windowCount) };
}

export function play(view: ViewState): ViewState {
  return { ...view, playback: { ...view.playback, playing: true } };
}

export function pause(view: ViewState): ViewState {
  return { ...view, playback: { ...view.playback, playing: false } };
}

export function setSpeed(view: ViewState, speed: number): ViewState {
  return { ...view, playback: { ...view.playback, speed: Math.max(speed, 0.01) } };
}

export function toggleInterpolation(view: ViewState): ViewState {
  return {
    ...view,
    playback: { ...view.playback, interpolation: !view.playback.interpolation },
  };
}

/** Advance playback by wall-clock dt (windows per second * speed). */
export function tick(view: ViewState, dtSeconds: number, windowCount: number): ViewState {
  if (!view.playback.playing) return view;
  const next = view.windowIndex + dtSeconds * view.playback.speed;
  if (next >= windowCount - 1) {
    return { ...pause(view), windowIndex: clampIndex(next, windowCount) };
  }
  return { ...view, windowIndex: next };
}

export function select(view: ViewState, rule: number | null): ViewState {
  return { ...view, selected: rule };
}

export function setThresholds(
  view: ViewState,
  opts: { cluster?: number; visibility?: number },
): ViewState {
  return {
    ...view,
    clusterThreshold: Math.max(opts.cluster ?? view.clusterThreshold, 0),
    visibilityThreshold: Math.max(opts.visibility ?? view.visibilityThreshold, 0),
  };
}

export function setClusterMode(view: ViewState, mode: ClusterMode): ViewState {
  return { ...view, clusterMode: mode };
}

export function clusterModeQuery(mode: ClusterMode): string {
  if (mode === "step" || mode === "global") return mode;
  return `window:${mode.window}`;
}

export function setZoom(view: ViewState, zoom: { t0: number; t1: number } | null): ViewState {
  if (zoom && zoom.t1 < zoom.t0) zoom = { t0: zoom.t1, t1: zoom.t0 };
  return { ...view, zoom };
}

// -- pinning and marking ------------------------------------------------------

export function pin(
  view: ViewState,
  rule: number,
  x: number,
  y: number,
  canvas: { width: number; height: number },
): ViewState {
  const pinned = new Map(view.pinned);
  pinned.set(rule, {
    x: Math.min(Math.max(x, 0), canvas.width),
    y: Math.min(Math.max(y, 0), canvas.height),
  });
  return { ...view, pinned };
}

export function unpin(view: ViewState, rule: number): ViewState {
  const pinned = new Map(view.pinned);
  pinned.delete(rule);
  return { ...view, pinned };
}

export function markRules(
  view: ViewState,
  rules: number[],
  color: string,
  label?: string,
  cluster?: number,
): ViewState {
  const marks = new Map(view.marks);
  for (const rule of rules) marks.set(rule, { color, label, cluster });
  return { ...view, marks };
}

export function unmark(view: ViewState, rules: number[]): ViewState {
  const marks = new Map(view.marks);
  for (const rule of rules) marks.delete(rule);
  return { ...view, marks };
}

/** Next unused painted-cluster id. */
export function nextPaintedCluster(view: ViewState): number {
  let max = -1;
  for (const mark of view.marks.values()) {
    if (mark.cluster !== undefined) max = Math.max(max, mark.cluster);
  }
  return max + 1;
}

/** Rules excluded from server-side clustering: the pinned set. */
export function pinnedQuery(view: ViewState): string {
  return [...view.pinned.keys()].sort((a, b) => a - b).join(",");
}
