/** Pure scene construction: what the network panel draws, minus positions.
 *
 * Visual transfer functions (documented constants):
 *   node radius  r(hits) = R_MIN + R_SCALE * sqrt(hits)        (monotone)
 *   edge width   w(v)    = W_MIN + W_SCALE * |v| / maxAbs      (monotone)
 * Edge gradients run source -> target: yellow-to-green for positive values,
 * yellow-to-red for negative; colorblind-safe mode replaces the positive
 * ramp with white-to-blue.
 */

import type { ClustersPayload, Meta, WindowPayload } from "./types.js";
import type { ViewState } from "./state.js";

export const R_MIN = 6;
export const R_SCALE = 1.6;
export const W_MIN = 1;
export const W_SCALE = 5;

export const COLOR_NEUTRAL = "#f5d742"; // yellow
export const COLOR_POSITIVE = "#3cab44"; // green
export const COLOR_POSITIVE_CB = "#2166c8"; // blue (colorblind-safe ramp ends white->blue)
export const COLOR_POSITIVE_CB_FROM = "#ffffff";
export const COLOR_NEGATIVE = "#d63a2f"; // red

export const CLUSTER_PALETTE = [
  "#8dd3c7", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
  "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5",
];

export interface SceneNode {
  rule: number;
  name: string;
  hits: number;
  radius: number;
  /** Computed cluster id, if the rule is in one and not pinned. */
  cluster: number | null;
  color: string | null; // mark color or cluster color
  pinned: { x: number; y: number } | null;
  label: string | null;
}

export interface SceneEdge {
  src: number;
  dst: number;
  value: number;
  width: number;
  gradientFrom: string;
  gradientTo: string;
  curved: boolean;
}

export interface SceneCluster {
  id: number;
  members: number[];
  color: string;
  painted: boolean;
}

export interface Scene {
  nodes: SceneNode[];
  edges: SceneEdge[];
  clusters: SceneCluster[];
}

export function nodeRadius(hits: number): number {
  return R_MIN + R_SCALE * Math.sqrt(Math.max(hits, 0));
}

type LinkKey = string;

function keyOf(src: number, dst: number): LinkKey {
  return `${src}:${dst}`;
}

/** Linear blend of two link sets; links absent on one side count as zero. */
export function interpolateLinks(
  a: WindowPayload,
  b: WindowPayload | null,
  frac: number,
): { src: number; dst: number; value: number }[] {
  if (b === null || frac <= 0) return a.links.map((l) => ({ ...l }));
  const out = new Map<LinkKey, { src: number; dst: number; value: number }>();
  for (const l of a.links) {
    out.set(keyOf(l.src, l.dst), { src: l.src, dst: l.dst, value: l.value * (1 - frac) });
  }
  for (const l of b.links) {
    const k = keyOf(l.src, l.dst);
    const cur = out.get(k);
    if (cur) cur.value += l.value * frac;
    else out.set(k, { src: l.src, dst: l.dst, value: l.value * frac });
  }
  return [...out.values()].filter((l) => l.value !== 0);
}

export function edgeColors(
  value: number,
  colorblindSafe: boolean,
): { from: string; to: string } {
  if (value >= 0) {
    return colorblindSafe
      ? { from: COLOR_POSITIVE_CB_FROM, to: COLOR_POSITIVE_CB }
      : { from: COLOR_NEUTRAL, to: COLOR_POSITIVE };
  }
  return { from: COLOR_NEUTRAL, to: COLOR_NEGATIVE };
}

/**
 * Build the drawable scene for one timeline position.
 *
 * `next`/`frac` implement playback interpolation between consecutive
 * windows; `clusters` is the server's clustering response (or null while in
 * flight). Every rule in `meta` yields a node whether or not it fired.
 */
export function buildScene(
  meta: Meta,
  win: WindowPayload,
  next: WindowPayload | null,
  frac: number,
  view: ViewState,
  clusters: ClustersPayload | null,
): Scene {
  const hitsByRule = new Map(win.nodes.map((n) => [n.rule, n.hits]));
  const assignment = new Map<number, number>();
  if (clusters) {
    for (const [rule, cid] of Object.entries(clusters.assignment)) {
      assignment.set(Number(rule), cid);
    }
  }

  const clusterColor = new Map<number, string>();
  const computed: SceneCluster[] = [];
  if (clusters) {
    clusters.clusters.forEach((members, i) => {
      const id = members.length ? Math.min(...members) : i;
      const color = CLUSTER_PALETTE[i % CLUSTER_PALETTE.length]!;
      clusterColor.set(id, color);
      computed.push({ id, members: [...members], color, painted: false });
    });
  }
  const painted = new Map<number, number[]>();
  for (const [rule, mark] of view.marks) {
    if (mark.cluster === undefined) continue;
    let members = painted.get(mark.cluster);
    if (!members) {
      members = [];
      painted.set(mark.cluster, members);
    }
    members.push(rule);
  }
  for (const [cid, members] of painted) {
    const mark = view.marks.get(members[0]!)!;
    computed.push({ id: 1000 + cid, members, color: mark.color, painted: true });
  }

  const nodes: SceneNode[] = meta.rules.map((r) => {
    const hits = hitsByRule.get(r.id) ?? 0;
    const pinnedAt = view.pinned.get(r.id) ?? null;
    const cluster = pinnedAt === null ? assignment.get(r.id) ?? null : null;
    const mark = view.marks.get(r.id);
    const color = mark?.color ?? (cluster !== null ? clusterColor.get(cluster) ?? null : null);
    const label =
      view.labelMode === "all" || (view.labelMode === "selected" && view.selected === r.id)
        ? mark?.label ?? r.name
        : null;
    return { rule: r.id, name: r.name, hits, radius: nodeRadius(hits), cluster, color, pinned: pinnedAt, label };
  });

  const blended = interpolateLinks(win, next, frac);
  let maxAbs = 0;
  for (const l of blended) maxAbs = Math.max(maxAbs, Math.abs(l.value));
  const edges: SceneEdge[] = [];
  for (const l of blended) {
    if (Math.abs(l.value) < view.visibilityThreshold) continue;
    const { from, to } = edgeColors(l.value, view.colorblindSafe);
    edges.push({
      src: l.src,
      dst: l.dst,
      value: l.value,
      width: W_MIN + (maxAbs > 0 ? (W_SCALE * Math.abs(l.value)) / maxAbs : 0),
      gradientFrom: from,
      gradientTo: to,
      curved: view.curvedEdges,
    });
  }

  return { nodes, edges, clusters: computed };
}
