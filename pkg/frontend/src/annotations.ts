/** Sidecar annotation files: pins and marks, exportable and re-importable. */

import type { ViewState } from "./state.js";

export const ANNOTATION_VERSION = 1;

export interface AnnotationFile {
  version: number;
  model: string;
  pins: { rule: number; x: number; y: number }[];
  marks: { rule: number; color: string; label?: string; cluster?: number }[];
}

export function exportAnnotations(view: ViewState, model: string): AnnotationFile {
  const pins = [...view.pinned.entries()]
    .map(([rule, p]) => ({ rule, x: p.x, y: p.y }))
    .sort((a, b) => a.rule - b.rule);
  const marks = [...view.marks.entries()]
    .map(([rule, m]) => {
      const out: AnnotationFile["marks"][number] = { rule, color: m.color };
      if (m.label !== undefined) out.label = m.label;
      if (m.cluster !== undefined) out.cluster = m.cluster;
      return out;
    })
    .sort((a, b) => a.rule - b.rule);
  return { version: ANNOTATION_VERSION, model, pins, marks };
}

export interface ImportResult {
  view: ViewState;
  /** Rule ids referenced by the file but unknown to the loaded model. */
  skipped: number[];
}

export function importAnnotations(
  view: ViewState,
  file: AnnotationFile,
  knownRules: Set<number>,
): ImportResult {
  if (file.version !== ANNOTATION_VERSION) {
    throw new Error(`unsupported annotation file version ${file.version}`);
  }
  const pinned = new Map(view.pinned);
  const marks = new Map(view.marks);
  const skipped: number[] = [];
  for (const p of file.pins) {
    if (!knownRules.has(p.rule)) {
      skipped.push(p.rule);
      continue;
    }
    pinned.set(p.rule, { x: p.x, y: p.y });
  }
  for (const m of file.marks) {
    if (!knownRules.has(m.rule)) {
      skipped.push(m.rule);
      continue;
    }
    marks.set(m.rule, { color: m.color, label: m.label, cluster: m.cluster });
  }
  return { view: { ...view, pinned, marks }, skipped };
}
