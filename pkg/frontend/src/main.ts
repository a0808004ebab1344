/** DOM wiring: network panel, data panel, timeline, annotations.
 *
 * All influence math lives server-side; this module only fetches payloads,
 * derives a drawable scene, and renders SVG.
 */

import { ApiClient, LatestGate } from "./api.js";
import { exportAnnotations, importAnnotations } from "./annotations.js";
import type { AnnotationFile } from "./annotations.js";
import {
  clipLines,
  cursorTime,
  hoverValue,
  incomingLines,
  linearScale,
  outgoingLines,
  phenotypeLines,
  valueExtent,
  windowTimes,
} from "./charts.js";
import type { ChartLine } from "./charts.js";
import { ForceLayout } from "./layout.js";
import { buildScene } from "./scene.js";
import type { Scene } from "./scene.js";
import {
  clusterModeQuery,
  initialViewState,
  markRules,
  nextPaintedCluster,
  pause,
  pin,
  pinnedQuery,
  play,
  seek,
  select,
  setClusterMode,
  setSpeed,
  setThresholds,
  setZoom,
  tick,
  toggleInterpolation,
  unpin,
} from "./state.js";
import type { ViewState } from "./state.js";
import type { ClustersPayload, Meta, Observables, SeriesPayload, WindowPayload } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const NET_W = 760;
const NET_H = 640;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function svgEl(tag: string, attrs: Record<string, string> = {}): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}

class Explorer {
  api = new ApiClient();
  view: ViewState = initialViewState();
  meta!: Meta;
  observables!: Observables;
  windows: WindowPayload[] = [];
  clusters: ClustersPayload | null = null;
  series: SeriesPayload | null = null;
  layout = new ForceLayout(NET_W, NET_H);
  multiSelect = new Set<number>();

  clusterGate = new LatestGate();
  seriesGate = new LatestGate();

  netSvg!: SVGElement;
  tooltip!: HTMLDivElement;
  timeline!: HTMLInputElement;
  statusLine!: HTMLElement;
  chartsBox!: HTMLElement;
  lastFrame = 0;
  lastIntIndex = -1;

  async start(): Promise<void> {
    this.meta = await this.api.meta();
    this.observables = await this.api.observables();
    const count = Math.max(1, Math.ceil(this.meta.t_end / this.meta.tau));
    this.windows = await Promise.all(
      Array.from({ length: count }, (_, k) => this.api.window(k)),
    );
    this.buildDom();
    await this.refreshClusters();
    requestAnimationFrame((t) => this.frame(t));
  }

  get windowCount(): number {
    return this.windows.length;
  }

  setView(view: ViewState, opts: { clusters?: boolean; series?: boolean } = {}): void {
    this.view = view;
    if (opts.clusters) void this.refreshClusters();
    if (opts.series) void this.refreshSeries();
    this.syncControls();
  }

  async refreshClusters(): Promise<void> {
    const token = this.clusterGate.begin();
    const k = Math.floor(this.view.windowIndex);
    const payload = await this.api.clusters(
      k,
      this.view.clusterThreshold,
      clusterModeQuery(this.view.clusterMode),
      pinnedQuery(this.view),
    );
    if (this.clusterGate.isCurrent(token)) this.clusters = payload;
  }

  async refreshSeries(): Promise<void> {
    if (this.view.selected === null) {
      this.series = null;
      this.renderCharts();
      return;
    }
    const token = this.seriesGate.begin();
    const payload = await this.api.series(this.view.selected);
    if (this.seriesGate.isCurrent(token)) {
      this.series = payload;
      this.renderCharts();
    }
  }

  // -- frame loop -------------------------------------------------------

  frame(t: number): void {
    const dt = this.lastFrame ? (t - this.lastFrame) / 1000 : 0;
    this.lastFrame = t;
    if (this.view.playback.playing) {
      this.view = tick(this.view, dt, this.windowCount);
      this.syncControls();
    }
    const k = Math.floor(this.view.windowIndex);
    if (k !== this.lastIntIndex) {
      this.lastIntIndex = k;
      void this.refreshClusters();
      this.renderCharts(); // cursor moved
    }
    this.renderNetwork();
    requestAnimationFrame((t2) => this.frame(t2));
  }

  currentScene(): Scene {
    const k = Math.floor(this.view.windowIndex);
    const frac = this.view.playback.interpolation ? this.view.windowIndex - k : 0;
    const next = k + 1 < this.windowCount ? this.windows[k + 1]! : null;
    return buildScene(this.meta, this.windows[k]!, next, frac, this.view, this.clusters);
  }

  // -- network panel ----------------------------------------------------

  renderNetwork(): void {
    const scene = this.currentScene();
    this.layout.update(
      scene.nodes.map((n) => ({ id: n.rule, radius: n.radius, pinned: n.pinned })),
      scene.edges.map((e) => ({ src: e.src, dst: e.dst, strength: Math.abs(e.value) })),
    );
    this.layout.step();

    const svg = this.netSvg;
    svg.textContent = "";
    const defs = svgEl("defs");
    svg.appendChild(defs);

    const pos = (id: number) => this.layout.position(id) ?? { x: NET_W / 2, y: NET_H / 2 };

    for (const cluster of scene.clusters) {
      const pts = cluster.members.map(pos);
      if (!pts.length) continue;
      const cx = pts.reduce((s, p) => s + p.x, 0) / pts.length;
      const cy = pts.reduce((s, p) => s + p.y, 0) / pts.length;
      const r = Math.max(...pts.map((p) => Math.hypot(p.x - cx, p.y - cy)), 14) + 18;
      svg.appendChild(
        svgEl("circle", {
          cx: String(cx), cy: String(cy), r: String(r),
          fill: cluster.color, opacity: "0.25",
          stroke: cluster.color, "stroke-dasharray": cluster.painted ? "4 3" : "none",
        }),
      );
    }

    scene.edges.forEach((edge, i) => {
      const a = pos(edge.src);
      const b = pos(edge.dst);
      const gid = `grad${i}`;
      const grad = svgEl("linearGradient", {
        id: gid, gradientUnits: "userSpaceOnUse",
        x1: String(a.x), y1: String(a.y), x2: String(b.x), y2: String(b.y),
      });
      grad.appendChild(svgEl("stop", { offset: "0", "stop-color": edge.gradientFrom }));
      grad.appendChild(svgEl("stop", { offset: "1", "stop-color": edge.gradientTo }));
      defs.appendChild(grad);
      let d: string;
      if (edge.curved) {
        const mx = (a.x + b.x) / 2 - (b.y - a.y) * 0.12;
        const my = (a.y + b.y) / 2 + (b.x - a.x) * 0.12;
        d = `M${a.x},${a.y} Q${mx},${my} ${b.x},${b.y}`;
      } else {
        d = `M${a.x},${a.y} L${b.x},${b.y}`;
      }
      const path = svgEl("path", {
        d, fill: "none", stroke: `url(#${gid})`,
        "stroke-width": String(edge.width), "stroke-linecap": "round", opacity: "0.85",
      });
      path.addEventListener("pointerenter", (ev) =>
        this.showTooltip(ev as PointerEvent, this.edgeTip(edge.src, edge.dst, edge.value)),
      );
      path.addEventListener("pointerleave", () => this.hideTooltip());
      svg.appendChild(path);
    });

    for (const node of scene.nodes) {
      const p = pos(node.rule);
      const selected = this.view.selected === node.rule || this.multiSelect.has(node.rule);
      const circle = svgEl("circle", {
        cx: String(p.x), cy: String(p.y), r: String(node.radius),
        fill: node.color ?? "#cfcfcf",
        stroke: node.pinned ? "#111" : selected ? "#0a6cff" : "#666",
        "stroke-width": node.pinned || selected ? "3" : "1",
        cursor: "pointer",
      });
      circle.addEventListener("pointerenter", (ev) =>
        this.showTooltip(ev as PointerEvent, this.nodeTip(node.rule)),
      );
      circle.addEventListener("pointerleave", () => this.hideTooltip());
      circle.addEventListener("click", (ev) => this.onNodeClick(node.rule, ev as MouseEvent));
      circle.addEventListener("dblclick", () => this.setView(unpin(this.view, node.rule), { clusters: true }));
      this.makeDraggable(circle, node.rule);
      svg.appendChild(circle);
      if (node.label !== null) {
        svg.appendChild(
          Object.assign(svgEl("text", {
            x: String(p.x + node.radius + 3), y: String(p.y + 4),
            "font-size": "11", fill: "#222",
          }), { textContent: node.label }),
        );
      }
    }
  }

  onNodeClick(rule: number, ev: MouseEvent): void {
    if (ev.shiftKey) {
      if (this.multiSelect.has(rule)) this.multiSelect.delete(rule);
      else this.multiSelect.add(rule);
      return;
    }
    this.setView(select(this.view, this.view.selected === rule ? null : rule), { series: true });
  }

  makeDraggable(circle: SVGElement, rule: number): void {
    let dragging = false;
    circle.addEventListener("pointerdown", (ev) => {
      dragging = true;
      (ev.target as Element).setPointerCapture((ev as PointerEvent).pointerId);
    });
    circle.addEventListener("pointermove", (ev) => {
      if (!dragging) return;
      const rect = (this.netSvg as unknown as SVGGraphicsElement).getBoundingClientRect();
      const x = ((ev as PointerEvent).clientX - rect.left) * (NET_W / rect.width);
      const y = ((ev as PointerEvent).clientY - rect.top) * (NET_H / rect.height);
      this.view = pin(this.view, rule, x, y, { width: NET_W, height: NET_H });
    });
    circle.addEventListener("pointerup", () => {
      if (dragging) {
        dragging = false;
        void this.refreshClusters(); // pinned set changed
      }
    });
  }

  edgeTip(src: number, dst: number, value: number): string {
    const name = (id: number) => this.meta.rules[id]?.name ?? String(id);
    return `${name(src)} → ${name(dst)}\ninfluence ${value}`;
  }

  nodeTip(rule: number): string {
    const k = Math.floor(this.view.windowIndex);
    const win = this.windows[k]!;
    const name = this.meta.rules[rule]?.name ?? String(rule);
    const hits = win.nodes.find((n) => n.rule === rule)?.hits ?? 0;
    const selfLink = win.links.find((l) => l.src === rule && l.dst === rule);
    const incoming = win.links.filter((l) => l.dst === rule && l.src !== rule);
    const outgoing = win.links.filter((l) => l.src === rule && l.dst !== rule);
    const top = (ls: typeof incoming) =>
      [...ls].sort((a, b) => Math.abs(b.value) - Math.abs(a.value)).slice(0, 3);
    const fmt = (l: { src: number; dst: number; value: number }, dir: "in" | "out") =>
      dir === "in"
        ? `  ← ${this.meta.rules[l.src]?.name}: ${l.value}`
        : `  → ${this.meta.rules[l.dst]?.name}: ${l.value}`;
    return [
      `'${name}'  hits ${hits}`,
      `self-influence ${selfLink ? selfLink.value : "none"}`,
      ...(incoming.length ? ["top incoming:", ...top(incoming).map((l) => fmt(l, "in"))] : []),
      ...(outgoing.length ? ["top outgoing:", ...top(outgoing).map((l) => fmt(l, "out"))] : []),
    ].join("\n");
  }

  showTooltip(ev: PointerEvent, text: string): void {
    this.tooltip.textContent = text;
    this.tooltip.style.display = "block";
    this.tooltip.style.left = `${ev.pageX + 12}px`;
    this.tooltip.style.top = `${ev.pageY + 12}px`;
  }

  hideTooltip(): void {
    this.tooltip.style.display = "none";
  }

  // -- data panel -------------------------------------------------------

  renderCharts(): void {
    if (!this.chartsBox) return;
    this.chartsBox.textContent = "";
    const zoom = this.view.zoom ?? { t0: 0, t1: this.meta.t_end };
    const cursor = cursorTime(this.windows, this.view.windowIndex);

    this.chartsBox.appendChild(
      this.chartSvg("phenotype", clipLines(phenotypeLines(this.observables), zoom.t0, zoom.t1), cursor, zoom),
    );
    const times = windowTimes(this.windows);
    if (this.series) {
      const name = this.meta.rules[this.series.rule]?.name;
      this.chartsBox.appendChild(
        this.chartSvg(`incoming influence of '${name}'`,
          clipLines(incomingLines(this.series, times), zoom.t0, zoom.t1), cursor, zoom),
      );
      this.chartsBox.appendChild(
        this.chartSvg(`outgoing influence of '${name}'`,
          clipLines(outgoingLines(this.series, times), zoom.t0, zoom.t1), cursor, zoom),
      );
    } else {
      this.chartsBox.appendChild(el("p", { class: "hint" }, "select a rule to see its influence charts"));
    }
  }

  chartSvg(title: string, lines: ChartLine[], cursor: number, zoom: { t0: number; t1: number }): HTMLElement {
    const W = 420;
    const H = 150;
    const PAD = 34;
    const box = el("div", { class: "chart" });
    box.appendChild(el("h3", {}, title));
    const svg = svgEl("svg", { viewBox: `0 0 ${W} ${H}`, width: String(W), height: String(H) });
    const xs = linearScale([zoom.t0, zoom.t1], [PAD, W - 6]);
    const ys = linearScale(valueExtent(lines), [H - 18, 8]);
    svg.appendChild(svgEl("line", { x1: String(PAD), y1: String(H - 18), x2: String(W - 6), y2: String(H - 18), stroke: "#999" }));
    svg.appendChild(svgEl("line", { x1: String(PAD), y1: "8", x2: String(PAD), y2: String(H - 18), stroke: "#999" }));
    const [lo, hi] = ys.domain;
    for (const v of [lo, (lo + hi) / 2, hi]) {
      svg.appendChild(Object.assign(svgEl("text", {
        x: "2", y: String(ys.apply(v) + 3), "font-size": "8", fill: "#555",
      }), { textContent: v.toPrecision(3) }));
    }
    for (const line of lines) {
      let d = "";
      let penDown = false;
      for (const p of line.points) {
        if (p.v === null) {
          penDown = false;
          continue;
        }
        d += `${penDown ? "L" : "M"}${xs.apply(p.t).toFixed(1)},${ys.apply(p.v).toFixed(1)} `;
        penDown = true;
      }
      if (!d) continue;
      const path = svgEl("path", {
        d, fill: "none", stroke: line.color,
        "stroke-width": line.emphasized ? "2" : "1", opacity: line.emphasized ? "1" : "0.75",
      });
      path.addEventListener("pointermove", (ev) => {
        const rect = (svg as unknown as SVGGraphicsElement).getBoundingClientRect();
        const t = xs.invert(((ev as PointerEvent).clientX - rect.left) * (W / rect.width));
        const hit = hoverValue(line, t);
        if (hit) this.showTooltip(ev as PointerEvent, `${line.id}\nt = ${hit.t}\nvalue = ${hit.v}`);
      });
      path.addEventListener("pointerleave", () => this.hideTooltip());
      svg.appendChild(path);
    }
    if (cursor >= zoom.t0 && cursor <= zoom.t1) {
      svg.appendChild(svgEl("line", {
        x1: String(xs.apply(cursor)), y1: "8", x2: String(xs.apply(cursor)), y2: String(H - 18),
        stroke: "#333", "stroke-dasharray": "4 3",
      }));
    }
    box.appendChild(svg as unknown as Node);
    return box;
  }

  // -- controls ---------------------------------------------------------

  buildDom(): void {
    const root = document.getElementById("app")!;
    root.textContent = "";
    root.appendChild(el("h1", {}, `${this.meta.model} — dynamic influence network (${this.meta.din})`));

    const main = el("div", { class: "columns" });
    root.appendChild(main);

    const left = el("div", { class: "panel network-panel" });
    const right = el("div", { class: "panel data-panel" });
    main.appendChild(left);
    main.appendChild(right);

    this.netSvg = svgEl("svg", { viewBox: `0 0 ${NET_W} ${NET_H}`, class: "network" });
    left.appendChild(this.netSvg as unknown as Node);

    left.appendChild(this.timelineControls());
    left.appendChild(this.thresholdControls());
    left.appendChild(this.annotationControls());
    this.statusLine = el("p", { class: "status" });
    left.appendChild(this.statusLine);

    this.chartsBox = el("div", { class: "charts" });
    right.appendChild(this.chartsBox);
    right.appendChild(this.zoomControls());

    this.tooltip = el("div", { class: "tooltip" }) as HTMLDivElement;
    document.body.appendChild(this.tooltip);

    this.renderCharts();
    this.syncControls();
  }

  timelineControls(): HTMLElement {
    const box = el("div", { class: "controls" });
    this.timeline = el("input", {
      type: "range", min: "0", max: String(this.windowCount - 1), step: "0.01", value: "0",
    }) as HTMLInputElement;
    this.timeline.addEventListener("input", () => {
      this.setView(pause(seek(this.view, Number(this.timeline.value), this.windowCount)));
    });
    const playBtn = el("button", {}, "play");
    playBtn.addEventListener("click", () => {
      this.setView(this.view.playback.playing ? pause(this.view) : play(this.view));
      playBtn.textContent = this.view.playback.playing ? "pause" : "play";
    });
    const speed = el("select", {});
    for (const s of ["0.25", "0.5", "1", "2", "4"]) speed.appendChild(el("option", { value: s }, `${s}x`));
    (speed as HTMLSelectElement).value = "1";
    speed.addEventListener("change", () =>
      this.setView(setSpeed(this.view, Number((speed as HTMLSelectElement).value))),
    );
    const interp = el("label", {}, " interpolate ");
    const interpBox = el("input", { type: "checkbox", checked: "checked" });
    interpBox.addEventListener("change", () => this.setView(toggleInterpolation(this.view)));
    interp.prepend(interpBox);
    box.append(playBtn, this.timeline, speed, interp);
    return box;
  }

  thresholdControls(): HTMLElement {
    const box = el("div", { class: "controls" });
    const clusterIn = el("input", { type: "number", step: "0.01", min: "0", value: String(this.view.clusterThreshold) });
    clusterIn.addEventListener("change", () =>
      this.setView(setThresholds(this.view, { cluster: Number((clusterIn as HTMLInputElement).value) }), { clusters: true }),
    );
    const visIn = el("input", { type: "number", step: "0.01", min: "0", value: "0" });
    visIn.addEventListener("change", () =>
      this.setView(setThresholds(this.view, { visibility: Number((visIn as HTMLInputElement).value) })),
    );
    const mode = el("select", {});
    for (const m of ["step", "window:2", "window:5", "window:10", "global"]) {
      mode.appendChild(el("option", { value: m }, m));
    }
    mode.addEventListener("change", () => {
      const v = (mode as HTMLSelectElement).value;
      const parsed = v === "step" || v === "global" ? v : { window: Number(v.split(":")[1]) };
      this.setView(setClusterMode(this.view, parsed), { clusters: true });
    });
    const cb = el("label", {}, " colorblind-safe ");
    const cbBox = el("input", { type: "checkbox" });
    cbBox.addEventListener("change", () =>
      this.setView({ ...this.view, colorblindSafe: (cbBox as HTMLInputElement).checked }),
    );
    cb.prepend(cbBox);
    const curves = el("label", {}, " curved edges ");
    const curvesBox = el("input", { type: "checkbox", checked: "checked" });
    curvesBox.addEventListener("change", () =>
      this.setView({ ...this.view, curvedEdges: (curvesBox as HTMLInputElement).checked }),
    );
    curves.prepend(curvesBox);
    const labels = el("select", {});
    for (const m of ["none", "selected", "all"]) labels.appendChild(el("option", { value: m }, `labels: ${m}`));
    (labels as HTMLSelectElement).value = "selected";
    labels.addEventListener("change", () =>
      this.setView({ ...this.view, labelMode: (labels as HTMLSelectElement).value as ViewState["labelMode"] }),
    );
    box.append(el("span", {}, "cluster ≥"), clusterIn, mode, el("span", {}, "visibility ≥"), visIn, cb, curves, labels);
    return box;
  }

  annotationControls(): HTMLElement {
    const box = el("div", { class: "controls" });
    const color = el("input", { type: "color", value: "#3cab44" });
    const label = el("input", { type: "text", placeholder: "label" });
    const markBtn = el("button", {}, "mark selection");
    markBtn.addEventListener("click", () => {
      const rules = this.multiSelect.size
        ? [...this.multiSelect]
        : this.view.selected !== null
          ? [this.view.selected]
          : [];
      if (!rules.length) return;
      const text = (label as HTMLInputElement).value || undefined;
      this.setView(markRules(this.view, rules, (color as HTMLInputElement).value, text));
    });
    const paintBtn = el("button", {}, "paint cluster");
    paintBtn.addEventListener("click", () => {
      const rules = [...this.multiSelect];
      if (!rules.length) return;
      const cid = nextPaintedCluster(this.view);
      const text = (label as HTMLInputElement).value || undefined;
      this.setView(markRules(this.view, rules, (color as HTMLInputElement).value, text, cid));
    });
    const exportBtn = el("button", {}, "export annotations");
    exportBtn.addEventListener("click", () => {
      const blob = new Blob(
        [JSON.stringify(exportAnnotations(this.view, this.meta.model), null, 2)],
        { type: "application/json" },
      );
      const a = el("a", { href: URL.createObjectURL(blob), download: `${this.meta.model}.annotations.json` });
      a.click();
      URL.revokeObjectURL(a.href);
    });
    const importIn = el("input", { type: "file", accept: ".json", style: "display:none" });
    const importBtn = el("button", {}, "import annotations");
    importBtn.addEventListener("click", () => importIn.click());
    importIn.addEventListener("change", async () => {
      const file = (importIn as HTMLInputElement).files?.[0];
      if (!file) return;
      const parsed = JSON.parse(await file.text()) as AnnotationFile;
      const known = new Set(this.meta.rules.map((r) => r.id));
      const { view, skipped } = importAnnotations(this.view, parsed, known);
      this.setView(view, { clusters: true });
      this.statusLine.textContent = skipped.length
        ? `import: skipped unknown rule ids ${skipped.join(", ")}`
        : "import: ok";
    });
    box.append(color, label, markBtn, paintBtn, exportBtn, importBtn, importIn);
    return box;
  }

  zoomControls(): HTMLElement {
    const box = el("div", { class: "controls" });
    const lo = el("input", { type: "range", min: "0", max: String(this.meta.t_end), step: "0.1", value: "0" });
    const hi = el("input", { type: "range", min: "0", max: String(this.meta.t_end), step: "0.1", value: String(this.meta.t_end) });
    const update = () => {
      this.setView(setZoom(this.view, {
        t0: Number((lo as HTMLInputElement).value),
        t1: Number((hi as HTMLInputElement).value),
      }));
      this.renderCharts();
    };
    lo.addEventListener("input", update);
    hi.addEventListener("input", update);
    box.append(el("span", {}, "zoom"), lo, hi);
    return box;
  }

  syncControls(): void {
    if (this.timeline) this.timeline.value = String(this.view.windowIndex);
    if (this.statusLine) {
      const k = Math.floor(this.view.windowIndex);
      const w = this.windows[k];
      if (w) {
        this.statusLine.textContent =
          `window ${k} [${w.t_start}, ${w.t_end}]${w.partial ? " (partial)" : ""}` +
          ` | pinned ${this.view.pinned.size} | marked ${this.view.marks.size}`;
      }
    }
  }
}

new Explorer().start().catch((err) => {
  document.getElementById("app")!.textContent = `failed to load: ${err}`;
});
