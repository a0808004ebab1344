/** Small force-directed layout: link springs scaled by |influence|,
 * pairwise repulsion, gentle centering. Pinned nodes are immovable anchors.
 * Node count is the rule count (tens, not thousands), so the O(n^2)
 * repulsion pass is fine.
 */

export interface BodyInput {
  id: number;
  radius: number;
  pinned: { x: number; y: number } | null;
}

export interface SpringInput {
  src: number;
  dst: number;
  /** Attraction strength, already nonnegative (use |influence|). */
  strength: number;
}

export interface Body {
  id: number;
  x: number;
  y: number;
  vx: number;
  vy: number;
  radius: number;
  pinned: boolean;
}

const REPULSION = 2400;
const SPRING = 0.06;
const SPRING_LENGTH = 70;
const CENTERING = 0.012;
const DAMPING = 0.82;
const MAX_SPEED = 60;

export class ForceLayout {
  bodies = new Map<number, Body>();
  springs: SpringInput[] = [];
  width: number;
  height: number;

  constructor(width: number, height: number) {
    this.width = width;
    this.height = height;
  }

  /** Sync to a new scene, keeping previous positions for temporal coherence. */
  update(inputs: BodyInput[], springs: SpringInput[]): void {
    const seen = new Set<number>();
    inputs.forEach((input, i) => {
      seen.add(input.id);
      let body = this.bodies.get(input.id);
      if (!body) {
        // deterministic first placement: a circle in input order
        const angle = (2 * Math.PI * i) / Math.max(inputs.length, 1);
        body = {
          id: input.id,
          x: this.width / 2 + 0.3 * this.width * Math.cos(angle),
          y: this.height / 2 + 0.3 * this.height * Math.sin(angle),
          vx: 0,
          vy: 0,
          radius: input.radius,
          pinned: false,
        };
        this.bodies.set(input.id, body);
      }
      body.radius = input.radius;
      body.pinned = input.pinned !== null;
      if (input.pinned) {
        body.x = input.pinned.x;
        body.y = input.pinned.y;
        body.vx = 0;
        body.vy = 0;
      }
    });
    for (const id of [...this.bodies.keys()]) {
      if (!seen.has(id)) this.bodies.delete(id);
    }
    this.springs = springs.filter((s) => this.bodies.has(s.src) && this.bodies.has(s.dst));
  }

  step(): void {
    const bodies = [...this.bodies.values()];
    const n = bodies.length;
    for (let i = 0; i < n; i++) {
      const a = bodies[i]!;
      if (a.pinned) continue;
      let fx = (this.width / 2 - a.x) * CENTERING;
      let fy = (this.height / 2 - a.y) * CENTERING;
      for (let j = 0; j < n; j++) {
        if (i === j) continue;
        const b = bodies[j]!;
        const dx = a.x - b.x;
        const dy = a.y - b.y;
        const d2 = dx * dx + dy * dy + 1;
        const f = REPULSION / d2;
        const d = Math.sqrt(d2);
        fx += (dx / d) * f;
        fy += (dy / d) * f;
      }
      a.vx = (a.vx + fx) * DAMPING;
      a.vy = (a.vy + fy) * DAMPING;
    }
    for (const s of this.springs) {
      const a = this.bodies.get(s.src)!;
      const b = this.bodies.get(s.dst)!;
      const dx = b.x - a.x;
      const dy = b.y - a.y;
      const d = Math.sqrt(dx * dx + dy * dy) || 1;
      const f = SPRING * s.strength * (d - SPRING_LENGTH);
      const fx = (dx / d) * f;
      const fy = (dy / d) * f;
      if (!a.pinned) {
        a.vx += fx;
        a.vy += fy;
      }
      if (!b.pinned) {
        b.vx -= fx;
        b.vy -= fy;
      }
    }
    for (const body of this.bodies.values()) {
      if (body.pinned) continue;
      const speed = Math.sqrt(body.vx * body.vx + body.vy * body.vy);
      if (speed > MAX_SPEED) {
        body.vx *= MAX_SPEED / speed;
        body.vy *= MAX_SPEED / speed;
      }
      body.x += body.vx;
      body.y += body.vy;
      const m = body.radius + 2;
      body.x = Math.min(Math.max(body.x, m), this.width - m);
      body.y = Math.min(Math.max(body.y, m), this.height - m);
    }
  }

  position(id: number): { x: number; y: number } | null {
    const b = this.bodies.get(id);
    return b ? { x: b.x, y: b.y } : null;
  }
}
