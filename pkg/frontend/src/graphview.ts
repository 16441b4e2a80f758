// Canvas node-link view of the query neighborhood. A small hand-rolled
// force layout: spring edges, pairwise repulsion, centering pull. The
// query center and result items are highlighted; everything else fades
// into context.

import type { Neighborhood } from "./types.js";

interface Body {
  id: number;
  title: string;
  hops: number;
  x: number;
  y: number;
  vx: number;
  vy: number;
}

const ITERATIONS = 180;
const REPULSION = 1800;
const SPRING = 0.02;
const SPRING_LEN = 70;
const CENTER_PULL = 0.012;
const DAMPING = 0.85;

export class GraphView {
  private bodies: Body[] = [];
  private edges: [number, number][] = [];
  private center = -1;
  private highlighted = new Set<number>();
  private onPick: ((id: number) => void) | null = null;

  constructor(private canvas: HTMLCanvasElement) {
    canvas.addEventListener("click", (ev) => {
      if (!this.onPick) return;
      const rect = canvas.getBoundingClientRect();
      const x = ev.clientX - rect.left;
      const y = ev.clientY - rect.top;
      const hit = this.bodies.find((b) => (b.x - x) ** 2 + (b.y - y) ** 2 < 144);
      if (hit) this.onPick(hit.id);
    });
  }

  pickHandler(fn: (id: number) => void): void {
    this.onPick = fn;
  }

  show(data: Neighborhood, center: number, highlighted: number[]): void {
    const w = this.canvas.width;
    const h = this.canvas.height;
    this.center = center;
    this.highlighted = new Set(highlighted);
    const index = new Map<number, number>();
    this.bodies = data.nodes.map((n, i) => {
      index.set(n.id, i);
      const angle = (2 * Math.PI * i) / Math.max(data.nodes.length, 1);
      const r = 40 + 50 * n.hops;
      return {
        id: n.id,
        title: n.title,
        hops: n.hops,
        x: w / 2 + r * Math.cos(angle),
        y: h / 2 + r * Math.sin(angle),
        vx: 0,
        vy: 0,
      };
    });
    this.edges = data.edges
      .filter((e) => index.has(e.source) && index.has(e.target))
      .map((e) => [index.get(e.source)!, index.get(e.target)!]);
    this.layout(w, h);
    this.draw();
  }

  clear(): void {
    this.bodies = [];
    this.edges = [];
    this.draw();
  }

  private layout(w: number, h: number): void {
    const bodies = this.bodies;
    for (let step = 0; step < ITERATIONS; step++) {
      for (let i = 0; i < bodies.length; i++) {
        const a = bodies[i];
        for (let j = i + 1; j < bodies.length; j++) {
          const b = bodies[j];
          let dx = a.x - b.x;
          let dy = a.y - b.y;
          const d2 = dx * dx + dy * dy + 1;
          const f = REPULSION / d2;
          const d = Math.sqrt(d2);
          dx /= d;
          dy /= d;
          a.vx += f * dx;
          a.vy += f * dy;
          b.vx -= f * dx;
          b.vy -= f * dy;
        }
      }
      for (const [i, j] of this.edges) {
        const a = bodies[i];
        const b = bodies[j];
        const dx = b.x - a.x;
        const dy = b.y - a.y;
        const d = Math.sqrt(dx * dx + dy * dy) + 1e-6;
        const f = SPRING * (d - SPRING_LEN);
        a.vx += (f * dx) / d;
        a.vy += (f * dy) / d;
        b.vx -= (f * dx) / d;
        b.vy -= (f * dy) / d;
      }
      for (const b of bodies) {
        b.vx += (w / 2 - b.x) * CENTER_PULL;
        b.vy += (h / 2 - b.y) * CENTER_PULL;
        b.vx *= DAMPING;
        b.vy *= DAMPING;
        b.x = Math.min(w - 12, Math.max(12, b.x + b.vx));
        b.y = Math.min(h - 12, Math.max(12, b.y + b.vy));
      }
    }
  }

  private draw(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    ctx.strokeStyle = "#d8dee4";
    ctx.lineWidth = 1;
    for (const [i, j] of this.edges) {
      ctx.beginPath();
      ctx.moveTo(this.bodies[i].x, this.bodies[i].y);
      ctx.lineTo(this.bodies[j].x, this.bodies[j].y);
      ctx.stroke();
    }
    for (const b of this.bodies) {
      const isCenter = b.id === this.center;
      const isResult = this.highlighted.has(b.id);
      ctx.beginPath();
      ctx.arc(b.x, b.y, isCenter ? 9 : isResult ? 7 : 4, 0, 2 * Math.PI);
      ctx.fillStyle = isCenter ? "#d62728" : isResult ? "#1f77b4" : "#b7c2cc";
      ctx.fill();
      if (isCenter || isResult) {
        ctx.fillStyle = "#30363d";
        ctx.font = "11px sans-serif";
        ctx.fillText(b.title.slice(0, 22), b.x + 10, b.y + 4);
      }
    }
  }
}
