/**
 * Seeded PRNG so every run is reproducible end to end: weight init, batch
 * shuffling, and Gumbel noise all draw from forks of one root stream.
 */

export class Rng {
  private state: number;

  constructor(readonly seed: number) {
    this.state = seed >>> 0;
    // Avoid the all-zeros fixed point and decorrelate tiny seeds.
    this.state = mix(this.state ^ 0x9e3779b9);
  }

  /** Uniform float in [0, 1) (mulberry32). */
  next(): number {
    this.state = (this.state + 0x6d2b79f5) | 0;
    let t = this.state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  }

  int(n: number): number {
    return Math.floor(this.next() * n);
  }

  uniform(lo: number, hi: number): number {
    return lo + (hi - lo) * this.next();
  }

  /** Standard Gumbel(0, 1) draw; the argument of both logs is kept positive. */
  gumbel(): number {
    const u = Math.max(this.next(), 1e-12);
    return -Math.log(-Math.log(u));
  }

  gumbelArray(size: number): Float32Array {
    const out = new Float32Array(size);
    for (let i = 0; i < size; i++) out[i] = this.gumbel();
    return out;
  }

  /** Glorot-uniform init for a [fanIn, fanOut] matrix. */
  glorot(fanIn: number, fanOut: number): Float32Array {
    const limit = Math.sqrt(6 / (fanIn + fanOut));
    const out = new Float32Array(fanIn * fanOut);
    for (let i = 0; i < out.length; i++) out[i] = this.uniform(-limit, limit);
    return out;
  }

  shuffle<T>(items: T[]): T[] {
    for (let i = items.length - 1; i > 0; i--) {
      const j = this.int(i + 1);
      [items[i], items[j]] = [items[j], items[i]];
    }
    return items;
  }

  /** Independent derived stream; same (seed, label) always forks the same stream. */
  fork(label: number): Rng {
    return new Rng(mix(this.seed ^ mix(label)));
  }
}

function mix(x: number): number {
  x = Math.imul(x ^ (x >>> 16), 0x45d9f3b);
  x = Math.imul(x ^ (x >>> 16), 0x45d9f3b);
  return (x ^ (x >>> 16)) >>> 0;
}
