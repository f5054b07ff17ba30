/**
 * Recurrent sender/receiver agents and their optimizer.
 *
 * Sender: encodes the target's attribute-value codes into the initial GRU
 * state, then autoregressively emits symbols; each emitted symbol's
 * straight-through vector is embedded and fed back as the next input.
 * Receiver: embeds the message symbols, runs its own GRU, and scores every
 * candidate by inner product between the final state and a linear embedding
 * of the candidate. Training minimizes cross-entropy on the target index.
 */

import * as tf from "@tensorflow/tfjs";

import { gumbelSoftmaxSample } from "./gumbel";
import { Rng } from "./rng";

export interface AgentDims {
  vocab: number;
  attributes: number;
  candidates: number;
  hidden: number;
  embedding: number;
}

export interface Batch {
  /** (batch, vocab) concatenated one-hot blocks of the target, one 1 per attribute. */
  targetOneHot: tf.Tensor2D;
  /** (batch * candidates, vocab) one-hot rows of every candidate, instance-major. */
  candidateOneHot: tf.Tensor2D;
  /** (batch,) target indices. */
  targetIndex: tf.Tensor1D;
  size: number;
}

export class GruCell {
  readonly wx: tf.Variable;
  readonly whGates: tf.Variable;
  readonly whState: tf.Variable;
  readonly bias: tf.Variable;

  constructor(inputSize: number, readonly hidden: number, rng: Rng) {
    this.wx = tf.variable(tf.tensor2d(rng.glorot(inputSize, 3 * hidden), [inputSize, 3 * hidden]));
    this.whGates = tf.variable(tf.tensor2d(rng.glorot(hidden, 2 * hidden), [hidden, 2 * hidden]));
    this.whState = tf.variable(tf.tensor2d(rng.glorot(hidden, hidden), [hidden, hidden]));
    this.bias = tf.variable(tf.zeros([3 * hidden]));
  }

  step(x: tf.Tensor2D, h: tf.Tensor2D): tf.Tensor2D {
    const hidden = this.hidden;
    const fromX = tf.add(tf.matMul(x, this.wx), this.bias);
    const [xz, xr, xc] = tf.split(fromX, 3, 1);
    const gates = tf.matMul(h, this.whGates);
    const [hz, hr] = tf.split(gates, 2, 1);
    const z = tf.sigmoid(tf.add(xz, hz));
    const r = tf.sigmoid(tf.add(xr, hr));
    const candidate = tf.tanh(tf.add(xc, tf.matMul(tf.mul(r, h), this.whState)));
    return tf.add(tf.mul(tf.sub(tf.scalar(1), z), h), tf.mul(z, candidate)) as tf.Tensor2D;
  }

  variables(): tf.Variable[] {
    return [this.wx, this.whGates, this.whState, this.bias];
  }
}

export class Agents {
  readonly targetEmbed: tf.Variable; // vocab x hidden, summed over the target's codes
  readonly senderEmbed: tf.Variable; // vocab x embedding
  readonly senderStart: tf.Variable; // embedding
  readonly senderGru: GruCell;
  readonly senderOut: tf.Variable; // hidden x vocab
  readonly senderOutBias: tf.Variable;
  readonly receiverEmbed: tf.Variable; // vocab x embedding
  readonly receiverGru: GruCell;
  readonly candidateEmbed: tf.Variable; // vocab x hidden, summed over each candidate's codes

  constructor(readonly dims: AgentDims, rng: Rng) {
    const { vocab, hidden, embedding } = dims;
    this.targetEmbed = tf.variable(tf.tensor2d(rng.glorot(vocab, hidden), [vocab, hidden]));
    this.senderEmbed = tf.variable(tf.tensor2d(rng.glorot(vocab, embedding), [vocab, embedding]));
    this.senderStart = tf.variable(tf.tensor1d(rng.glorot(1, embedding)));
    this.senderGru = new GruCell(embedding, hidden, rng.fork(1));
    this.senderOut = tf.variable(tf.tensor2d(rng.glorot(hidden, vocab), [hidden, vocab]));
    this.senderOutBias = tf.variable(tf.zeros([vocab]));
    this.receiverEmbed = tf.variable(tf.tensor2d(rng.glorot(vocab, embedding), [vocab, embedding]));
    this.receiverGru = new GruCell(embedding, hidden, rng.fork(2));
    this.candidateEmbed = tf.variable(tf.tensor2d(rng.glorot(vocab, hidden), [vocab, hidden]));
  }

  variables(): tf.Variable[] {
    return [
      this.targetEmbed,
      this.senderEmbed,
      this.senderStart,
      ...this.senderGru.variables(),
      this.senderOut,
      this.senderOutBias,
      this.receiverEmbed,
      ...this.receiverGru.variables(),
      this.candidateEmbed,
    ];
  }

  /**
   * One full game on a batch. In training mode symbols are straight-through
   * Gumbel-Softmax samples with the provided noise; in eval mode decoding is
   * greedy argmax with no noise. Returns per-candidate scores and the hard
   * symbol indices (batch, maxLength).
   */
  play(
    batch: Batch,
    maxLength: number,
    tau: number,
    noise: tf.Tensor3D | null
  ): { scores: tf.Tensor2D; symbols: tf.Tensor2D } {
    const { hidden, vocab, candidates } = this.dims;
    let h = tf.tanh(tf.matMul(batch.targetOneHot, this.targetEmbed)) as tf.Tensor2D;
    let x = tf.tile(tf.expandDims(this.senderStart, 0), [batch.size, 1]) as tf.Tensor2D;

    let hr = tf.zeros([batch.size, hidden]) as tf.Tensor2D;
    const symbolSteps: tf.Tensor1D[] = [];
    for (let t = 0; t < maxLength; t++) {
      h = this.senderGru.step(x, h);
      const logits = tf.add(tf.matMul(h, this.senderOut), this.senderOutBias) as tf.Tensor2D;
      let symbolVector: tf.Tensor2D;
      let hardIndices: tf.Tensor1D;
      if (noise !== null) {
        const stepNoise = tf.squeeze(
          tf.slice(noise, [0, t, 0], [batch.size, 1, vocab]),
          [1]
        ) as tf.Tensor2D;
        const sample = gumbelSoftmaxSample(logits, tau, stepNoise);
        symbolVector = sample.straightThrough;
        hardIndices = sample.hardIndices;
      } else {
        hardIndices = tf.argMax(logits, 1) as tf.Tensor1D;
        symbolVector = tf.oneHot(hardIndices, vocab).toFloat() as tf.Tensor2D;
      }
      symbolSteps.push(hardIndices);
      if (t < maxLength - 1) {
        x = tf.matMul(symbolVector, this.senderEmbed) as tf.Tensor2D;
      }
      hr = this.receiverGru.step(tf.matMul(symbolVector, this.receiverEmbed) as tf.Tensor2D, hr);
    }

    // (batch, candidates, hidden) x (batch, hidden, 1) -> (batch, candidates)
    const candEmb = tf
      .matMul(batch.candidateOneHot, this.candidateEmbed)
      .reshape([batch.size, candidates, hidden]);
    const scores = tf.squeeze(tf.matMul(candEmb, tf.expandDims(hr, 2)), [2]) as tf.Tensor2D;
    const symbols = tf.stack(symbolSteps, 1) as tf.Tensor2D;
    return { scores, symbols };
  }
}

export function crossEntropyLoss(scores: tf.Tensor2D, targetIndex: tf.Tensor1D, candidates: number): tf.Scalar {
  const labels = tf.oneHot(targetIndex, candidates).toFloat();
  return tf.losses.softmaxCrossEntropy(labels, scores) as tf.Scalar;
}

export interface OptimizerLike {
  /** Apply one update given gradients aligned with `variables`. */
  step(gradients: tf.Tensor[]): void;
  /** Swap evaluation weights in (averaged iterate) / out. */
  beginEval(): void;
  endEval(): void;
  dispose(): void;
}

/**
 * Schedule-free weight-decoupled adaptive optimizer. Keeps a fast iterate z
 * and a running average x; gradients are evaluated at the interpolation
 * y = (1 - beta1) z + beta1 x, which is what the model variables hold during
 * training. Evaluation uses x.
 */
export class ScheduleFreeAdamW implements OptimizerLike {
  private z: tf.Tensor[];
  private x: tf.Tensor[];
  private v: tf.Tensor[];
  private t = 0;

  constructor(
    private readonly variables: tf.Variable[],
    private readonly lr: number,
    private readonly beta1 = 0.9,
    private readonly beta2 = 0.999,
    private readonly eps = 1e-8,
    private readonly weightDecay = 0.0
  ) {
    this.z = variables.map((p) => p.clone());
    this.x = variables.map((p) => p.clone());
    this.v = variables.map((p) => tf.zeros(p.shape));
  }

  step(gradients: tf.Tensor[]): void {
    this.t += 1;
    const correction = 1 - Math.pow(this.beta2, this.t);
    const averageWeight = 1 / this.t; // constant lr: c_t = lr^2 / (t * lr^2)
    for (let i = 0; i < this.variables.length; i++) {
      const [zNew, xNew, vNew, yNew] = tf.tidy(() => {
        const y = this.variables[i];
        const g = gradients[i];
        const v = tf.add(tf.mul(this.v[i], this.beta2), tf.mul(tf.square(g), 1 - this.beta2));
        const denom = tf.add(tf.sqrt(tf.div(v, correction)), this.eps);
        let update = tf.div(g, denom);
        if (this.weightDecay > 0) {
          update = tf.add(update, tf.mul(y, this.weightDecay));
        }
        const z = tf.sub(this.z[i], tf.mul(update, this.lr));
        const x = tf.add(tf.mul(this.x[i], 1 - averageWeight), tf.mul(z, averageWeight));
        const yNext = tf.add(tf.mul(z, 1 - this.beta1), tf.mul(x, this.beta1));
        return [z, x, v, yNext];
      });
      this.z[i].dispose();
      this.x[i].dispose();
      this.v[i].dispose();
      this.z[i] = zNew;
      this.x[i] = xNew;
      this.v[i] = vNew;
      this.variables[i].assign(yNew);
      yNew.dispose();
    }
  }

  beginEval(): void {
    for (let i = 0; i < this.variables.length; i++) {
      this.variables[i].assign(this.x[i]);
    }
  }

  endEval(): void {
    for (let i = 0; i < this.variables.length; i++) {
      const y = tf.tidy(() =>
        tf.add(tf.mul(this.z[i], 1 - this.beta1), tf.mul(this.x[i], this.beta1))
      );
      this.variables[i].assign(y);
      y.dispose();
    }
  }

  dispose(): void {
    for (const group of [this.z, this.x, this.v]) {
      for (const tensor of group) tensor.dispose();
    }
  }
}

/** Plain adaptive fallback behind the --optimizer flag; eval swaps are no-ops. */
export class AdamFallback implements OptimizerLike {
  private readonly inner: tf.Optimizer;

  constructor(private readonly variables: tf.Variable[], lr: number) {
    this.inner = tf.train.adam(lr);
  }

  step(gradients: tf.Tensor[]): void {
    const named: tf.NamedTensorMap = {};
    this.variables.forEach((variable, i) => {
      named[variable.name] = gradients[i];
    });
    this.inner.applyGradients(named);
  }

  beginEval(): void {}

  endEval(): void {}

  dispose(): void {
    this.inner.dispose();
  }
}
