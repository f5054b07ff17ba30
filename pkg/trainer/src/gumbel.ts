/**
 * Straight-through Gumbel-Softmax sampling.
 *
 * The relaxed sample is v = softmax((logits + g) / tau) with g i.i.d.
 * Gumbel(0, 1); normalizing logits to log class probabilities first would
 * only shift every entry by a constant, which the softmax cancels. The
 * straight-through estimator discretizes v with argmax in the forward pass
 * and routes the gradient through the relaxed v unchanged.
 */

import * as tf from "@tensorflow/tfjs";

export interface GumbelSample {
  relaxed: tf.Tensor2D;
  hard: tf.Tensor2D;
  straightThrough: tf.Tensor2D;
  hardIndices: tf.Tensor1D;
}

export function gumbelSoftmaxSample(
  logits: tf.Tensor2D,
  tau: number,
  noise: tf.Tensor2D
): GumbelSample {
  if (!(tau > 0)) {
    throw new Error(`temperature must be positive, got ${tau}`);
  }
  const relaxed = tf.softmax(tf.add(logits, noise).div(tf.scalar(tau))) as tf.Tensor2D;
  const hardIndices = tf.argMax(relaxed, 1) as tf.Tensor1D;
  const vocab = logits.shape[1];
  const hard = tf.oneHot(hardIndices, vocab).toFloat() as tf.Tensor2D;
  const straightThrough = straightThroughOp(relaxed) as tf.Tensor2D;
  return { relaxed, hard, straightThrough, hardIndices };
}

/** Forward: one-hot argmax of the input. Backward: identity. */
const straightThroughOp = tf.customGrad((relaxed, save) => {
  const r = relaxed as tf.Tensor2D;
  (save as tf.GradSaveFunc)([]);
  const value = tf.oneHot(tf.argMax(r, 1), r.shape[1]).toFloat();
  return {
    value,
    gradFunc: (dy: tf.Tensor, _saved: tf.Tensor[]) => dy,
  };
});
