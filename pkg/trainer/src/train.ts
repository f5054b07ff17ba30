/**
 * Training loop: play batches with straight-through Gumbel-Softmax messages,
 * minimize cross-entropy on the target index, track validation accuracy per
 * epoch, and emit curve/log files in the primary package's formats.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import * as tf from "@tensorflow/tfjs";

import { BucketData, Instance, readBucket, splitTrainEval, toSymbolCodes } from "./dataset";
import { AdamFallback, Agents, Batch, OptimizerLike, ScheduleFreeAdamW, crossEntropyLoss } from "./model";
import { Rng } from "./rng";

export interface TrainConfig {
  datasetDir: string;
  bucket: number;
  maxLength: number;
  epochs: number;
  hidden: number;
  embedding: number;
  tau: number;
  /** Multiplicative per-epoch temperature decay; 1.0 keeps tau fixed. */
  tauDecay: number;
  batchSize: number;
  learningRate: number;
  weightDecay: number;
  seed: number;
  optimizer: "schedule-free-adamw" | "adam";
  /** If set, must match the dataset manifest's attribute x value count. */
  vocab?: number;
  curveOut?: string;
  logOut?: string;
  quiet?: boolean;
}

export const DEFAULTS = {
  epochs: 30,
  hidden: 512,
  embedding: 32,
  tau: 1.0,
  tauDecay: 1.0,
  batchSize: 64,
  learningRate: 1e-3,
  weightDecay: 0.0,
  optimizer: "schedule-free-adamw" as const,
};

export interface EpochPoint {
  epoch: number;
  accuracy: number;
  meanLoss: number;
}

export interface TrainResult {
  config: TrainConfig;
  points: EpochPoint[];
  finalAccuracy: number;
  untrainedAccuracy: number;
  logRecords: LogRecord[];
}

export interface LogRecord {
  id: number;
  max_length: number;
  symbols: number[];
  chosen: number;
  success: boolean;
}

export async function trainRun(config: TrainConfig): Promise<TrainResult> {
  const data = readBucket(config.datasetDir, config.bucket);
  if (config.vocab !== undefined && config.vocab !== data.vocab) {
    throw new Error(
      `dimension mismatch: configured vocabulary ${config.vocab}, manifest has ${data.vocab}`
    );
  }
  if (config.maxLength < 1) {
    throw new Error(`maxLength must be >= 1, got ${config.maxLength}`);
  }
  const { train, evalSet } = splitTrainEval(data, config.seed);
  if (train.length === 0 || evalSet.length === 0) {
    throw new Error(`bucket ${config.bucket} split has an empty side`);
  }

  const rootRng = new Rng(config.seed);
  const agents = new Agents(
    {
      vocab: data.vocab,
      attributes: data.attributes,
      candidates: data.candidates,
      hidden: config.hidden,
      embedding: config.embedding,
    },
    rootRng.fork(101)
  );
  const variables = agents.variables();
  const optimizer: OptimizerLike =
    config.optimizer === "adam"
      ? new AdamFallback(variables, config.learningRate)
      : new ScheduleFreeAdamW(
          variables,
          config.learningRate,
          0.9,
          0.999,
          1e-8,
          config.weightDecay
        );

  const untrainedAccuracy = evaluateAccuracy(agents, optimizer, evalSet, data, config).accuracy;

  const noiseRng = rootRng.fork(202);
  const shuffleRng = rootRng.fork(303);
  const points: EpochPoint[] = [];
  let tau = config.tau;
  for (let epoch = 1; epoch <= config.epochs; epoch++) {
    const order = shuffleRng.shuffle([...train]);
    let lossSum = 0;
    let steps = 0;
    for (let start = 0; start < order.length; start += config.batchSize) {
      const slice = order.slice(start, start + config.batchSize);
      const batch = makeBatch(slice, data);
      const noise = tf.tensor3d(
        noiseRng.gumbelArray(slice.length * config.maxLength * data.vocab),
        [slice.length, config.maxLength, data.vocab]
      );
      const { value, grads } = tf.variableGrads(
        () =>
          crossEntropyLoss(
            agents.play(batch, config.maxLength, tau, noise).scores,
            batch.targetIndex,
            data.candidates
          ),
        variables
      );
      const loss = value.dataSync()[0];
      if (!Number.isFinite(loss)) {
        throw new Error(
          `non-finite loss (${loss}) at epoch ${epoch}, step ${steps}; ` +
            `lr=${config.learningRate}, tau=${tau}`
        );
      }
      // A variable can sit off the loss path (the sender's feedback embedding
      // when maxLength is 1); its gradient is zero, not absent.
      for (const variable of variables) {
        if (!(variable.name in grads)) grads[variable.name] = tf.zeros(variable.shape);
      }
      optimizer.step(variables.map((v) => grads[v.name]));
      for (const name of Object.keys(grads)) grads[name].dispose();
      value.dispose();
      noise.dispose();
      disposeBatch(batch);
      lossSum += loss;
      steps += 1;
    }
    const { accuracy } = evaluateAccuracy(agents, optimizer, evalSet, data, config);
    points.push({ epoch, accuracy, meanLoss: lossSum / steps });
    if (!config.quiet) {
      process.stdout.write(
        `bucket=${config.bucket} L=${config.maxLength} seed=${config.seed} ` +
          `epoch=${epoch}/${config.epochs} loss=${(lossSum / steps).toFixed(4)} ` +
          `acc=${accuracy.toFixed(4)}\n`
      );
    }
    tau *= config.tauDecay;
  }

  const final = evaluateAccuracy(agents, optimizer, evalSet, data, config, true);
  const result: TrainResult = {
    config,
    points,
    finalAccuracy: points[points.length - 1].accuracy,
    untrainedAccuracy,
    logRecords: final.logRecords,
  };
  if (config.curveOut) writeCurve(config.curveOut, config, points);
  if (config.logOut) writeLog(config.logOut, final.logRecords);
  optimizer.dispose();
  for (const variable of variables) variable.dispose();
  return result;
}

function makeBatch(instances: Instance[], data: BucketData): Batch {
  const size = instances.length;
  const attributes = data.attributes;
  const vocab = data.vocab;
  const targetOneHot = new Float32Array(size * vocab);
  const candidateOneHot = new Float32Array(size * data.candidates * vocab);
  const targetIndex = new Int32Array(size);
  for (let i = 0; i < size; i++) {
    const codes = toSymbolCodes(instances[i], attributes, data.manifest.num_values);
    for (let c = 0; c < data.candidates; c++) {
      const rowBase = (i * data.candidates + c) * vocab;
      for (let a = 0; a < attributes; a++) {
        candidateOneHot[rowBase + codes[c * attributes + a]] = 1;
      }
    }
    const t = instances[i].targetIndex;
    for (let a = 0; a < attributes; a++) {
      targetOneHot[i * vocab + codes[t * attributes + a]] = 1;
    }
    targetIndex[i] = t;
  }
  return {
    targetOneHot: tf.tensor2d(targetOneHot, [size, vocab]),
    candidateOneHot: tf.tensor2d(candidateOneHot, [size * data.candidates, vocab]),
    targetIndex: tf.tensor1d(targetIndex, "int32"),
    size,
  };
}

function disposeBatch(batch: Batch): void {
  batch.targetOneHot.dispose();
  batch.candidateOneHot.dispose();
  batch.targetIndex.dispose();
}

function evaluateAccuracy(
  agents: Agents,
  optimizer: OptimizerLike,
  evalSet: Instance[],
  data: BucketData,
  config: TrainConfig,
  collectLog = false
): { accuracy: number; logRecords: LogRecord[] } {
  optimizer.beginEval();
  let correct = 0;
  const logRecords: LogRecord[] = [];
  for (let start = 0; start < evalSet.length; start += config.batchSize) {
    const slice = evalSet.slice(start, start + config.batchSize);
    const batch = makeBatch(slice, data);
    const { chosen, symbols } = tf.tidy(() => {
      const played = agents.play(batch, config.maxLength, config.tau, null);
      return {
        chosen: tf.argMax(played.scores, 1).dataSync(),
        symbols: played.symbols.dataSync(),
      };
    });
    for (let i = 0; i < slice.length; i++) {
      const success = chosen[i] === slice[i].targetIndex;
      if (success) correct += 1;
      if (collectLog) {
        logRecords.push({
          id: slice[i].id,
          max_length: config.maxLength,
          symbols: Array.from(symbols.slice(i * config.maxLength, (i + 1) * config.maxLength)).map(
            Number
          ),
          chosen: Number(chosen[i]),
          success,
        });
      }
    }
    disposeBatch(batch);
  }
  optimizer.endEval();
  return { accuracy: correct / evalSet.length, logRecords };
}

/** Per-epoch curve in the primary tabular format (FORMATS.md). */
export function writeCurve(outPath: string, config: TrainConfig, points: EpochPoint[]): void {
  const lines = ["# source: trained", "epoch\tmax_length\taccuracy"];
  for (const point of points) {
    lines.push(`${point.epoch}\t${config.maxLength}\t${point.accuracy.toFixed(6)}`);
  }
  fs.mkdirSync(path.dirname(path.resolve(outPath)), { recursive: true });
  fs.writeFileSync(outPath, lines.join("\n") + "\n", "utf-8");
}

/** Episode log byte-compatible with the primary: sorted keys, compact JSON. */
export function writeLog(outPath: string, records: LogRecord[]): void {
  const lines = records.map((record) =>
    JSON.stringify({
      chosen: record.chosen,
      id: record.id,
      max_length: record.max_length,
      success: record.success,
      symbols: record.symbols,
    })
  );
  fs.mkdirSync(path.dirname(path.resolve(outPath)), { recursive: true });
  fs.writeFileSync(outPath, lines.join("\n") + (lines.length ? "\n" : ""), "utf-8");
}
