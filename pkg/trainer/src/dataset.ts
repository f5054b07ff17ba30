/**
 * Reader for the canonical dataset format (manifest.json + instances.jsonl),
 * as specified in the repository's FORMATS.md. Objects are stored as value
 * indices; one-hot encodings are materialized on demand via embedding-row
 * gathers, which is the same linear map as multiplying the one-hot vector.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { Rng } from "./rng";

export interface Manifest {
  format_version: number;
  num_attributes: number;
  num_values: number;
  num_distractors: number;
  seed: number;
  bucket_counts: Record<string, number>;
  splits: Record<string, { train: number; eval: number }>;
  train_fraction: number;
  records_file: string;
}

export interface Instance {
  id: number;
  minM: number;
  targetIndex: number;
  /** Flattened (candidates, attributes) value indices. */
  values: Int32Array;
}

export interface BucketData {
  manifest: Manifest;
  bucket: number;
  candidates: number;
  attributes: number;
  vocab: number;
  instances: Instance[];
}

export function readManifest(datasetDir: string): Manifest {
  const manifestPath = path.join(datasetDir, "manifest.json");
  const manifest = JSON.parse(fs.readFileSync(manifestPath, "utf-8")) as Manifest;
  if (manifest.format_version !== 1) {
    throw new Error(`unsupported dataset format_version ${manifest.format_version}`);
  }
  return manifest;
}

export function readBucket(datasetDir: string, bucket: number): BucketData {
  const manifest = readManifest(datasetDir);
  if (!(String(bucket) in manifest.bucket_counts)) {
    throw new Error(
      `dataset has no bucket ${bucket} (available: ${Object.keys(manifest.bucket_counts).join(", ")})`
    );
  }
  const candidates = manifest.num_distractors + 1;
  const attributes = manifest.num_attributes;
  const recordsPath = path.join(datasetDir, manifest.records_file);
  const lines = fs.readFileSync(recordsPath, "utf-8").split("\n");

  const instances: Instance[] = [];
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    let record: { id: number; min_m: number; target_index: number; objects: number[][] };
    try {
      record = JSON.parse(line);
    } catch (err) {
      throw new Error(`${recordsPath}: line ${i + 1}: invalid JSON`);
    }
    if (record.min_m !== bucket) continue;
    if (record.objects.length !== candidates) {
      throw new Error(
        `${recordsPath}: line ${i + 1}: expected ${candidates} objects, got ${record.objects.length}`
      );
    }
    const values = new Int32Array(candidates * attributes);
    for (let c = 0; c < candidates; c++) {
      const row = record.objects[c];
      if (row.length !== attributes) {
        throw new Error(`${recordsPath}: line ${i + 1}: object has ${row.length} attributes`);
      }
      for (let a = 0; a < attributes; a++) {
        values[c * attributes + a] = row[a];
      }
    }
    instances.push({ id: record.id, minM: record.min_m, targetIndex: record.target_index, values });
  }

  const expected = manifest.bucket_counts[String(bucket)];
  if (instances.length !== expected) {
    throw new Error(`bucket ${bucket}: manifest says ${expected} records, file holds ${instances.length}`);
  }
  return {
    manifest,
    bucket,
    candidates,
    attributes,
    vocab: manifest.num_attributes * manifest.num_values,
    instances,
  };
}

/**
 * Deterministic train/eval split with the sizes recorded in the manifest.
 * The shuffle is seeded locally; the primary package's byte-level export
 * split is a separate artifact and need not match.
 */
export function splitTrainEval(
  data: BucketData,
  seed: number
): { train: Instance[]; evalSet: Instance[] } {
  const sizes = data.manifest.splits[String(data.bucket)];
  const shuffled = new Rng(seed).fork(data.bucket).shuffle([...data.instances]);
  return {
    train: shuffled.slice(0, sizes.train),
    evalSet: shuffled.slice(sizes.train),
  };
}

/**
 * Vocabulary codes follow the primary bijection: code = attribute * num_values + value.
 * Returns flattened (candidates, attributes) symbol codes for one instance.
 */
export function toSymbolCodes(instance: Instance, attributes: number, numValues: number): Int32Array {
  const codes = new Int32Array(instance.values.length);
  for (let i = 0; i < instance.values.length; i++) {
    const attribute = i % attributes;
    codes[i] = attribute * numValues + instance.values[i];
  }
  return codes;
}
