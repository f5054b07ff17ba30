/**
 * Train one sender/receiver pair on one dataset bucket at one maximum
 * message length, writing the per-epoch accuracy curve and the final-epoch
 * message log in the primary package's formats.
 */

import { parseArgs } from "node:util";

import { setupBackend } from "./backend";
import { DEFAULTS, TrainConfig, trainRun } from "./train";

function usage(): never {
  process.stderr.write(
    "usage: node dist/cli.js --dataset DIR --bucket K --max-length L [options]\n" +
      "  --epochs N          training epochs (default 30)\n" +
      "  --hidden N          GRU hidden size (default 512)\n" +
      "  --embedding N       symbol embedding size (default 32)\n" +
      "  --tau F             Gumbel-Softmax temperature (default 1.0)\n" +
      "  --tau-decay F       per-epoch multiplicative decay (default 1.0)\n" +
      "  --batch N           batch size (default 64)\n" +
      "  --lr F              learning rate (default 1e-3)\n" +
      "  --weight-decay F    decoupled weight decay (default 0)\n" +
      "  --seed N            run seed (default 0)\n" +
      "  --optimizer NAME    schedule-free-adamw | adam (default schedule-free-adamw)\n" +
      "  --vocab N           assert the dataset vocabulary size\n" +
      "  --curve-out PATH    write the per-epoch accuracy curve (TSV)\n" +
      "  --log-out PATH      write the final-epoch message log (JSONL)\n" +
      "  --quiet             suppress per-epoch progress lines\n"
  );
  process.exit(2);
}

export async function main(argv: string[]): Promise<number> {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        dataset: { type: "string" },
        bucket: { type: "string" },
        "max-length": { type: "string" },
        epochs: { type: "string" },
        hidden: { type: "string" },
        embedding: { type: "string" },
        tau: { type: "string" },
        "tau-decay": { type: "string" },
        batch: { type: "string" },
        lr: { type: "string" },
        "weight-decay": { type: "string" },
        seed: { type: "string" },
        optimizer: { type: "string" },
        vocab: { type: "string" },
        "curve-out": { type: "string" },
        "log-out": { type: "string" },
        quiet: { type: "boolean" },
      },
    });
  } catch (err) {
    process.stderr.write(`${(err as Error).message}\n`);
    usage();
  }
  const values = parsed.values;
  if (!values.dataset || !values.bucket || !values["max-length"]) usage();
  const optimizer = (values.optimizer ?? DEFAULTS.optimizer) as TrainConfig["optimizer"];
  if (optimizer !== "schedule-free-adamw" && optimizer !== "adam") usage();

  const config: TrainConfig = {
    datasetDir: values.dataset!,
    bucket: parseInt(values.bucket!, 10),
    maxLength: parseInt(values["max-length"]!, 10),
    epochs: values.epochs ? parseInt(values.epochs, 10) : DEFAULTS.epochs,
    hidden: values.hidden ? parseInt(values.hidden, 10) : DEFAULTS.hidden,
    embedding: values.embedding ? parseInt(values.embedding, 10) : DEFAULTS.embedding,
    tau: values.tau ? parseFloat(values.tau) : DEFAULTS.tau,
    tauDecay: values["tau-decay"] ? parseFloat(values["tau-decay"]) : DEFAULTS.tauDecay,
    batchSize: values.batch ? parseInt(values.batch, 10) : DEFAULTS.batchSize,
    learningRate: values.lr ? parseFloat(values.lr) : DEFAULTS.learningRate,
    weightDecay: values["weight-decay"]
      ? parseFloat(values["weight-decay"])
      : DEFAULTS.weightDecay,
    seed: values.seed ? parseInt(values.seed, 10) : 0,
    optimizer,
    vocab: values.vocab ? parseInt(values.vocab, 10) : undefined,
    curveOut: values["curve-out"],
    logOut: values["log-out"],
    quiet: values.quiet ?? false,
  };

  const backend = await setupBackend();
  if (!config.quiet) process.stdout.write(`backend: ${backend}\n`);
  const result = await trainRun(config);
  process.stdout.write(
    `final accuracy: ${result.finalAccuracy.toFixed(4)} ` +
      `(untrained ${result.untrainedAccuracy.toFixed(4)})\n`
  );
  return 0;
}

if (require.main === module) {
  main(process.argv.slice(2)).then(
    (code) => process.exit(code),
    (err) => {
      process.stderr.write(`error: ${err.message}\n`);
      process.exit(1);
    }
  );
}
