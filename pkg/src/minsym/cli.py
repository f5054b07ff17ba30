"""Command-line interface: a thin client over the HTTP service.

Every subcommand builds a request, sends it through :class:`ServiceClient`
(in-process by default, ``--server URL`` for a remote service), and prints
the response. Tabular output is plain tab-delimited text suitable for
external plotting.

Exit codes: 0 success, 2 usage, 3 domain/validation failure, 4 I/O or format
failure, 5 partial result (sampling budget exhausted).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .client import ServiceClient, ServiceError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_IO = 4
EXIT_PARTIAL = 5

_KIND_TO_EXIT = {
    "domain": EXIT_DOMAIN,
    "purity": EXIT_DOMAIN,
    "format": EXIT_IO,
    "io": EXIT_IO,
    "partial_sample": EXIT_PARTIAL,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "serve":
        return _cmd_serve(args)
    client = ServiceClient(args.server)
    try:
        return args.handler(client, args)
    except ServiceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.kind == "partial_sample" and "histogram" in exc.payload:
            print(f"histogram: {json.dumps(exc.payload['histogram'])}", file=sys.stderr)
        return _KIND_TO_EXIT.get(exc.kind, 1)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minsym",
        description="Minimum-symbol analysis and dataset generation for signaling games.",
    )
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running service; default runs the service in-process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="minimum symbol count and witness for one instance")
    p.add_argument("instance", help="JSON file: {num_values, target_index, objects}")
    p.add_argument("--algorithm", choices=["hitting", "enum"], default="hitting")
    p.set_defaults(handler=_cmd_solve)

    p = sub.add_parser("prob", help="collision probabilities for uniform sampling")
    p.add_argument("-n", type=int, required=True, help="number of sampled labels")
    p.add_argument("-m", type=int, required=True, help="occurrence threshold")
    p.add_argument("--classes", type=int, required=True, help="number of equiprobable classes")
    p.add_argument("--trials", type=int, default=None, help="also run a Monte Carlo estimate")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=_cmd_prob)

    p = sub.add_parser("hist", help="Monte Carlo distribution of the minimum symbol count")
    _add_space_args(p)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None, help="also write the histogram as JSON")
    p.set_defaults(handler=_cmd_hist)

    p = sub.add_parser("sample", help="rejection-sample a bucketed dataset")
    _add_space_args(p)
    p.add_argument("--buckets", default="2,3", help="comma-separated bucket keys")
    p.add_argument("--per-bucket", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-attempts", type=int, default=None)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--out", required=True, help="dataset directory to create")
    p.add_argument("--overwrite", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(handler=_cmd_sample)

    p = sub.add_parser("verify", help="re-solve every stored instance and check bucket purity")
    p.add_argument("dataset", help="dataset directory")
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("export", help="one-hot train/eval export of a dataset")
    p.add_argument("dataset", help="dataset directory")
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output directory (default: dataset directory)")
    p.add_argument("--overwrite", action="store_true")
    p.set_defaults(handler=_cmd_export)

    p = sub.add_parser("eval", help="oracle game accuracy over a range of max lengths")
    p.add_argument("dataset", help="dataset directory")
    p.add_argument("--buckets", default=None, help="restrict to these buckets (comma-separated)")
    p.add_argument("--max-lengths", default="1,2,3,4,5")
    p.add_argument("--episodes", type=int, default=1, help="episodes per instance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--log", default=None, help="write episode records here (JSONL)")
    p.add_argument("--curves", default=None, help="write per-bucket curve files here")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(handler=_cmd_eval)

    p = sub.add_parser("analyze", help="effective symbols and gaps from a curve or log")
    p.add_argument("curve", nargs="?", default=None, help="curve file (TSV)")
    p.add_argument("--log", default=None, help="message log to summarize instead")
    p.add_argument("--epsilon", type=float, default=0.02)
    p.set_defaults(handler=_cmd_analyze)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8008)
    return parser


def _add_space_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--attributes", type=int, default=20, help="number of attributes")
    p.add_argument("--values", type=int, default=4, help="values per attribute")
    p.add_argument("--distractors", type=int, default=63, help="distractors per instance")


def _cmd_solve(client: ServiceClient, args) -> int:
    payload = json.loads(Path(args.instance).read_text(encoding="utf-8"))
    payload["algorithm"] = args.algorithm
    res = client.post("/solve", payload)
    if not res["solvable"]:
        print("unsolvable: a distractor duplicates the target")
        return EXIT_OK
    print(f"min_symbols\t{res['min_symbols']}")
    pairs = " ".join(f"{w['attribute']}={w['value']}" for w in res["witness"])
    print(f"witness\t{pairs}")
    return EXIT_OK


def _cmd_prob(client: ServiceClient, args) -> int:
    payload = {
        "n": args.n,
        "m": args.m,
        "num_classes": args.classes,
        "monte_carlo_trials": args.trials,
        "seed": args.seed,
    }
    res = client.post("/prob", payload)
    print(f"p_class_at_least\t{res['p_class_at_least']:.10g}")
    print(f"p_exists_class_at_least\t{res['p_exists_class_at_least']:.10g}")
    if res.get("monte_carlo"):
        mc = res["monte_carlo"]
        print(
            f"monte_carlo\t{mc['probability']:.10g}\tstderr\t{mc['stderr']:.3g}"
            f"\ttrials\t{mc['trials']}\tseed\t{mc['seed']}"
        )
    return EXIT_OK


def _cmd_hist(client: ServiceClient, args) -> int:
    payload = {
        "num_attributes": args.attributes,
        "num_values": args.values,
        "num_distractors": args.distractors,
        "trials": args.trials,
        "seed": args.seed,
        "workers": args.workers,
    }
    res = client.post("/hist", payload)
    print(f"# trials: {res['trials']}  seed: {args.seed}")
    print("min_m\tcount\tfraction")
    for key, count in res["histogram"].items():
        print(f"{key}\t{count}\t{count / res['trials']:.6f}")
    if args.out:
        Path(args.out).write_text(
            json.dumps(res, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return EXIT_OK


def _cmd_sample(client: ServiceClient, args) -> int:
    payload = {
        "num_attributes": args.attributes,
        "num_values": args.values,
        "num_distractors": args.distractors,
        "buckets": _parse_int_list(args.buckets),
        "per_bucket": args.per_bucket,
        "seed": args.seed,
        "max_attempts": args.max_attempts,
        "train_fraction": args.train_fraction,
        "out_dir": args.out,
        "overwrite": args.overwrite,
        "workers": args.workers,
    }
    res = client.post("/sample", payload)
    manifest = res["manifest"]
    print(f"dataset written to {res['out_dir']}")
    print(f"seed: {manifest['seed']}  draws: {manifest['draws']}")
    print("bucket\tcount")
    for bucket, count in manifest["bucket_counts"].items():
        print(f"{bucket}\t{count}")
    return EXIT_OK


def _cmd_verify(client: ServiceClient, args) -> int:
    res = client.post("/verify", {"dataset": args.dataset})
    print(f"ok: re-solved {res['instances_checked']} instances with zero mismatches")
    return EXIT_OK


def _cmd_export(client: ServiceClient, args) -> int:
    payload = {
        "dataset": args.dataset,
        "split_seed": args.split_seed,
        "out_dir": args.out,
        "overwrite": args.overwrite,
    }
    res = client.post("/export", payload)
    print(f"export written to {res['out_dir']}")
    print("bucket\ttrain\teval")
    for header in res["headers"]:
        print(f"{header['bucket']}\t{header['train_instances']}\t{header['eval_instances']}")
    return EXIT_OK


def _cmd_eval(client: ServiceClient, args) -> int:
    payload = {
        "dataset": args.dataset,
        "buckets": _parse_int_list(args.buckets) if args.buckets else None,
        "max_lengths": _parse_int_list(args.max_lengths),
        "episodes_per_instance": args.episodes,
        "seed": args.seed,
        "workers": args.workers,
        "log_out": args.log,
        "curve_dir": args.curves,
    }
    res = client.post("/eval", payload)
    print(f"# seed: {args.seed}")
    print("bucket\tmax_length\texpected_accuracy\tempirical_accuracy\tstderr")
    for point in res["points"]:
        print(
            f"{point['bucket']}\t{point['max_length']}\t{point['expected_accuracy']:.6f}"
            f"\t{point['empirical_accuracy']:.6f}\t{point['stderr']:.6f}"
        )
    for path in res.get("curve_paths", []):
        print(f"curve written: {path}")
    if res.get("log_path"):
        print(f"log written: {res['log_path']}")
    return EXIT_OK


def _cmd_analyze(client: ServiceClient, args) -> int:
    if (args.curve is None) == (args.log is None):
        print("error: provide a curve file or --log, not both", file=sys.stderr)
        return EXIT_USAGE
    if args.log is not None:
        res = client.post("/analyze/log", {"log_path": args.log})
        print(f"episodes\t{res['episodes']}")
        print("length\tcount")
        for length, count in res["length_histogram"].items():
            print(f"{length}\t{count}")
        print("symbol\tcount")
        for code, count in res["symbol_histogram"].items():
            print(f"{code}\t{count}")
        return EXIT_OK
    res = client.post("/analyze", {"curve_path": args.curve, "epsilon": args.epsilon})
    print("max_length\taccuracy\tgap")
    for row in res["table"]:
        print(f"{row['max_length']}\t{row['accuracy']:.6f}\t{row['gap']:.6f}")
    print(f"effective_symbols\t{res['effective_symbols']}\t(epsilon={res['epsilon']})")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        print(f"error: expected comma-separated integers, got {text!r}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


if __name__ == "__main__":
    sys.exit(main())
