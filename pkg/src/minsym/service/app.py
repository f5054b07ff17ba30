"""FastAPI application wrapping the core package.

Every pipeline stage is an endpoint so long-running jobs (sampling, export,
evaluation) can be hosted once and driven by many clients; the bundled CLI is
one such client. Error mapping: domain violations 422, malformed files 400,
missing paths 404, refusal to overwrite 409, exhausted sampling budget 409
with kind "partial_sample" and the outcome histogram attached.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..analysis import (
    AccuracyCurve,
    accuracy_gap,
    effective_symbols,
    message_length_stats,
    read_curve,
    read_message_log,
    write_curve,
    write_message_log,
)
from ..core import AttributeSpace, GameInstance, ObjectVector
from ..dataset_io import export_one_hot, read_dataset, write_dataset
from ..errors import BucketPurityError, DomainError, FormatError, PartialSampleError
from ..game import evaluate, oracle_receiver, oracle_sender
from ..prob import CollisionQuery, monte_carlo_exists, p_class_at_least, p_exists_class_at_least
from ..sampler import SamplerConfig, controlled_sample, min_m_histogram
from ..sms import solve_min_sym_enum, solve_min_sym_hitting
from . import models


def create_app() -> FastAPI:
    app = FastAPI(
        title="minsym",
        version=__version__,
        description="Minimum-symbol analysis and dataset generation for signaling games",
    )

    @app.exception_handler(DomainError)
    async def domain_error(request: Request, exc: DomainError):
        return JSONResponse(status_code=422, content={"detail": str(exc), "kind": "domain"})

    @app.exception_handler(BucketPurityError)
    async def purity_error(request: Request, exc: BucketPurityError):
        return JSONResponse(
            status_code=400,
            content={
                "detail": str(exc),
                "kind": "purity",
                "record_id": exc.record_id,
                "expected": exc.expected,
                "actual": exc.actual,
            },
        )

    @app.exception_handler(FormatError)
    async def format_error(request: Request, exc: FormatError):
        return JSONResponse(status_code=400, content={"detail": str(exc), "kind": "format"})

    @app.exception_handler(FileNotFoundError)
    async def missing_file(request: Request, exc: FileNotFoundError):
        return JSONResponse(status_code=404, content={"detail": str(exc), "kind": "io"})

    @app.exception_handler(FileExistsError)
    async def existing_file(request: Request, exc: FileExistsError):
        return JSONResponse(status_code=409, content={"detail": str(exc), "kind": "io"})

    @app.exception_handler(PartialSampleError)
    async def partial_sample(request: Request, exc: PartialSampleError):
        histogram = {
            ("unsolvable" if k is None else str(k)): v for k, v in exc.histogram.items()
        }
        return JSONResponse(
            status_code=409,
            content={"detail": str(exc), "kind": "partial_sample", "histogram": histogram},
        )

    @app.get("/health", response_model=models.HealthResponse)
    def health():
        return models.HealthResponse(status="ok", version=__version__)

    @app.post("/solve", response_model=models.SolveResponse)
    def solve(req: models.SolveRequest):
        space = AttributeSpace(num_attributes=len(req.objects[0]), num_values=req.num_values)
        instance = GameInstance(
            space, tuple(ObjectVector(tuple(v)) for v in req.objects), req.target_index
        )
        solver = solve_min_sym_enum if req.algorithm == "enum" else solve_min_sym_hitting
        result = solver(instance)
        witness = None
        if result.witness is not None:
            witness = [
                models.WitnessPair(attribute=a, value=v) for a, v in result.witness.sorted_pairs()
            ]
        return models.SolveResponse(
            solvable=result.solvable,
            min_symbols=result.min_symbols,
            witness=witness,
            algorithm=req.algorithm,
        )

    @app.post("/prob", response_model=models.ProbResponse)
    def prob(req: models.ProbRequest):
        query = CollisionQuery(n=req.n, m=req.m, num_classes=req.num_classes)
        monte_carlo = None
        if req.monte_carlo_trials:
            estimate = monte_carlo_exists(query, req.monte_carlo_trials, req.seed)
            monte_carlo = models.MonteCarloResult(
                probability=estimate.probability,
                stderr=estimate.stderr,
                trials=estimate.trials,
                successes=estimate.successes,
                seed=estimate.seed,
            )
        return models.ProbResponse(
            p_class_at_least=p_class_at_least(query),
            p_exists_class_at_least=p_exists_class_at_least(query),
            monte_carlo=monte_carlo,
        )

    @app.post("/hist", response_model=models.HistResponse)
    def hist(req: models.HistRequest):
        space = AttributeSpace(req.num_attributes, req.num_values)
        histogram = min_m_histogram(
            space, req.num_distractors, req.trials, req.seed, workers=req.workers
        )
        printable = {
            ("unsolvable" if k is None else str(k)): v
            for k, v in sorted(histogram.items(), key=lambda kv: (kv[0] is None, kv[0] or 0))
        }
        return models.HistResponse(trials=req.trials, histogram=printable)

    @app.post("/sample", response_model=models.SampleResponse)
    def sample(req: models.SampleRequest):
        config = SamplerConfig(
            space=AttributeSpace(req.num_attributes, req.num_values),
            num_distractors=req.num_distractors,
            per_bucket_target=req.per_bucket,
            tracked_buckets=frozenset(req.buckets),
            seed=req.seed,
            max_attempts=req.max_attempts or 0,
        )
        dataset = controlled_sample(config, workers=req.workers)
        manifest = write_dataset(
            dataset, req.out_dir, overwrite=req.overwrite, train_fraction=req.train_fraction
        )
        return models.SampleResponse(out_dir=req.out_dir, manifest=manifest)

    @app.post("/verify", response_model=models.VerifyResponse)
    def verify(req: models.VerifyRequest):
        dataset = read_dataset(req.dataset, verify=True)
        counts = dataset.bucket_counts()
        return models.VerifyResponse(
            ok=True,
            instances_checked=sum(counts.values()),
            bucket_counts={str(k): v for k, v in counts.items()},
        )

    @app.post("/export", response_model=models.ExportResponse)
    def export(req: models.ExportRequest):
        dataset = read_dataset(req.dataset)
        out_dir = req.out_dir or req.dataset
        headers = export_one_hot(
            dataset,
            split_seed=req.split_seed,
            out_dir=out_dir,
            train_fraction=_manifest_train_fraction(req.dataset),
            overwrite=req.overwrite,
        )
        return models.ExportResponse(out_dir=out_dir, headers=headers)

    @app.post("/eval", response_model=models.EvalResponse)
    def eval_oracle(req: models.EvalRequest):
        dataset = read_dataset(req.dataset)
        if req.buckets is not None:
            missing = [b for b in req.buckets if b not in dataset.buckets]
            if missing:
                raise DomainError(f"dataset has no buckets {missing}")
            dataset.buckets = {b: dataset.buckets[b] for b in req.buckets}
        log_records: list | None = [] if req.log_out else None
        points = []
        curves: dict[int, dict[int, float]] = {}
        for max_length in sorted(set(req.max_lengths)):
            results = evaluate(
                dataset,
                oracle_sender,
                oracle_receiver,
                max_length,
                episodes_per_instance=req.episodes_per_instance,
                seed=req.seed,
                log_records=log_records,
                workers=req.workers,
            )
            for bucket, res in sorted(results.items()):
                curves.setdefault(bucket, {})[max_length] = res.expected_accuracy
                points.append(
                    models.EvalPoint(
                        bucket=bucket,
                        max_length=res.max_length,
                        instances=res.instances,
                        episodes=res.episodes,
                        empirical_accuracy=res.empirical_accuracy,
                        stderr=res.stderr,
                        expected_accuracy=res.expected_accuracy,
                    )
                )
        log_path = None
        if req.log_out:
            write_message_log(req.log_out, log_records)
            log_path = req.log_out
        curve_paths = []
        if req.curve_dir:
            curve_root = Path(req.curve_dir)
            curve_root.mkdir(parents=True, exist_ok=True)
            for bucket, pts in sorted(curves.items()):
                path = curve_root / f"oracle_bucket{bucket}.tsv"
                write_curve(path, AccuracyCurve(points=pts, source="oracle"))
                curve_paths.append(str(path))
        return models.EvalResponse(points=points, log_path=log_path, curve_paths=curve_paths)

    @app.post("/analyze", response_model=models.AnalyzeResponse)
    def analyze(req: models.AnalyzeRequest):
        if (req.curve_path is None) == (req.points is None):
            raise DomainError("provide exactly one of curve_path or points")
        if req.curve_path is not None:
            curve = read_curve(req.curve_path)
        else:
            curve = AccuracyCurve(points=dict(req.points), source=req.source)
        best = max(curve.points.values())
        table = [
            models.GapRow(
                max_length=length,
                accuracy=curve.points[length],
                gap=accuracy_gap(curve, length),
            )
            for length in sorted(curve.points)
        ]
        return models.AnalyzeResponse(
            source=curve.source,
            epsilon=req.epsilon,
            effective_symbols=effective_symbols(curve, req.epsilon),
            max_accuracy=best,
            table=table,
        )

    @app.post("/analyze/log", response_model=models.LogStatsResponse)
    def analyze_log(req: models.LogStatsRequest):
        stats = message_length_stats(read_message_log(req.log_path))
        return models.LogStatsResponse(
            episodes=stats.episodes,
            length_histogram=stats.length_histogram,
            symbol_histogram=stats.symbol_histogram,
        )

    return app


def _manifest_train_fraction(dataset_dir: str) -> float:
    from ..dataset_io import read_manifest

    return float(read_manifest(dataset_dir).get("train_fraction", 0.8))
