"""FastAPI service wrapping the analysis pipeline.

Endpoints: POST /analyze (CSV in, chaos test results out), POST /rank
(results in, ordered selection out), POST /generate (reference signals),
GET /health. Input errors map to 400; per-signal analysis failures are
reported in the response body, not as errors.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..generators import GeneratorSpec, generate
from ..pipeline import analyze_signals
from ..report import (
    format_results_table,
    format_selection_table,
    result_to_dict,
)
from ..selection import rank
from ..signals import parse_csv, signals_to_csv
from .schemas import (
    AnalyzeRequest,
    AnalyzeResponse,
    ConfigModel,
    FailureModel,
    GenerateRequest,
    GenerateResponse,
    HealthResponse,
    RankRequest,
    RankResponse,
    ResultModel,
)


def create_app() -> FastAPI:
    app = FastAPI(title="chaoscv", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/analyze", response_model=AnalyzeResponse)
    def analyze(request: AnalyzeRequest) -> AnalyzeResponse:
        try:
            config = request.config.to_run_config()
            signals = parse_csv(request.csv_text, request.columns)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        results, failures = analyze_signals(signals, config, jobs=request.jobs)
        return AnalyzeResponse(
            results=[
                ResultModel(**result_to_dict(r, include_local_rates=request.verbose))
                for r in results
            ],
            failures=[FailureModel(signal_id=s, reason=msg) for s, msg in failures],
            table=format_results_table(results),
            config=ConfigModel(**config.to_dict()),
        )

    @app.post("/rank", response_model=RankResponse)
    def rank_results(request: RankRequest) -> RankResponse:
        if not request.results:
            return RankResponse(
                criterion=request.criterion, entries=[], filtered_out=[], table=""
            )
        try:
            selection = rank(
                request.results,
                criterion=request.criterion,
                top_n=request.top_n,
                filter_nonpositive=request.filter_nonpositive,
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return RankResponse(
            criterion=selection.criterion,
            entries=[e.__dict__ for e in selection.entries],
            filtered_out=[
                FailureModel(signal_id=s, reason=r) for s, r in selection.filtered_out
            ],
            table=format_selection_table(selection),
        )

    @app.post("/generate", response_model=GenerateResponse)
    def generate_signal(request: GenerateRequest) -> GenerateResponse:
        try:
            spec = GeneratorSpec(
                kind=request.kind,
                parameters=request.parameters,
                n=request.n,
                seed=request.seed,
                noise_std=request.noise_std,
                transient_skip=request.transient_skip,
            )
            signal = generate(spec)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return GenerateResponse(csv_text=signals_to_csv([signal]), spec=spec.to_dict())

    return app


app = create_app()
