"""Command-line front end: analyze / rank / generate / serve.

The CLI is a thin client of the HTTP service. By default it talks to an
in-process instance of the app; pass ``--server URL`` to target a running
deployment instead. Progress and errors go to stderr, data to files and
stdout. Exit codes: 0 success, 1 usage/IO error, 2 every signal failed.
"""

from __future__ import annotations

import contextlib
import json
import sys
import warnings
from datetime import datetime, timezone
from pathlib import Path

import click
import httpx


@contextlib.contextmanager
def _open_client(server: str | None):
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            yield client
    else:
        with warnings.catch_warnings():
            # starlette's test client import warns about its httpx backend;
            # irrelevant noise on the CLI's stderr
            warnings.simplefilter("ignore")
            from fastapi.testclient import TestClient

        from .service import create_app

        with TestClient(create_app()) as client:
            yield client


def _post(client, path: str, payload: dict) -> dict:
    response = client.post(path, json=payload)
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise click.ClickException(f"{path} failed ({response.status_code}): {detail}")
    return response.json()


def _echo_err(message: str) -> None:
    click.echo(message, err=True)


_CONFIG_FLAGS = ("l_max", "m_max", "q_max", "alpha", "n_starts", "base_seed",
                 "tol_g", "tol_f", "max_iterations", "dither")


def _merge_config(config_path: str | None, flag_values: dict) -> dict:
    """Config file (JSON, any subset of RunConfig keys) + explicit flags on top."""
    merged: dict = {}
    if config_path:
        try:
            loaded = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise click.ClickException(f"cannot read config file: {exc}")
        if not isinstance(loaded, dict):
            raise click.ClickException("config file must hold a JSON object")
        merged.update(loaded)
    for key in _CONFIG_FLAGS:
        if flag_values.get(key) is not None:
            merged[key] = flag_values[key]
    return merged


@click.group()
def cli() -> None:
    """Chaos detection and controlled-variable ranking for scalar time series."""


@cli.command()
@click.argument("input_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--columns", help="Comma-separated column subset (default: all columns).")
@click.option("--output", "-o", default="results.json", show_default=True,
              help="Results JSON path.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="JSON file supplying any subset of the settings; flags override it.")
@click.option("--l-max", type=int, default=None, help="Delay bound [default: 3].")
@click.option("--m-max", type=int, default=None, help="Embedding bound [default: 6].")
@click.option("--q-max", type=int, default=None, help="Hidden-unit bound [default: 8].")
@click.option("--alpha", type=float, default=None, help="Significance level [default: 0.05].")
@click.option("--n-starts", type=int, default=None, help="Fits per triplet [default: 5].")
@click.option("--base-seed", type=int, default=None, help="PRNG seed [default: 42].")
@click.option("--tol-g", type=float, default=None, help="Gradient tolerance [default: 1e-6].")
@click.option("--tol-f", type=float, default=None, help="Relative SSE tolerance [default: 1e-10].")
@click.option("--max-iterations", type=int, default=None, help="Iteration cap per start [default: 500].")
@click.option("--dither", type=float, default=None,
              help="Conditioning noise scale on the standardized signal [default: 1e-3].")
@click.option("--verbose", is_flag=True, help="Include per-step local rates in the JSON.")
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Signals analyzed in parallel.")
@click.option("--server", default=None, help="Service URL; default runs in-process.")
@click.pass_context
def analyze(ctx, input_csv, columns, output, config_path, verbose, jobs, server, **flags):
    """Run the chaos test on every selected column of INPUT_CSV."""
    try:
        csv_text = Path(input_csv).read_text(encoding="utf-8")
    except OSError as exc:
        raise click.ClickException(f"cannot read {input_csv}: {exc}")
    payload = {
        "csv_text": csv_text,
        "columns": [c.strip() for c in columns.split(",")] if columns else None,
        "config": _merge_config(config_path, flags),
        "verbose": verbose,
        "jobs": jobs,
    }
    _echo_err(f"analyzing {input_csv} ...")
    with _open_client(server) as client:
        data = _post(client, "/analyze", payload)

    for failure in data["failures"]:
        _echo_err(f"signal {failure['signal_id']} failed: {failure['reason']}")

    document = {
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "config": data["config"],
        "results": data["results"],
        "failures": data["failures"],
    }
    Path(output).write_text(json.dumps(document, indent=2, sort_keys=True) + "\n",
                            encoding="utf-8")
    _echo_err(f"wrote {output}")
    click.echo(data["table"])
    if not data["results"]:
        _echo_err("every signal failed")
        ctx.exit(2)


@cli.command()
@click.argument("results_json", type=click.Path(exists=True, dir_okay=False))
@click.option("--criterion", type=click.Choice(["product", "ascending_p", "combined"]),
              default="product", show_default=True)
@click.option("--top-n", type=int, default=None, help="Keep only the first N entries.")
@click.option("--no-filter", is_flag=True,
              help="Keep lambda <= 0 entries in the product ranking.")
@click.option("--output", "-o", default="selection.json", show_default=True,
              help="Selection JSON path.")
@click.option("--server", default=None, help="Service URL; default runs in-process.")
def rank(results_json, criterion, top_n, no_filter, output, server):
    """Rank the variables in RESULTS_JSON as controlled-variable candidates."""
    try:
        loaded = json.loads(Path(results_json).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise click.ClickException(f"cannot read results file: {exc}")
    rows = loaded.get("results") if isinstance(loaded, dict) else loaded
    if rows is None or not isinstance(rows, list):
        raise click.ClickException(
            "results file must hold a list of results or an object with a 'results' list"
        )
    if not rows:
        _echo_err("warning: no results to rank")
        click.echo("")
        Path(output).write_text(
            json.dumps({"criterion": criterion, "entries": [], "filtered_out": []},
                       indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        return

    payload = {
        "results": rows,
        "criterion": criterion,
        "top_n": top_n,
        "filter_nonpositive": not no_filter,
    }
    with _open_client(server) as client:
        data = _post(client, "/rank", payload)
    Path(output).write_text(
        json.dumps(
            {
                "criterion": data["criterion"],
                "entries": data["entries"],
                "filtered_out": data["filtered_out"],
            },
            indent=2,
            sort_keys=True,
        )
        + "\n",
        encoding="utf-8",
    )
    _echo_err(f"wrote {output}")
    click.echo(data["table"])


@cli.group()
def generate() -> None:
    """Write a reference signal (and its spec sidecar) to CSV."""


def _generate_command(kind: str, param_names: tuple[str, ...]):
    @click.option("--n", type=int, default=1000, show_default=True)
    @click.option("--seed", type=int, default=0, show_default=True)
    @click.option("--noise-std", type=float, default=0.0, show_default=True,
                  help="Observation noise added after generation.")
    @click.option("--transient-skip", type=int, default=0, show_default=True)
    @click.option("--output", "-o", default=f"{kind}.csv", show_default=True)
    @click.option("--server", default=None, help="Service URL; default runs in-process.")
    def command(n, seed, noise_std, transient_skip, output, server, **params):
        payload = {
            "kind": kind,
            "parameters": {k: v for k, v in params.items() if v is not None},
            "n": n,
            "seed": seed,
            "noise_std": noise_std,
            "transient_skip": transient_skip,
        }
        with _open_client(server) as client:
            data = _post(client, "/generate", payload)
        out = Path(output)
        out.write_text(data["csv_text"], encoding="utf-8")
        sidecar = out.with_suffix(".spec.json")
        sidecar.write_text(json.dumps(data["spec"], indent=2, sort_keys=True) + "\n",
                           encoding="utf-8")
        _echo_err(f"wrote {out} and {sidecar}")

    for name in param_names:
        command = click.option(f"--{name.replace('_', '-')}", name, type=float,
                               default=None, help=f"Map parameter {name}.")(command)
    command.__name__ = kind
    return command


generate.command("logistic")(_generate_command("logistic", ("r", "x0")))
generate.command("henon")(_generate_command("henon", ("a", "b", "x0", "y0")))
generate.command("lorenz")(
    _generate_command("lorenz", ("sigma", "rho", "beta", "h", "stride", "x0", "y0", "z0"))
)
generate.command("ar1")(_generate_command("ar1", ("phi", "sigma", "x0")))
generate.command("sine")(_generate_command("sine", ("amplitude", "period", "phase")))
generate.command("iid-noise")(_generate_command("iid_noise", ("std",)))


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the analysis service with uvicorn."""
    import uvicorn

    uvicorn.run("chaoscv.service:app", host=host, port=port)


def main(argv=None) -> int:
    try:
        outcome = cli.main(args=argv, standalone_mode=False)
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return 1
    except click.exceptions.Abort:
        _echo_err("aborted")
        return 1
    except SystemExit as exc:
        return int(exc.code or 0)
    except OSError as exc:
        _echo_err(str(exc))
        return 1
    # ctx.exit(code) surfaces as a plain return value in non-standalone mode
    return outcome if isinstance(outcome, int) else 0


if __name__ == "__main__":
    sys.exit(main())
