"""Operator command line: serve, simulate, render, aggregate, purge, validate.

Paths and the bind address resolve in order: flag, environment variable
(EMOTRAIL_BIND / EMOTRAIL_STORE / EMOTRAIL_CATALOG), config file, default.
"""

from __future__ import annotations

import datetime as dt
import json
import sys
from pathlib import Path

import click
import yaml

from . import aggregate as agg
from . import postcard as pc
from . import simulate as sim
from .affect import ScoringConfig, score, FauStream
from .catalog import default_catalog, load_catalog_file
from .errors import EmotrailError
from .store import SessionStore


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    return raw or {}


def _resolve_catalog(catalog_path: str | None, config: dict):
    path = catalog_path or config.get("catalog")
    return load_catalog_file(path) if path else default_catalog()


def _resolve_store(store_path: str | None, config: dict) -> SessionStore:
    path = store_path or config.get("store") or "./store"
    return SessionStore(path)


def _scoring_from(config: dict) -> ScoringConfig:
    raw = config.get("scoring") or {}
    return ScoringConfig(
        c_min=float(raw.get("c_min", 0.75)),
        n_min=int(raw.get("n_min", 30)),
        omega_max=float(raw.get("omega_max", 1.0)),
    )


def _parse_cutoff(text: str) -> int:
    """Epoch milliseconds, given either as an integer or an ISO-8601 timestamp."""
    try:
        return int(text)
    except ValueError:
        pass
    parsed = dt.datetime.fromisoformat(text)
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=dt.timezone.utc)
    return int(parsed.timestamp() * 1000)


@click.group()
def main():
    """Emotion-driven museum visit orchestration."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="YAML config file.")
@click.option("--catalog", "catalog_path", envvar="EMOTRAIL_CATALOG", default=None,
              help="Catalog YAML (defaults to the bundled catalog).")
@click.option("--store", "store_path", envvar="EMOTRAIL_STORE", default=None,
              help="Store directory (default ./store).")
@click.option("--bind", envvar="EMOTRAIL_BIND", default=None,
              help="host:port to listen on (default 127.0.0.1:8000).")
@click.option("--frontend", "frontend_dir", type=click.Path(exists=True), default=None,
              help="Optional static frontend directory to serve at /.")
def serve(config_path, catalog_path, store_path, bind, frontend_dir):
    """Run the gateway service."""
    import uvicorn

    from .service import create_app

    config = _load_config(config_path)
    catalog = _resolve_catalog(catalog_path, config)
    store = _resolve_store(store_path, config)
    bind = bind or config.get("bind") or "127.0.0.1:8000"
    host, _, port = bind.rpartition(":")
    app = create_app(catalog, store, scoring=_scoring_from(config),
                     frontend_dir=frontend_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))


@main.command()
@click.option("--catalog", "catalog_path", envvar="EMOTRAIL_CATALOG", default=None)
@click.option("--store", "store_path", envvar="EMOTRAIL_STORE", default=None)
@click.option("--sessions", "n_sessions", type=int, default=10,
              help="Session count (ignored by the paper-2019 profile).")
@click.option("--seed", type=int, default=0)
@click.option("--profile", default=sim.PROFILE_UNIFORM,
              type=click.Choice([sim.PROFILE_UNIFORM, sim.PROFILE_PAPER_2019]))
def simulate(catalog_path, store_path, n_sessions, seed, profile):
    """Populate a store with synthetic visitor sessions."""
    catalog = _resolve_catalog(catalog_path, {})
    store = _resolve_store(store_path, {})
    report = sim.simulate(store, catalog, n_sessions=n_sessions, seed=seed,
                          profile=profile)
    click.echo(f"complete={report.complete} partial={report.partial} "
               f"donated={report.donated} withheld={report.withheld}")


@main.command("render-postcard")
@click.argument("session_id")
@click.option("--catalog", "catalog_path", envvar="EMOTRAIL_CATALOG", default=None)
@click.option("--store", "store_path", envvar="EMOTRAIL_STORE", default=None)
@click.option("--out", "out_dir", default=None,
              help="Output directory (default: the store's postcards dir).")
def render_postcard(session_id, catalog_path, store_path, out_dir):
    """Compose and write the postcard SVG and sidecar for one session."""
    catalog = _resolve_catalog(catalog_path, {})
    store = _resolve_store(store_path, {})
    session = store.load_session(session_id)
    scores = session.scores
    if scores is None and session.fau_frames:
        scores = score(FauStream(frames=session.fau_frames, session_id=session_id))
    data = pc.compose_postcard(session, scores, catalog)
    out = out_dir or store.postcards_dir
    svg_path, meta_path = pc.write_postcard(data, catalog, out, session_id)
    click.echo(str(svg_path))
    click.echo(str(meta_path))


@main.command()
@click.option("--catalog", "catalog_path", envvar="EMOTRAIL_CATALOG", default=None)
@click.option("--store", "store_path", envvar="EMOTRAIL_STORE", default=None)
@click.option("--out", "out_dir", default=".", help="Where to write the outputs.")
@click.option("--export", "export_path", default=None,
              help="Also write the donated-session export stream to this file.")
def aggregate(catalog_path, store_path, out_dir, export_path):
    """Compute deployment statistics and render the per-painting emotion map."""
    catalog = _resolve_catalog(catalog_path, {})
    store = _resolve_store(store_path, {})
    dataset = agg.load_dataset(store)
    stats = agg.summary_stats(dataset)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "emotion_map.svg").write_bytes(agg.render_emotion_map(dataset, catalog))
    (out / "stats.json").write_text(json.dumps(stats.to_dict(), indent=2) + "\n",
                                    encoding="utf-8")
    if export_path == "-":
        store.export_donated_jsonl(sys.stdout)
    elif export_path:
        with open(export_path, "w", encoding="utf-8") as fp:
            store.export_donated_jsonl(fp)
    click.echo(json.dumps(stats.to_dict(), indent=2))


@main.command("purge-incomplete")
@click.option("--cutoff", required=True,
              help="Epoch ms or ISO timestamp; consentless sessions older than this are deleted.")
@click.option("--store", "store_path", envvar="EMOTRAIL_STORE", default=None)
def purge_incomplete(cutoff, store_path):
    """Hard-delete incomplete sessions whose last activity precedes the cutoff."""
    store = _resolve_store(store_path, {})
    count = store.purge_incomplete(_parse_cutoff(cutoff))
    click.echo(f"deleted {count} incomplete session(s)")


@main.command("validate-catalog")
@click.argument("path", type=click.Path(exists=True))
def validate_catalog(path):
    """Check a catalog config file against all structural invariants."""
    try:
        catalog = load_catalog_file(path)
    except EmotrailError as exc:
        click.echo(f"INVALID: {exc}", err=True)
        sys.exit(1)
    click.echo(f"OK: {len(catalog.entries)} emotions, {len(catalog.videos)} videos")


if __name__ == "__main__":
    main()
