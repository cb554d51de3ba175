"""Admin command line: serve the API, ingest fixtures, refresh galleries,
run what-if scenarios, render reports."""

from __future__ import annotations

import sys

import click

from .app import create_app, dump_json
from .config import ConfigError, load_config, resolve_config_path
from .service import AriseService, NotFoundError


def _load_service(config_flag: str | None) -> AriseService:
    try:
        path = resolve_config_path(config_flag)
        config = load_config(path)
    except ConfigError as exc:
        raise click.UsageError(str(exc))
    return AriseService(config)


config_option = click.option(
    "--config", "config_flag", default=None, metavar="PATH",
    help="Config file (the ARISE_CONFIG environment variable takes precedence).",
)


@click.group()
def main():
    """Data backbone for the heritage-resilience explorer."""


@main.command()
@config_option
def serve(config_flag):
    """Run the HTTP API (blocking)."""
    import uvicorn

    service = _load_service(config_flag)
    service.start_gallery_scheduler()
    app = create_app(service)
    click.echo(f"serving on {service.config.listen_host}:{service.config.listen_port}")
    uvicorn.run(app, host=service.config.listen_host, port=service.config.listen_port)


@main.command()
@config_option
@click.option("--use-case", required=True)
def ingest(config_flag, use_case):
    """Recompute PoI stats from the configured fixtures."""
    service = _load_service(config_flag)
    try:
        snapshot = service.ingest(use_case)
    except NotFoundError as exc:
        raise click.ClickException(str(exc))
    click.echo(
        f"{use_case}: {len(snapshot['pois'])} PoIs, n_max={snapshot['n_max']}, "
        f"skipped {snapshot['skipped_records']} malformed records"
    )
    for poi in snapshot["pois"]:
        click.echo(
            f"  {poi['poi_id']}: reviews={poi['review_count']} "
            f"sentiment={poi['mean_sentiment']:.3f} importance={poi['importance']:.3f}"
        )


@main.command("refresh-gallery")
@config_option
@click.option("--use-case", required=True)
def refresh_gallery(config_flag, use_case):
    """Generate artworks for the top reviewed sites."""
    service = _load_service(config_flag)
    try:
        delta = service.refresh_gallery(use_case)
    except NotFoundError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"{use_case}: {len(delta.created)} created, {len(delta.retained)} retained")
    for art in delta.created:
        click.echo(f"  + {art.id} ({art.poi_id}, {art.generator}): {art.prompt.prompt_text}")


@main.command()
@config_option
@click.option("--use-case", required=True)
@click.option("--water-level", type=float, default=None, help="Water surface elevation in m.")
@click.option("--temp-delta", type=float, default=0.0, help="Temperature change in deg C.")
def simulate(config_flag, use_case, water_level, temp_delta):
    """Run one what-if scenario and print the result JSON."""
    service = _load_service(config_flag)
    try:
        payload = service.simulate_payload(use_case, water_level, temp_delta)
    except NotFoundError as exc:
        raise click.ClickException(str(exc))
    click.echo(dump_json(payload))


@main.command("export-mesh")
@config_option
@click.option("--use-case", required=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--exaggeration", type=float, default=1.0)
def export_mesh(config_flag, use_case, out_path, exaggeration):
    """Write the terrain mesh as Wavefront-style text (debug aid)."""
    from .terrain import mesh_from_heightmap, write_mesh_obj

    service = _load_service(config_flag)
    try:
        data = service.use_cases[use_case]
    except KeyError:
        raise click.ClickException(f"unknown use case {use_case!r}")
    mesh = mesh_from_heightmap(data.heightmap, exaggeration)
    write_mesh_obj(mesh, out_path)
    click.echo(f"{out_path}: {len(mesh.vertices)} vertices, {len(mesh.triangles)} faces")


@main.command()
@config_option
@click.option("--use-case", required=True)
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
@click.option("--water-level", type=float, default=None)
@click.option("--temp-delta", type=float, default=0.0)
def report(config_flag, use_case, out_dir, water_level, temp_delta):
    """Write the CSV stats and rendered figures for a use case."""
    from .report import render_report

    service = _load_service(config_flag)
    try:
        paths = render_report(service, use_case, out_dir, water_level, temp_delta)
    except KeyError as exc:
        raise click.ClickException(f"unknown use case {exc}")
    for path in paths:
        click.echo(str(path))


if __name__ == "__main__":
    sys.exit(main())
