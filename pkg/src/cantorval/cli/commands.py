import typer
from typing import Optional
from .handlers import CommandHandlers, emit_error
from .options import GlobalOptions
from ..errors import CantorvalError

app = typer.Typer(
    name="cantorval",
    help="Cantorval - window and boundary analysis of binary Pisot substitutions",
    add_completion=True,
)

# Initialize global options
app.global_options = GlobalOptions()

# Get all global options
global_options = GlobalOptions.get_options()

SUBSTITUTION_HELP = "Substitution as '(ab,a)' or 'a->ab; b->a'"

# Command options
output_options = {
    "out": typer.Option(None, "--out", "-o", help="Write to this file instead of stdout"),
}

sampling_options = {
    "samples": typer.Option(None, "--samples", "-n", min=1, help="Chaos-game steps per stream (default 10000)"),
    "seed": typer.Option(None, "--seed", "-s", help="Random seed (default from config)"),
    "streams": typer.Option(None, "--streams", min=1, help="Independent chaos-game streams"),
    "width": typer.Option(800, "--width", min=1, help="Image width in pixels"),
    "height": typer.Option(200, "--height", min=1, help="Image height in pixels"),
    "cloud": typer.Option(None, "--cloud", help="Also write the samples as window,position CSV"),
}

graph_options = {
    "bound": typer.Option(None, "--bound", "-B", min=0, help="Coefficient bound for seeding nodes (default 3)"),
    "export_graph": typer.Option(None, "--export-graph", help="Write the boundary graph (.dot or .json)"),
    "format": typer.Option("dot", "--format", "-f", help="Graph format: dot or json"),
    "raw": typer.Option(False, "--raw", help="Do not identify nodes under the symmetry"),
}

points_options = {
    "level": typer.Option(None, "--level", "-l", min=0, help="Substitution level of the patch"),
    "radius": typer.Option(None, "--radius", "-r", min=1, help="Points with |x| <= radius"),
    "via_window": typer.Option(False, "--via-window", help="Cut-and-project from the exact windows"),
    "one_sided": typer.Option(False, "--one-sided", help="Grow the patch to the right of 0 only"),
}

@app.callback()
def main(
    config: Optional[str] = global_options["config"],
    quiet: bool = global_options["quiet"],
    debug: bool = global_options["debug"],
):
    """
    Cantorval - window and boundary analysis of binary Pisot substitutions
    """
    # Update global options with provided values
    app.global_options.update(
        config=config,
        quiet=quiet,
        debug=debug
    )

def get_handlers() -> CommandHandlers:
    """Get command handlers with current global options"""
    try:
        return CommandHandlers(app.global_options)
    except CantorvalError as e:
        raise typer.Exit(emit_error(e))

def finish(code: int) -> None:
    if code:
        raise typer.Exit(code)

@app.command("analyze")
def analyze_command(
    substitution: str = typer.Argument(..., help=SUBSTITUTION_HELP),
    bound: Optional[int] = graph_options["bound"],
    out: Optional[str] = output_options["out"],
    table: bool = typer.Option(False, "--table", help="Also print a summary table on stderr"),
):
    """Run the full pipeline and print the JSON analysis report"""
    handlers = get_handlers()
    finish(handlers.handle_analyze(substitution, out, bound, table))

@app.command("render")
def render_command(
    substitution: str = typer.Argument(..., help=SUBSTITUTION_HELP),
    out: str = typer.Option("windows.ppm", "--out", "-o", help="Image path; .svg writes SVG, anything else PPM"),
    samples: Optional[int] = sampling_options["samples"],
    seed: Optional[int] = sampling_options["seed"],
    streams: Optional[int] = sampling_options["streams"],
    width: int = sampling_options["width"],
    height: int = sampling_options["height"],
    cloud: Optional[str] = sampling_options["cloud"],
):
    """Sample the windows by the chaos game and draw them, W_a above W_b"""
    handlers = get_handlers()
    finish(handlers.handle_render(substitution, out, samples, seed, width, height, streams, cloud))

@app.command("dimension")
def dimension_command(
    substitution: str = typer.Argument(..., help=SUBSTITUTION_HELP),
    bound: Optional[int] = graph_options["bound"],
    export_graph: Optional[str] = graph_options["export_graph"],
    out: Optional[str] = output_options["out"],
):
    """Hausdorff dimension of the window boundary, with the B/B+1 stability check"""
    handlers = get_handlers()
    finish(handlers.handle_dimension(substitution, bound, export_graph, out))

@app.command("points")
def points_command(
    substitution: str = typer.Argument(..., help=SUBSTITUTION_HELP),
    level: Optional[int] = points_options["level"],
    radius: Optional[int] = points_options["radius"],
    via_window: bool = points_options["via_window"],
    one_sided: bool = points_options["one_sided"],
    out: Optional[str] = output_options["out"],
):
    """Control points as type,m,n,approx CSV, with x = m + n·β"""
    if (level is None) == (radius is None):
        typer.echo("Error: Give exactly one of --level and --radius.", err=True)
        raise typer.Exit(2)
    if via_window and radius is None:
        typer.echo("Error: --via-window needs --radius.", err=True)
        raise typer.Exit(2)
    handlers = get_handlers()
    finish(handlers.handle_points(substitution, level, radius, via_window, one_sided, out))

@app.command("export-graph")
def export_graph_command(
    substitution: str = typer.Argument(..., help=SUBSTITUTION_HELP),
    bound: Optional[int] = graph_options["bound"],
    format: str = graph_options["format"],
    raw: bool = graph_options["raw"],
    out: Optional[str] = output_options["out"],
):
    """Boundary graph as DOT or JSON, with the reduced system of its main component"""
    if format not in ('dot', 'json'):
        typer.echo(f"Error: Unknown graph format '{format}'. Use dot or json.", err=True)
        raise typer.Exit(2)
    handlers = get_handlers()
    finish(handlers.handle_export_graph(substitution, bound, format, out, raw))

@app.command("schema")
def schema_command(
    out: Optional[str] = output_options["out"],
):
    """Print the JSON schema of the analysis report"""
    handlers = get_handlers()
    finish(handlers.handle_schema(out))
