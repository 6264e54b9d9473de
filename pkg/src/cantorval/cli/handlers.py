import json
from typing import Callable, Optional

import typer
from loguru import logger
from rich.console import Console
from rich.table import Table

from ..api import CantorvalAPI
from ..config import CantorvalConfig, setup_logging
from ..errors import EXIT_INTERNAL, EXIT_OK, CantorvalError
from ..exports import cloud_csv, graph_dot, graph_json, points_csv, write_text
from ..render import render
from ..schemas import ErrorReport, report_schema
from .options import GlobalOptions


def emit_error(error: CantorvalError) -> int:
    """Print the machine-readable error document on stdout and return its exit code."""
    typer.echo(ErrorReport(**error.to_dict()).model_dump_json(indent=2))
    return error.exit_code


class CommandHandlers:
    def __init__(self, options: GlobalOptions = None):
        self.options = options or GlobalOptions()
        self.console = Console(stderr=True)
        self.config = CantorvalConfig(self.options.config)
        setup_logging(self.config.logging, debug=self.options.debug, quiet=self.options.quiet)
        self.api = CantorvalAPI(self.config)

    @property
    def quiet(self) -> bool:
        return self.options.quiet

    def run(self, action: Callable[[], None]) -> int:
        """Run a command body, mapping failures to exit codes."""
        try:
            action()
            return EXIT_OK
        except CantorvalError as e:
            logger.debug(f"{e.code}: {e.message}")
            return emit_error(e)
        except Exception as e:
            logger.exception(f"Unexpected failure: {str(e)}")
            typer.echo(ErrorReport(error="INTERNAL_ERROR", message=str(e)).model_dump_json(indent=2))
            return EXIT_INTERNAL

    def output(self, text: str, out: Optional[str]) -> None:
        path = write_text(text, out)
        if path is None:
            typer.echo(text, nl=False)
        elif not self.quiet:
            self.console.print(f"[green]Wrote {path}[/]")

    def handle_analyze(self, substitution: str, out: Optional[str] = None, bound: Optional[int] = None,
                       table: bool = False) -> int:
        def action():
            report = self.api.analyze(substitution, bound)
            self.output(report.model_dump_json(indent=2) + "\n", out)
            if table:
                self.show_summary(report)
        return self.run(action)

    def show_summary(self, report) -> None:
        table = Table(title=f"Analysis of {report.substitution}")
        table.add_column("Property", style="cyan")
        table.add_column("Value", style="green")
        table.add_row("matrix", str(report.matrix))
        table.add_row("λ", report.lam.decimal)
        table.add_row("λ*", report.lam_star.decimal)
        table.add_row("invertible", str(report.invertible))
        if report.inverse:
            table.add_row("inverse", f"a ↦ {report.inverse['a']}, b ↦ {report.inverse['b']}")
        table.add_row("windows", report.windows.kind)
        if report.dimension:
            table.add_row("spectral radius", f"{report.dimension.spectral_radius:.10g}")
            table.add_row("boundary dimension", f"{report.dimension.dimension:.10g}")
            table.add_row("B-stable", str(report.dimension.stable))
        table.add_row("classification", report.classification.kind)
        self.console.print(table)

    def handle_render(self, substitution: str, out: str, samples: Optional[int] = None, seed: Optional[int] = None,
                      width: int = 800, height: int = 200, streams: Optional[int] = None,
                      cloud_out: Optional[str] = None) -> int:
        def action():
            prepared = self.api.prepare(substitution)
            cloud = self.api.sample(prepared, samples=samples, seed=seed, streams=streams)
            path = render(cloud, out, width, height)
            if cloud_out:
                write_text(cloud_csv(cloud), cloud_out)
            if not self.quiet:
                self.console.print(f"[green]Rendered {len(cloud)} samples of {prepared.substitution} to {path}[/]")
        return self.run(action)

    def handle_dimension(self, substitution: str, bound: Optional[int] = None,
                         export_graph: Optional[str] = None, out: Optional[str] = None) -> int:
        def action():
            prepared = self.api.prepare(substitution)
            run = self.api.dimension(prepared, bound)
            report = self.api.dimension_report(run)
            self.output(report.model_dump_json(indent=2) + "\n", out)
            if export_graph:
                self.write_graph(run.graph, run.radius, str(prepared.substitution), export_graph)
        return self.run(action)

    def write_graph(self, graph, radius, substitution: str, path: str, fmt: Optional[str] = None) -> None:
        fmt = fmt or ('json' if path.endswith('.json') else 'dot')
        text = graph_json(graph, substitution, radius) if fmt == 'json' else graph_dot(graph, radius)
        self.output(text, path)

    def handle_export_graph(self, substitution: str, bound: Optional[int] = None, fmt: str = 'dot',
                            out: Optional[str] = None, raw: bool = False) -> int:
        def action():
            prepared = self.api.prepare(substitution)
            graph, radius = self.api.boundary_graph(prepared, bound, canonical=not raw)
            text = graph_json(graph, str(prepared.substitution), radius) if fmt == 'json' \
                else graph_dot(graph, radius)
            self.output(text, out)
        return self.run(action)

    def handle_points(self, substitution: str, level: Optional[int] = None, radius: Optional[int] = None,
                      via_window: bool = False, one_sided: bool = False, out: Optional[str] = None) -> int:
        def action():
            result = self.api.points(substitution, level, radius, via_window, one_sided)
            self.output(points_csv(result.points, result.beta), out)
            if result.differences and not self.quiet:
                table = Table(title=f"Model set vs patch within |x| ≤ {radius}")
                table.add_column("Window", style="cyan")
                table.add_column("Only in model set", style="green")
                table.add_column("Only in patch", style="green")
                for letter, (only_model, only_patch) in result.differences.items():
                    table.add_row(letter, str(only_model), str(only_patch))
                self.console.print(table)
        return self.run(action)

    def handle_schema(self, out: Optional[str] = None) -> int:
        def action():
            self.output(json.dumps(report_schema(), indent=2, sort_keys=True) + "\n", out)
        return self.run(action)
