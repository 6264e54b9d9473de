"""CSV, DOT and JSON writers for points, clouds and boundary graphs."""
import csv
import io
from pathlib import Path
from typing import Iterable, List, Optional, Tuple, Union

from .boundary import BoundaryEdge, BoundaryGraph, SpectralRadius, reduced_system
from .errors import RenderError
from .geometry import ControlPoints
from .quadratic import QuadNum, to_real
from .schemas import ExactNumber, GraphEdgeReport, GraphEquation, GraphReport, format_decimal
from .windows import PointCloud


def _csv_text(header: List[str], rows: Iterable[Iterable]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def write_text(text: str, path: Optional[Union[str, Path]]) -> Optional[Path]:
    """Write ``text`` to ``path``; ``None`` or ``-`` means the caller prints it."""
    if path is None or str(path) == '-':
        return None
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as e:
        raise RenderError(f"Cannot write {path}: {str(e)}", {'path': str(path)})
    return path


def points_csv(points: ControlPoints, beta: QuadNum) -> str:
    """``type,m,n,approx`` with position m + n·β, in increasing order."""
    rows = []
    for x, letter in points.rows():
        m, n = x.coordinates(beta)
        rows.append((letter, m, n, format_decimal(to_real(x))))
    return _csv_text(['type', 'm', 'n', 'approx'], rows)


def cloud_csv(cloud: PointCloud) -> str:
    return _csv_text(['window', 'position'], ((letter, repr(p)) for letter, p in cloud.rows()))


def equation_terms(edges: List[BoundaryEdge]) -> List[str]:
    terms = []
    for edge in edges:
        prefix = f"{edge.multiplicity}×" if edge.multiplicity > 1 else ""
        terms.append(f"{prefix}λ*·{edge.target} + {edge.translate}")
    return terms


def _reduced(graph: BoundaryGraph, radius: Optional[SpectralRadius]) -> List[Tuple[str, List[str]]]:
    system = reduced_system(graph, radius)
    return [(node.label, equation_terms(edges)) for node, edges in system.items()]


def graph_dot(graph: BoundaryGraph, radius: Optional[SpectralRadius] = None, name: str = "boundary") -> str:
    index = graph.index()
    lines = [f'digraph "{name}" {{', '  node [shape=box];']
    for node, k in index.items():
        lines.append(f'  n{k} [label="{node.label}"];')
    for edge in graph.edges:
        label = str(edge.translate)
        if edge.multiplicity > 1:
            label += f" ×{edge.multiplicity}"
        lines.append(f'  n{index[edge.source]} -> n{index[edge.target]} [label="{label}"];')
    for node_label, terms in _reduced(graph, radius):
        lines.append(f'  // {node_label} = {" ∪ ".join(terms)}')
    lines.append('}')
    return "\n".join(lines) + "\n"


def graph_report(graph: BoundaryGraph, substitution: str,
                 radius: Optional[SpectralRadius] = None) -> GraphReport:
    return GraphReport(
        substitution=substitution,
        B=graph.bound,
        canonical=graph.canonical,
        nodes=[node.label for node in graph.nodes],
        edges=[GraphEdgeReport(source=e.source.label, target=e.target.label,
                               translate=ExactNumber.of(e.translate), multiplicity=e.multiplicity)
               for e in graph.edges],
        adjacency=graph.adjacency().tolist(),
        reduced_system=[GraphEquation(node=label, terms=terms) for label, terms in _reduced(graph, radius)],
    )


def graph_json(graph: BoundaryGraph, substitution: str, radius: Optional[SpectralRadius] = None) -> str:
    return graph_report(graph, substitution, radius).model_dump_json(indent=2) + "\n"
