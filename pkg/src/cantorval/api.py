from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from loguru import logger

from .boundary import (
    BoundaryGraph,
    DimensionResult,
    SpectralRadius,
    boundary_dimension,
    build_boundary_graph,
    component_radius,
    spectral_radius,
    witness_missing,
)
from .config import CantorvalConfig
from .errors import NonIntervalWindow, NonUnimodular
from .geometry import (
    ControlPoints,
    DisplacementMatrix,
    TileLengths,
    control_points,
    cut_and_project,
    displacement_matrix,
    point_set_difference,
)
from .invertibility import classify, inverse, is_invertible, word_str
from .quadratic import PFData, QuadField, QuadNum, is_pisot_unit, make_field, pf_data
from .schemas import (
    AnalysisReport,
    ClassificationReport,
    DimensionReport,
    ExactNumber,
    HullReport,
    IntervalReport,
    SeedReport,
    WindowReport,
    format_decimal,
)
from .substitution import (
    LETTERS,
    IntMatrix2,
    SeedCycle,
    Substitution,
    is_primitive,
    is_unimodular,
    parse_substitution,
    seed_cycle,
    substitution_matrix,
)
from .windows import (
    HullBounds,
    IntervalSolution,
    PointCloud,
    WindowSystem,
    build_window_system,
    certified_hull,
    chaos_game,
    measure_ratio,
    solve_interval_fixed_point,
)

SINGLETON_TOL = 1e-9


@dataclass
class Prepared:
    """A validated substitution with its field, geometry and window system."""
    substitution: Substitution
    matrix: IntMatrix2
    field: QuadField
    pf: PFData
    lengths: TileLengths
    displacement: DisplacementMatrix
    system: WindowSystem


@dataclass
class DimensionRun:
    graph: BoundaryGraph
    radius: SpectralRadius
    result: DimensionResult
    singleton_nodes: List[str] = field(default_factory=list)


@dataclass
class PointsResult:
    points: ControlPoints
    beta: QuadNum
    # per window: (only in the model set, only in the patch), filled by the cross-check
    differences: Dict[str, Tuple[int, int]] = field(default_factory=dict)


class CantorvalAPI:
    def __init__(self, config: Optional[CantorvalConfig] = None):
        """
        Initialize the API with the analysis configuration.

        Every command goes through ``prepare`` first, so rejected inputs fail
        before any sampling or graph work starts.
        """
        self.config = config or CantorvalConfig()

    def prepare(self, text: str) -> Prepared:
        s = parse_substitution(text)
        m = substitution_matrix(s)
        if is_primitive(m) and not is_unimodular(m):
            raise NonUnimodular(f"{s} has det M = {m.det}", {'det': m.det, 'matrix': m.rows()})
        f = make_field(m)
        pf = pf_data(m)
        lengths = TileLengths(*pf.left_vec)
        T = displacement_matrix(s, lengths)
        system = build_window_system(T, f)
        logger.debug(f"Prepared {s}: trace {f.trace}, det {f.det}")
        return Prepared(s, m, f, pf, lengths, T, system)

    def hulls(self, prepared: Prepared) -> HullBounds:
        return certified_hull(prepared.system, Fraction(self.config.analysis.hull_eps))

    def solve_windows(self, prepared: Prepared, hulls: Optional[HullBounds] = None) -> IntervalSolution:
        return solve_interval_fixed_point(prepared.system, hulls or self.hulls(prepared))

    def sample(self, prepared: Prepared, samples: Optional[int] = None, seed: Optional[int] = None,
               streams: Optional[int] = None) -> PointCloud:
        sampling = self.config.sampling
        return chaos_game(
            prepared.system,
            samples if samples is not None else sampling.samples,
            seed if seed is not None else sampling.seed,
            burn_in=sampling.burn_in,
            streams=streams if streams is not None else sampling.streams,
        )

    def dimension(self, prepared: Prepared, bound: Optional[int] = None,
                  hulls: Optional[HullBounds] = None, witnesses: bool = True) -> DimensionRun:
        analysis, limits = self.config.analysis, self.config.limits
        hulls = hulls or self.hulls(prepared)
        graph, radius, result = boundary_dimension(
            prepared.system, prepared.displacement, hulls, prepared.lengths,
            B=bound if bound is not None else analysis.bound,
            tol=analysis.power_tol,
            max_nodes=limits.max_boundary_nodes,
            max_iterations=analysis.max_power_iterations,
            charpoly_max_nodes=analysis.charpoly_max_nodes,
        )
        if witnesses:
            cloud = self.sample(prepared, samples=self.config.sampling.witness_samples)
            missing = witness_missing(graph, cloud, self.config.sampling.witness_tolerance)
            result.witness_missing = [node.label for node in missing]
        singletons = [node.label for node in graph.nodes
                      if component_radius(graph, node, analysis.power_tol) <= 1 + SINGLETON_TOL]
        return DimensionRun(graph, radius, result, singletons)

    def boundary_graph(self, prepared: Prepared, bound: Optional[int] = None,
                       canonical: bool = True) -> Tuple[BoundaryGraph, SpectralRadius]:
        analysis = self.config.analysis
        graph = build_boundary_graph(prepared.system, prepared.displacement, self.hulls(prepared),
                                     prepared.lengths, bound if bound is not None else analysis.bound,
                                     canonical=canonical, max_nodes=self.config.limits.max_boundary_nodes)
        radius = spectral_radius(graph, analysis.power_tol, analysis.max_power_iterations,
                                 analysis.charpoly_max_nodes)
        return graph, radius

    def analyze(self, text: str, bound: Optional[int] = None) -> AnalysisReport:
        prepared = self.prepare(text)
        s, f = prepared.substitution, prepared.field
        seed = seed_cycle(s, max_length=self.config.limits.max_word_length)
        invertible = is_invertible(s, self.config.limits.max_nielsen_moves)
        inverse_words = None
        if invertible:
            inv_a, inv_b = inverse(s, self.config.limits.max_nielsen_moves)
            inverse_words = {'a': word_str(inv_a), 'b': word_str(inv_b)}

        hulls = self.hulls(prepared)
        solution = self.solve_windows(prepared, hulls)
        run = None
        if solution.success:
            windows = WindowReport(kind="Intervals", **{
                letter: IntervalReport(lo=ExactNumber.of(w.lo), hi=ExactNumber.of(w.hi))
                for letter, w in solution.windows.items()})
        else:
            windows = WindowReport(kind="NotIntervals", reason=solution.error)
            run = self.dimension(prepared, bound, hulls)
        if solution.success != invertible:
            logger.warning(f"Interval solution ({solution.success}) and invertibility ({invertible}) disagree")

        classification = classify(s, run.result if run else None, self.config.analysis.dim_tolerance,
                                  invertible=invertible)
        return AnalysisReport(
            substitution=str(s),
            matrix=[list(row) for row in prepared.matrix.rows()],
            primitive=True,
            unimodular=True,
            pisot_unit=is_pisot_unit(f),
            trace=f.trace,
            det=f.det,
            lam=ExactNumber.of(f.lam),
            lam_star=ExactNumber.of(f.lam_star),
            tile_lengths={letter: ExactNumber.of(prepared.lengths.of(letter)) for letter in LETTERS},
            displacement={i + j: [ExactNumber.of(t) for t in prepared.displacement[(i, j)]]
                          for i in LETTERS for j in LETTERS},
            measure_ratio=ExactNumber.of(measure_ratio(prepared.pf)),
            seed=SeedReport(left=seed.left_seed, right=seed.right_seed, period=seed.period),
            invertible=invertible,
            inverse=inverse_words,
            windows=windows,
            hulls=HullReport(
                a=[format_decimal(float(x)) for x in hulls.bounds['a']],
                b=[format_decimal(float(x)) for x in hulls.bounds['b']],
                err=format_decimal(float(hulls.err)),
            ),
            dimension=self.dimension_report(run) if run else None,
            classification=ClassificationReport(kind=classification.kind, evidence=classification.evidence),
        )

    @staticmethod
    def dimension_report(run: DimensionRun) -> DimensionReport:
        result = run.result
        return DimensionReport(
            spectral_radius=result.spectral_radius,
            radius_error=result.radius_error,
            dimension=result.dimension,
            dimension_error=result.dimension_error,
            node_count=result.node_count,
            B=result.search_bound_used,
            stable=bool(result.stable),
            spectral_radius_next=result.spectral_radius_next,
            validated=result.validated,
            witness_missing=result.witness_missing,
            singleton_nodes=run.singleton_nodes,
        )

    def patch(self, prepared: Prepared, level: int, one_sided: bool = False,
              seed: Optional[SeedCycle] = None) -> ControlPoints:
        seed = seed or seed_cycle(prepared.substitution, self.config.limits.max_word_length)
        return control_points(prepared.substitution, level, seed, prepared.lengths, one_sided,
                              max_tiles=self.config.limits.max_patch_tiles)

    def covering_patch(self, prepared: Prepared, radius: int) -> ControlPoints:
        """Smallest patch at a multiple of the seed period that covers [−radius, radius]."""
        seed = seed_cycle(prepared.substitution, self.config.limits.max_word_length)
        level = 0
        while True:
            patch = self.patch(prepared, level, seed=seed)
            lo = patch.tiles[0][0]
            last, letter = patch.tiles[-1]
            if lo <= -radius and last + prepared.lengths.of(letter) >= radius:
                return patch
            level += seed.period

    def points(self, text: str, level: Optional[int] = None, radius: Optional[int] = None,
               via_window: bool = False, one_sided: bool = False) -> PointsResult:
        prepared = self.prepare(text)
        beta = prepared.lengths.beta
        if level is not None:
            return PointsResult(self.patch(prepared, level, one_sided), beta)
        if radius is None:
            raise ValueError("Need a level or a radius")
        patch = self.covering_patch(prepared, radius).restricted(radius)
        if not via_window:
            return PointsResult(patch, beta)
        solution = self.solve_windows(prepared)
        if solution.failed:
            raise NonIntervalWindow(f"Windows of {prepared.substitution} are not intervals",
                                    {'reason': solution.error})
        model = cut_and_project(prepared.field, beta, solution.windows['a'], solution.windows['b'], radius)
        differences = point_set_difference(model, patch, radius)
        counts = {letter: (len(only_model), len(only_patch))
                  for letter, (only_model, only_patch) in differences.items()}
        logger.debug(f"Model set vs patch within {radius}: {counts}")
        return PointsResult(model, beta, counts)
