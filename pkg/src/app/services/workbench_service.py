"""
Workbench service layer - runs the catalog, pinching, fuzz and chart commands
and turns their results into report documents
"""
import logging
from typing import List, Optional

import numpy as np

from app.clients.chart_file import read_chart
from app.core.config import settings
from app.core.exceptions import UnknownModel
from app.core.numeric import Precision, fmt
from app.models.chart import MetricChart
from app.models.tensors import Duality
from app.repositories import ModelRepository
from app.schemas.reports import (
    CheckRecord,
    FuzzSummary,
    IdentityReport,
    PinchReport,
    ReportDocument,
)
from app.schemas.run import Command, DualitySelector, ModelInfo, RunConfig
from app.services import chart_geometry, pinching
from app.services.curv_algebra import block_inner, block_norms, kn_square_block, spectrum3
from app.services.soliton_service import SolitonCatalogService

logger = logging.getLogger(__name__)


def identity_check(report: IdentityReport) -> CheckRecord:
    return CheckRecord(
        id=report.identity_id.value,
        lhs=report.max_residual,
        rhs=0.0,
        margin=report.tolerance - report.max_residual,
        tolerance=report.tolerance,
        passed=report.passed,
        detail=report.note or report.residual_text,
    )


def pinch_check(report: PinchReport) -> CheckRecord:
    detail = [f"margin={report.margin_text}"] if report.margin_text else []
    if report.equality_diagnosis:
        detail.append(report.equality_diagnosis)
    return CheckRecord(
        id=report.condition_id.value,
        lhs=report.lhs,
        rhs=report.rhs,
        margin=report.margin,
        tolerance=report.tolerance,
        passed=report.satisfied,
        detail=" ".join(detail),
    )


class WorkbenchService:
    """Command orchestration shared by the CLI and the HTTP API"""

    def __init__(self, repository: ModelRepository):
        self.catalog = SolitonCatalogService(repository)

    def list_models(self) -> List[ModelInfo]:
        return [
            ModelInfo(
                name=model.name.value,
                title=model.title,
                normalization=model.normalization,
                potential=model.potential_formula,
                scalar_curvature=fmt(model.scalar_curvature),
                compact=model.compact,
                coordinates=list(model.coordinates),
            )
            for model in self.catalog.list_models()
        ]

    def verify_model(
        self, name: str, precision: Precision = Precision.FLOATING, count: int = 100, seed: int = 0
    ) -> List[IdentityReport]:
        return self.catalog.verify_model(name, precision, count, seed)

    def model_summary(self, name: str, precision: Precision) -> dict:
        """Decomposition data at the model's base point, in stable text form"""
        d = self.catalog.decompose(name, precision=precision)
        norms = block_norms(d)
        summary = {
            "scalar": fmt(d.scalar),
            "ricci_diagonal": [fmt(v) for v in d.ricci.entries.diagonal()],
            "traceless_ricci_norm_sq": fmt(norms.traceless_ricci_norm_sq),
        }
        for duality in Duality:
            weyl = d.weyl(duality)
            kn = kn_square_block(d.traceless_ricci, duality, d.orientation)
            summary[f"weyl_{duality.short}_spectrum"] = [fmt(w) for w in spectrum3(weyl).as_tuple()]
            summary[f"weyl_{duality.short}_norm_sq"] = fmt(norms.weyl_norm_sq(duality))
            summary[f"kn_weyl_inner_{duality.short}"] = fmt(block_inner(kn, weyl))
        return summary

    def classify_model(
        self,
        name: str,
        gamma: Optional[float] = None,
        duality: DualitySelector | str = DualitySelector.BOTH,
        precision: Precision = Precision.FLOATING,
    ) -> List[PinchReport]:
        model = self.catalog.get_model(name)
        d = self.catalog.decompose(name, precision=precision)
        return pinching.classify(d, gamma, DualitySelector(duality).value, compact=model.compact)

    def classify_chart(
        self,
        chart: MetricChart,
        gamma: Optional[float] = None,
        duality: DualitySelector | str = DualitySelector.BOTH,
    ) -> List[PinchReport]:
        """Worst-margin report per condition over the chart interior"""
        curvature = chart_geometry.curvature_from_chart(chart)
        worst: dict = {}
        for index in np.argwhere(chart.interior_mask()):
            d = curvature.decomposition_at(tuple(index))
            for report in pinching.classify(d, gamma, DualitySelector(duality).value):
                current = worst.get(report.condition_id)
                if current is None or report.margin < current.margin:
                    worst[report.condition_id] = report
        return list(worst.values())

    def fuzz(self, trials: int, seed: int) -> FuzzSummary:
        return pinching.fuzz_inequalities(trials, seed)

    def chart_report(self, chart: MetricChart) -> tuple[List[CheckRecord], dict]:
        curvature = chart_geometry.curvature_from_chart(chart)
        interior = chart.interior_mask()
        summary = {
            "shape": list(chart.shape),
            "interior_nodes": int(np.count_nonzero(interior)),
            "symmetry_defect": curvature.symmetry_residual,
            "scalar_min": float(curvature.scalar[interior].min()),
            "scalar_max": float(curvature.scalar[interior].max()),
            "operator_norm_max": float(curvature.operator_norm[interior].max()),
            "cotton_norm_max": float(chart_geometry.cotton_norm(chart, curvature)[interior].max()),
        }
        checks: List[CheckRecord] = []
        if chart.has_potential:
            fit = chart_geometry.fit_growth(chart, curvature)
            prop41 = chart_geometry.check_prop41(chart, curvature)
            summary["growth"] = fit.model_dump()
            summary["prop41"] = prop41.model_dump()
            checks.append(
                CheckRecord(
                    id="growth_feasible",
                    lhs=fit.epsilon_hat,
                    rhs=1.0,
                    margin=1.0 - fit.epsilon_hat,
                    tolerance=settings.TOL_ABS,
                    passed=fit.feasible,
                    detail=f"A_hat={fit.a_hat!r}",
                )
            )
        else:
            logger.warning("chart has no potential; growth fit and prop41 skipped")
        return checks, summary

    def run(self, config: RunConfig) -> ReportDocument:
        """Execute one command and collect its checks"""
        document = ReportDocument(
            command=config.command.value, target=config.target, precision=config.precision.value
        )
        if config.command is Command.CATALOG:
            document.summary["models"] = [entry.model_dump() for entry in self.list_models()]
        elif config.command is Command.VERIFY:
            reports = self.verify_model(config.target, config.precision, config.points, config.seed or 0)
            document.checks = [identity_check(report) for report in reports]
            document.summary = self.model_summary(config.target, config.precision)
            model = self.catalog.get_model(config.target)
            if not model.compact:
                asymptotics = self.catalog.potential_asymptotics(config.target)
                document.checks.append(
                    CheckRecord(
                        id="potential_asymptotics",
                        lhs=asymptotics.c_found if asymptotics.c_found is not None else asymptotics.c_grid_max,
                        rhs=asymptotics.c_grid_max,
                        margin=asymptotics.c_grid_max - (asymptotics.c_found or asymptotics.c_grid_max),
                        tolerance=0.0,
                        passed=asymptotics.holds,
                    )
                )
        elif config.command is Command.CLASSIFY:
            reports = self._classify_target(config)
            document.checks = [pinch_check(report) for report in reports]
            document.summary["reports"] = [report.model_dump(mode="json") for report in reports]
        elif config.command is Command.FUZZ:
            summary = self.fuzz(config.trials, config.seed)
            document.checks = [
                CheckRecord(
                    id="fuzz_violations",
                    lhs=float(summary.violations),
                    rhs=0.0,
                    margin=summary.worst_margin,
                    tolerance=summary.tolerance,
                    passed=summary.violations == 0,
                )
            ]
            document.summary = summary.model_dump()
        elif config.command is Command.CHART:
            document.checks, document.summary = self.chart_report(read_chart(config.target))
        logger.debug("%s finished with %d checks", config.command.value, len(document.checks))
        return document

    def _classify_target(self, config: RunConfig) -> List[PinchReport]:
        try:
            return self.classify_model(config.target, config.gamma, config.duality, config.precision)
        except UnknownModel:
            if not config.target.endswith(".chart") and "/" not in config.target:
                raise
        return self.classify_chart(read_chart(config.target), config.gamma, config.duality)
