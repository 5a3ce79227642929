"""Economic cost-supply curves for global energy resources.

Builds, fits, aggregates and queries marginal-cost curves with uncertainty
envelopes for renewable flows (wind, solar, hydro, biomass, geothermal,
ocean) and stocks (oil, gas, coal, uranium, thorium), from the regional
assessment tables shipped with the package.
"""

from .calibrate import Anchor, hier_from_anchors, ident_from_anchors, stock_from_band
from .curveset import (
    CompositeCurve,
    Envelope,
    TabulatedCurve,
    aggregate,
    invert,
    sample,
    scale_envelope,
    tabulate,
    total_quantile,
)
from .distcore import (
    Distribution,
    DistributionKind,
    cost_at,
    cumulative,
    density,
    erf_inv,
)
from .errors import RescurveError
from .fitter import FitPoint, FitResult, augment, fit
from .ingest import Database, UnitTable, build_all, build_resource
from .ledger import LedgerState, consume, marginal_cost, release, remaining

__version__ = "1.0.0"

__all__ = [
    "Anchor",
    "CompositeCurve",
    "Database",
    "Distribution",
    "DistributionKind",
    "Envelope",
    "FitPoint",
    "FitResult",
    "LedgerState",
    "RescurveError",
    "TabulatedCurve",
    "UnitTable",
    "aggregate",
    "augment",
    "build_all",
    "build_resource",
    "consume",
    "cost_at",
    "cumulative",
    "density",
    "erf_inv",
    "fit",
    "hier_from_anchors",
    "ident_from_anchors",
    "invert",
    "marginal_cost",
    "release",
    "remaining",
    "sample",
    "scale_envelope",
    "stock_from_band",
    "tabulate",
    "total_quantile",
]
