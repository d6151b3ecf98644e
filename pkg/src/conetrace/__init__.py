"""Geodesic simulation on closed Euclidean surfaces with cone angles above 2*pi."""

__version__ = "0.1.0"

from .errors import ConetraceError
from .geom import PlaneIsometry
from .surface import (
    BUILTIN_NAMES,
    ConeSurface,
    SurfacePoint,
    ValidationReport,
    builtin,
    gb_residual,
    min_cone_separation,
    parse_surface,
    serialize,
    validate,
)
from .tracer import (
    ConeHit,
    EdgeCross,
    GeodesicPath,
    Segment,
    TangentState,
    TraceOptions,
    compare_paths,
    cone_scatter,
    develop,
    holonomy,
    itinerary,
    min_cone_distance_profile,
    point_at,
    reverse,
    state_at,
    time_shift,
    trace,
    word_holonomy,
)
from .metric import (
    BusemannEstimate,
    busemann,
    convergence_profile,
    equidistant_reparam,
    local_distance,
    shortest_saddle_connection,
)
from .closed import (
    ClosedGeodesic,
    Crossing,
    FlatCylinder,
    Loop,
    Passage,
    certificate_text,
    cyclic_reduce,
    find_unique_closed,
    flat_cylinder,
    is_unique_in_class,
    loop_length,
    shorten,
    verify_stationarity,
)
from .dynamics import (
    MixingReport,
    PhaseCell,
    cone_approach_experiment,
    hit_times,
    sample_cell,
    transitivity_scan,
)

__all__ = [
    "__version__",
    "ConetraceError",
    "PlaneIsometry",
    "BUILTIN_NAMES",
    "ConeSurface",
    "SurfacePoint",
    "ValidationReport",
    "builtin",
    "gb_residual",
    "min_cone_separation",
    "parse_surface",
    "serialize",
    "validate",
    "ConeHit",
    "EdgeCross",
    "GeodesicPath",
    "Segment",
    "TangentState",
    "TraceOptions",
    "compare_paths",
    "cone_scatter",
    "develop",
    "holonomy",
    "itinerary",
    "min_cone_distance_profile",
    "point_at",
    "reverse",
    "state_at",
    "time_shift",
    "trace",
    "word_holonomy",
    "BusemannEstimate",
    "busemann",
    "convergence_profile",
    "equidistant_reparam",
    "local_distance",
    "shortest_saddle_connection",
    "ClosedGeodesic",
    "Crossing",
    "FlatCylinder",
    "Loop",
    "Passage",
    "certificate_text",
    "cyclic_reduce",
    "find_unique_closed",
    "flat_cylinder",
    "is_unique_in_class",
    "loop_length",
    "shorten",
    "verify_stationarity",
    "MixingReport",
    "PhaseCell",
    "cone_approach_experiment",
    "hit_times",
    "sample_cell",
    "transitivity_scan",
]
