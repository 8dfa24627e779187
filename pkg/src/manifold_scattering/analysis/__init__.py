"""Group actions, experiment runners, chart constants and the CZ decomposition."""
from .actions import (
    DIFFEOMORPHISM, ISOMETRY, PointMap, apply_action, bandlimit_project, identity_map,
    is_bandlimited, reflection, rotation, sine_diffeomorphism, torus_swap, torus_translation,
)
from .calderon_zygmund import (
    CERTIFIED_CONSTANT, BadPart, CZDecomposition, ball_measure, cz_decompose,
    doubling_ratios, selected_arcs,
)
from .charts import Chart, ChartAtlas, build_atlas, chart_constants_circle, default_delta
from .experiments import (
    StabilityCurve, boundedness_ratio, empirical_constant, frame_identity_error,
    isometry_invariance_report, loglog_slope, nonexpansive_ratio, stability_curve,
    vector_norm_constant, weak_11_constant, weak_11_ratio,
)
from .families import bandlimited_family, bump, cz_instance, random_bandlimited, spiky_family
from .reports import dumps, experiment_report, to_jsonable
