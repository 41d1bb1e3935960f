"""Error measures, LP probes and benchmark statistics."""
from .error import (avg_width_empirical, avg_width_theoretical, max_error_empirical,
                    max_error_theoretical, projected_bounds, univariate_error_sides,
                    univariate_nmdt_theory)
from .lp_probes import (FixedPointProbe, SharpnessReport, WitnessReport, avg_width_lp, hull_lower,
                        lp_volume_univariate, sawtooth_lp_gap, sharpness_probe, univariate_witness)
from .report import ErrorReport, error_report
from .stats import ProfileTable, breakpoint_objective, performance_profile, shifted_geomean

__all__ = [
    "avg_width_empirical", "avg_width_theoretical", "max_error_empirical", "max_error_theoretical",
    "projected_bounds", "univariate_error_sides", "univariate_nmdt_theory",
    "FixedPointProbe", "SharpnessReport", "WitnessReport", "avg_width_lp", "hull_lower",
    "lp_volume_univariate", "sawtooth_lp_gap", "sharpness_probe", "univariate_witness",
    "ErrorReport", "error_report",
    "ProfileTable", "breakpoint_objective", "performance_profile", "shifted_geomean",
]
