from colorgame.analysis.formulas import Constants, RateValues, constants, num_colors, rate_functions, theory_anchors
from colorgame.analysis.monitors import MonitorReport, trace_monitors
from colorgame.analysis.estimate import estimate_chi_g, greedy_chromatic, wilson_interval

__all__ = [
    "Constants", "RateValues", "constants", "num_colors", "rate_functions", "theory_anchors",
    "MonitorReport", "trace_monitors", "estimate_chi_g", "greedy_chromatic", "wilson_interval",
]
