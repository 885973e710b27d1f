"""Interferometric Purcell-filter synthesis, tuning and notch analysis."""

from .coupling import anticrossing_g0
from .interference import FeedlineVoltages, InterferenceReport, feedline_voltages, interference_phases
from .multiplex import ReadoutUnitSpec, multiplex_netlist
from .notch import NotchCharacterization, PurcellSpectrum, extract_notch, purcell_spectrum
from .params import (
    PORT_IN,
    PORT_OUT,
    PORT_QUBIT,
    DesignTargets,
    FilterParams,
    add_unit,
    feedline_view,
    filter_netlist,
    initial_params,
    r_optimal,
)
from .sweeps import RatioPoint, best_ratio, default_grid, notch_at_ratio, q_vs_ratio
from .tuning import (
    TunedDesign,
    build_filtered_netlist,
    design_filter,
    measure_resonance,
    retune_resonator,
    tune_coupling_for_kappa,
)

__all__ = [
    "PORT_IN", "PORT_OUT", "anticrossing_g0", "PORT_QUBIT", "DesignTargets", "FeedlineVoltages", "FilterParams",
    "InterferenceReport", "NotchCharacterization", "PurcellSpectrum", "RatioPoint", "ReadoutUnitSpec",
    "TunedDesign", "add_unit", "best_ratio", "build_filtered_netlist", "default_grid", "design_filter",
    "extract_notch", "feedline_view", "feedline_voltages", "filter_netlist", "initial_params",
    "interference_phases", "measure_resonance", "multiplex_netlist", "notch_at_ratio", "purcell_spectrum",
    "q_vs_ratio", "r_optimal", "retune_resonator", "tune_coupling_for_kappa",
]
