from .ladder import discretize_line
from .netlist import GROUND, Element, Netlist, NetlistBuilder, Port
from .solver import (
    ACSolution,
    TwoPortParams,
    assemble,
    input_admittance,
    node_voltages,
    probe,
    s_matrix,
    s_to_y,
    solve_ac,
    solve_ac_sweep,
    two_port_params,
    y_to_s,
)
from .grid import FrequencyGrid

__all__ = [
    "GROUND", "Element", "Netlist", "NetlistBuilder", "Port", "ACSolution", "TwoPortParams",
    "FrequencyGrid", "assemble", "discretize_line", "input_admittance", "node_voltages", "probe",
    "s_matrix", "s_to_y", "solve_ac", "solve_ac_sweep", "two_port_params", "y_to_s",
]
