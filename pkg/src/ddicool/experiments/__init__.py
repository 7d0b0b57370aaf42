"""Scenario files, parameter sweeps and record output."""

from .runner import (
    HEXAGON_SUBSETS,
    detuning_grid,
    evaluate_point,
    match_ratios,
    run_detuning_diagram,
    run_hexagon_suite,
    run_isosceles_sweep,
    run_magic_atlas,
    run_scenario,
    run_spacing_sweep,
    single_reference,
)
from .scenario import (
    GeometrySpec,
    Scenario,
    ScenarioError,
    SweepRecord,
    SweepSpec,
    dump_scenario,
    load_scenario,
    parse_scenario,
    read_records,
    write_records,
)
