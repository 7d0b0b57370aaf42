"""Scenario files (YAML) and delimited record output.

Scenario schema, all keys optional::

    geometry:
      kind: single | line | triangle | isosceles | hexagon
      atoms: 2            # line only
      phi: 1.0471975512   # isosceles apex angle (rad)
      vertices: [0, 2, 4] # hexagon spectator vertices
    spacing: magic        # side/spacing in wavelengths, or "magic"
    theta: 1.5707963268   # dipole angle from the x axis, tilted in x-z (rad)
    gamma: 0.1            # Gamma / nu
    delta: -1.0           # Delta / nu
    eta_omega: 0.04       # eta*Omega / nu on the target atom
    n_cut: 1
    sweep:                # one mapping, or a list of two for 2-D grids
      variable: spacing   # spacing | phi | theta | delta | eta_omega | gamma
      start: 0.05
      stop: 1.0
      points: 191
    output: records.csv
    method: auto          # auto | svd | trace
    jobs: 1
"""

from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field, replace
from typing import Any

import numpy as np
import yaml

from ..geometry import (
    AtomConfiguration,
    build_hexagon_config,
    build_isosceles,
    build_line,
    build_single,
    dipole_at_angle,
    magic_spacing,
)
from ..liouvillian import DEFAULT_DELTA, DEFAULT_ETA_OMEGA, DEFAULT_GAMMA

__all__ = [
    "ScenarioError",
    "GeometrySpec",
    "SweepSpec",
    "Scenario",
    "parse_scenario",
    "load_scenario",
    "dump_scenario",
    "SweepRecord",
    "write_records",
    "render_records",
    "read_records",
    "format_number",
]

GEOMETRY_KINDS = ("single", "line", "triangle", "isosceles", "hexagon")
SWEEP_VARIABLES = ("spacing", "phi", "theta", "delta", "eta_omega", "gamma")
METHODS = ("auto", "svd", "trace")

_TOP_KEYS = {
    "geometry", "spacing", "theta", "gamma", "delta", "eta_omega", "n_cut",
    "sweep", "output", "method", "jobs",
}
_GEOMETRY_KEYS = {"kind", "atoms", "phi", "vertices"}
_SWEEP_KEYS = {"variable", "start", "stop", "points"}


class ScenarioError(ValueError):
    """Schema violation in a scenario file; carries key path and line."""

    def __init__(self, message: str, path: str = "", line: int | None = None):
        self.path = path
        self.line = line
        where = path or "<root>"
        if line is not None:
            where += f" (line {line})"
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class GeometrySpec:
    kind: str = "single"
    atoms: int = 2
    phi: float = math.pi / 3
    vertices: tuple[int, ...] = (0, 2, 4)

    def build(self, spacing: float | str, theta: float = math.pi / 2) -> AtomConfiguration:
        s = magic_spacing() if spacing == "magic" else float(spacing)
        dip = dipole_at_angle(theta)
        if self.kind == "single":
            return build_single(dip)
        if self.kind == "line":
            return build_line(self.atoms, s, dip)
        if self.kind == "triangle":
            return build_isosceles(s, math.pi / 3, dip)
        if self.kind == "isosceles":
            return build_isosceles(s, self.phi, dip)
        if self.kind == "hexagon":
            return build_hexagon_config(self.vertices, s, dip)
        raise ValueError(f"unknown geometry kind {self.kind!r}")


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    points: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class Scenario:
    geometry: GeometrySpec = field(default_factory=GeometrySpec)
    spacing: float | str = "magic"
    theta: float = math.pi / 2
    gamma: float = DEFAULT_GAMMA
    delta: float = DEFAULT_DELTA
    eta_omega: float = DEFAULT_ETA_OMEGA
    n_cut: int = 1
    sweep: tuple[SweepSpec, ...] = ()
    output: str | None = None
    method: str = "auto"
    jobs: int = 1

    def with_overrides(self, **changes) -> "Scenario":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


# -- parsing -----------------------------------------------------------------

def _line(node: yaml.Node | None) -> int | None:
    return None if node is None else node.start_mark.line + 1


def _mapping_items(node: yaml.Node, path: str) -> dict[str, tuple[yaml.Node, yaml.Node]]:
    if not isinstance(node, yaml.MappingNode):
        raise ScenarioError("expected a mapping", path, _line(node))
    out = {}
    for key_node, value_node in node.value:
        key = key_node.value
        out[key] = (key_node, value_node)
    return out


def _check_keys(items, allowed: set[str], prefix: str) -> None:
    for key, (key_node, _) in items.items():
        if key not in allowed:
            raise ScenarioError(f"unknown key {key!r}", f"{prefix}{key}", _line(key_node))


def _value(value_node: yaml.Node, path: str, kind: str) -> Any:
    data = yaml.safe_load(yaml.serialize(value_node))
    bad = ScenarioError(f"expected {kind}, got {data!r}", path, _line(value_node))
    if kind == "number":
        if isinstance(data, bool) or not isinstance(data, (int, float)):
            raise bad
        return float(data)
    if kind == "integer":
        if isinstance(data, bool) or not isinstance(data, int):
            raise bad
        return data
    if kind == "string":
        if not isinstance(data, str):
            raise bad
        return data
    if kind == "spacing":
        if data == "magic":
            return data
        if isinstance(data, bool) or not isinstance(data, (int, float)) or data <= 0:
            raise ScenarioError(f"expected positive number or 'magic', got {data!r}", path, _line(value_node))
        return float(data)
    if kind == "int-list":
        if not isinstance(data, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in data):
            raise bad
        return tuple(data)
    raise AssertionError(kind)


def _parse_sweep(node, path) -> SweepSpec:
    items = _mapping_items(node, path)
    _check_keys(items, _SWEEP_KEYS, path + ".")
    for required in ("variable", "start", "stop", "points"):
        if required not in items:
            raise ScenarioError(f"missing key {required!r}", path, _line(node))
    var = _value(items["variable"][1], path + ".variable", "string")
    if var not in SWEEP_VARIABLES:
        raise ScenarioError(f"unknown sweep variable {var!r}", path + ".variable", _line(items["variable"][1]))
    points = _value(items["points"][1], path + ".points", "integer")
    if points < 1:
        raise ScenarioError("points must be >= 1", path + ".points", _line(items["points"][1]))
    return SweepSpec(
        var,
        _value(items["start"][1], path + ".start", "number"),
        _value(items["stop"][1], path + ".stop", "number"),
        points,
    )


def parse_scenario(text: str) -> Scenario:
    """Parse and validate scenario YAML text."""
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ScenarioError(f"malformed YAML: {exc}", "", None if mark is None else mark.line + 1) from None
    if root is None:
        return Scenario()
    items = _mapping_items(root, "")
    _check_keys(items, _TOP_KEYS, "")
    kw: dict[str, Any] = {}

    if "geometry" in items:
        gnode = items["geometry"][1]
        if isinstance(gnode, yaml.ScalarNode):
            gkw = {"kind": _value(gnode, "geometry", "string")}
            kind_node = gnode
        else:
            gitems = _mapping_items(gnode, "geometry")
            _check_keys(gitems, _GEOMETRY_KEYS, "geometry.")
            gkw = {}
            kind_node = gitems.get("kind", (None, gnode))[1]
            if "kind" in gitems:
                gkw["kind"] = _value(gitems["kind"][1], "geometry.kind", "string")
            if "atoms" in gitems:
                gkw["atoms"] = _value(gitems["atoms"][1], "geometry.atoms", "integer")
            if "phi" in gitems:
                gkw["phi"] = _value(gitems["phi"][1], "geometry.phi", "number")
            if "vertices" in gitems:
                gkw["vertices"] = _value(gitems["vertices"][1], "geometry.vertices", "int-list")
        if gkw.get("kind", "single") not in GEOMETRY_KINDS:
            raise ScenarioError(f"unknown geometry kind {gkw['kind']!r}", "geometry.kind", _line(kind_node))
        kw["geometry"] = GeometrySpec(**gkw)

    simple = {
        "spacing": "spacing", "theta": "number", "gamma": "number", "delta": "number",
        "eta_omega": "number", "n_cut": "integer", "output": "string", "method": "string",
        "jobs": "integer",
    }
    for key, kind in simple.items():
        if key in items:
            kw[key] = _value(items[key][1], key, kind)
    if kw.get("method", "auto") not in METHODS:
        raise ScenarioError(f"unknown method {kw['method']!r}", "method", _line(items["method"][1]))
    if "gamma" in kw and kw["gamma"] <= 0:
        raise ScenarioError("gamma must be positive", "gamma", _line(items["gamma"][1]))
    if "n_cut" in kw and kw["n_cut"] < 1:
        raise ScenarioError("n_cut must be >= 1", "n_cut", _line(items["n_cut"][1]))

    if "sweep" in items:
        snode = items["sweep"][1]
        if isinstance(snode, yaml.SequenceNode):
            if not 1 <= len(snode.value) <= 2:
                raise ScenarioError("sweep list must hold one or two entries", "sweep", _line(snode))
            kw["sweep"] = tuple(_parse_sweep(n, f"sweep[{i}]") for i, n in enumerate(snode.value))
        else:
            kw["sweep"] = (_parse_sweep(snode, "sweep"),)
    return Scenario(**kw)


def load_scenario(path: str | os.PathLike) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def dump_scenario(scenario: Scenario) -> str:
    """Serialize to YAML that parses back to an equal scenario."""
    data = asdict(scenario)
    data["geometry"]["vertices"] = list(scenario.geometry.vertices)
    data["sweep"] = [asdict(s) for s in scenario.sweep]
    if not data["sweep"]:
        del data["sweep"]
    if data["output"] is None:
        del data["output"]
    return yaml.safe_dump(data, sort_keys=False)


# -- records -----------------------------------------------------------------

RECORD_COLUMNS = ("sweep_value", "n_multi", "n_single", "ratio", "g12", "gamma12", "residual", "error")


def format_number(x) -> str:
    if isinstance(x, str):
        return x
    if x is None:
        return ""
    return format(float(x), ".12g")


@dataclass
class SweepRecord:
    """Rows of a sweep in sweep order.

    ``columns`` always contains the standard columns; 2-D sweeps and the
    magic-spacing atlas insert extra columns after ``sweep_value``.
    """

    name: str
    variable: str
    rows: list[dict] = field(default_factory=list)
    extra_columns: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def columns(self) -> tuple[str, ...]:
        return RECORD_COLUMNS[:1] + self.extra_columns + RECORD_COLUMNS[1:]

    def column(self, name: str) -> np.ndarray:
        return np.array([np.nan if r.get(name) is None else r[name] for r in self.rows], dtype=float)


def render_records(record: SweepRecord) -> str:
    buf = io.StringIO()
    buf.write(f"# {record.name}\n")
    buf.write(f"# sweep_value: {record.variable}\n")
    buf.write("# units: energies and rates in trap frequency nu, lengths in transition wavelength,\n")
    buf.write("#   angles in rad; n_* are target phonon occupations; ratio = n_multi / n_single;\n")
    buf.write("#   g12, gamma12 couple the target to the first spectator; error is empty when clean\n")
    for note in record.notes:
        buf.write(f"# {note}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(record.columns)
    for row in record.rows:
        writer.writerow([format_number(row.get(c, "")) for c in record.columns])
    return buf.getvalue()


def write_records(record: SweepRecord, path: str | os.PathLike) -> None:
    """Write ``record`` as CSV; the target file is replaced atomically."""
    text = render_records(record)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".records-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_records(path: str | os.PathLike) -> list[dict]:
    """Load a record file back as a list of dicts (numbers as floats)."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    out = []
    for row in csv.DictReader(lines):
        parsed = {}
        for k, v in row.items():
            if k == "error":
                parsed[k] = v
            elif v == "":
                parsed[k] = math.nan
            else:
                try:
                    parsed[k] = float(v)
                except ValueError:
                    parsed[k] = v  # label columns such as hexagon vertices
        out.append(parsed)
    return out
