"""File formats: netlist and design JSON, CSV traces and spectra.

Every physical quantity in a JSON file is written as ``{"value": x,
"unit": u}`` with a mandatory unit string. Frequencies in files are Hz.
"""

from __future__ import annotations

import csv
import io
import json
import math
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import jsonschema
import numpy as np

from .circuit import Element, Netlist, Port
from .errors import InputError, InvalidNetlist

TWO_PI = 2 * math.pi

# internal param name -> (file param name, unit, scale from file to internal)
PARAM_UNITS = {
    "R": {"R": ("R", "ohm", 1.0)},
    "C": {"C": ("C", "F", 1.0)},
    "L": {"L": ("L", "H", 1.0)},
    "K": {"L1": ("L1", "H", 1.0), "L2": ("L2", "H", 1.0), "k": ("k", "1", 1.0)},
    "TL": {"z0": ("z0", "ohm", 1.0), "theta_ref": ("theta_ref", "rad", 1.0), "omega_ref": ("f_ref", "Hz", TWO_PI)},
    "V": {"value": ("value", "V", 1.0)},
    "I": {"value": ("value", "A", 1.0)},
}


def load_schema(name: str) -> dict:
    text = resources.files("purcellkit").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(doc, name: str) -> None:
    """Raise InputError if ``doc`` does not match the shipped schema."""
    try:
        jsonschema.validate(doc, load_schema(name))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InputError(f"{name}: {where}: {exc.message}") from None


def read_json(path) -> dict:
    """Parse a JSON file, reporting syntax errors with line and column."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def finite(doc):
    """Replace non-finite floats (JSON has no inf/nan) by null."""
    if isinstance(doc, dict):
        return {k: finite(v) for k, v in doc.items()}
    if isinstance(doc, (list, tuple)):
        return [finite(v) for v in doc]
    if isinstance(doc, (float, np.floating)):
        return float(doc) if math.isfinite(doc) else None
    if isinstance(doc, np.integer):
        return int(doc)
    return doc


def dumps(doc) -> str:
    """Stable JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(finite(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, doc) -> None:
    Path(path).write_text(dumps(doc))


def quantity(value: float, unit: str) -> dict:
    return {"value": float(value), "unit": unit}


def _unwrap(q, unit: str, where: str) -> float:
    if q.get("unit") != unit:
        raise InvalidNetlist(f"{where}: expected unit {unit!r}, got {q.get('unit')!r}")
    return float(q["value"])


def netlist_to_dict(netlist: Netlist) -> dict:
    elements = []
    for e in netlist.elements:
        params = {}
        for key, (fkey, unit, scale) in PARAM_UNITS[e.kind].items():
            v = e.params[key]
            if isinstance(v, complex):
                if v.imag:
                    raise InvalidNetlist(f"{e.name}: complex parameters cannot be serialised")
                v = v.real
            params[fkey] = quantity(v / scale, unit)
        elements.append({"name": e.name, "kind": e.kind, "terminals": list(e.terminals), "params": params})
    ports = [
        {"plus": p.plus, "minus": p.minus, "z0": quantity(p.z0, "ohm"), "name": p.name} for p in netlist.ports
    ]
    return {"nodes": list(netlist.nodes), "ground": netlist.ground, "elements": elements, "ports": ports}


def netlist_from_dict(doc: dict) -> Netlist:
    validate(doc, "netlist")
    elements = []
    for i, raw in enumerate(doc["elements"]):
        kind = raw["kind"]
        name = raw.get("name", f"{kind}{i + 1}")
        table = PARAM_UNITS[kind]
        files = {fkey for fkey, _, _ in table.values()}
        extra = set(raw["params"]) - files
        if extra:
            raise InvalidNetlist(f"{name}: unknown params {sorted(extra)}")
        params = {}
        for key, (fkey, unit, scale) in table.items():
            if fkey not in raw["params"]:
                raise InvalidNetlist(f"{name}: missing param {fkey!r}")
            params[key] = _unwrap(raw["params"][fkey], unit, f"{name}.{fkey}") * scale
        elements.append(Element(name, kind, tuple(raw["terminals"]), params))
    ground = doc.get("ground", "0")
    ports = [
        Port(p["plus"], p.get("minus", ground), _unwrap(p["z0"], "ohm", f"port {j}"), p.get("name", ""))
        for j, p in enumerate(doc.get("ports", []))
    ]
    return Netlist(tuple(doc["nodes"]), tuple(elements), tuple(ports), ground)


def read_netlist(path) -> Netlist:
    return netlist_from_dict(read_json(path))


def write_netlist(path, netlist: Netlist) -> None:
    write_json(path, netlist_to_dict(netlist))


def _fmt(x) -> str:
    return repr(float(x))


def csv_text(header: Sequence[str], columns: Iterable[Sequence[float]]) -> str:
    cols = [np.asarray(c, float) for c in columns]
    if len(cols) != len(header) or len({c.size for c in cols}) > 1:
        raise InputError("CSV columns must match the header and share one length")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in zip(*cols):
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, columns) -> None:
    Path(path).write_text(csv_text(header, columns))


def write_complex_csv(path, freq_hz, values) -> None:
    z = np.asarray(values, complex)
    write_csv(path, ["freq_hz", "re", "im"], [freq_hz, z.real, z.imag])


def read_csv_columns(path, required: Sequence[str]) -> dict[str, np.ndarray]:
    """Read named numeric columns; the header row is mandatory."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    if not rows:
        raise InputError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    missing = [c for c in required if c not in header]
    if missing:
        raise InputError(f"{path}: missing columns {missing}")
    data = {c: [] for c in required}
    for n, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise InputError(f"{path}:{n}: expected {len(header)} fields, got {len(row)}")
        for c in required:
            try:
                data[c].append(float(row[header.index(c)]))
            except ValueError:
                raise InputError(f"{path}:{n}: {c} is not a number") from None
    return {c: np.asarray(v) for c, v in data.items()}


def read_trace(path):
    """Complex S21 trace from ``freq_hz,re,im`` CSV."""
    from .spectro import ComplexTrace

    cols = read_csv_columns(path, ["freq_hz", "re", "im"])
    return ComplexTrace(cols["freq_hz"], cols["re"] + 1j * cols["im"])
