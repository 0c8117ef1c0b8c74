"""JSON scenario files and CSV tables.

A scenario file looks like::

    {
      "name": "three-box-intro",
      "selection_dim": 3,
      "pre": [[0.577..., 0.0], ...],
      "post": [[0.577..., 0.0], ...],
      "elements": [{"kind": "attenuator", "path": "1", "T": 0.5}]
    }

Complex numbers are ``[re, im]`` pairs. Optional keys: ``description``,
``subsystems`` (list of ``{"name", "labels"}`` for composite selection
spaces), ``internal_dim``/``internal_labels``/``internal_init`` and
``visibility``. Element kinds are ``attenuator`` (``path``, ``T``),
``shutter`` (``path``), ``joint_shutter`` (``labels``, comma-joined
composite labels) and ``unitary`` (``path``, ``matrix``).
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .counting import CountSeries
from .errors import NotFound
from .pointer import POLARIZATION, PointerSample
from .prepost import Attenuator, Circuit, JointShutter, PrePost, UnitaryOnPath
from .scenarios import BUILTIN, ScenarioSpec
from .state import Ket, Operator, Space, Subsystem

CSV_DIGITS = 12
LOSS_COLUMNS = ("setting", "T", "analytic_p", "counts", "trials", "seed")
POINTER_COLUMNS = ("G", "P_plus", "R")


def encode_complex(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def decode_complex(pair) -> complex:
    if isinstance(pair, (int, float)):
        return complex(pair)
    re, im = pair
    return complex(float(re), float(im))


def _encode_vector(amps) -> list:
    return [encode_complex(a) for a in amps]


def _decode_vector(items) -> np.ndarray:
    return np.array([decode_complex(p) for p in items], dtype=np.complex128)


def _internal_space(dim: int, labels=None) -> Space:
    if labels is None:
        if dim == 2:
            return POLARIZATION
        labels = [str(k) for k in range(dim)]
    if tuple(labels) == POLARIZATION.labels:
        return POLARIZATION
    return Space.single(labels, name="internal")


def scenario_to_dict(spec: ScenarioSpec) -> dict:
    sel = spec.space
    doc = {"name": spec.name}
    if spec.description:
        doc["description"] = spec.description
    doc["selection_dim"] = sel.dim
    doc["subsystems"] = [{"name": s.name, "labels": list(s.labels)} for s in sel.subsystems]
    doc["pre"] = _encode_vector(spec.prepost.pre.amps)
    doc["post"] = _encode_vector(spec.prepost.post.amps)
    internal = spec.circuit.internal
    if internal is not None:
        doc["internal_dim"] = internal.dim
        doc["internal_labels"] = list(internal.labels)
    if spec.internal_init is not None:
        doc["internal_init"] = _encode_vector(spec.internal_init.amps)
    if spec.visibility != 1.0:
        doc["visibility"] = spec.visibility
    elements = []
    for el in spec.circuit.elements:
        if isinstance(el, Attenuator):
            elements.append({"kind": "attenuator", "path": sel.label_str(el.path), "T": el.T})
        elif isinstance(el, JointShutter):
            elements.append({"kind": "joint_shutter", "labels": [sel.label_str(l) for l in el.labels]})
        elif isinstance(el, UnitaryOnPath):
            elements.append({
                "kind": "unitary",
                "path": sel.label_str(el.path),
                "matrix": [_encode_vector(row) for row in el.op.matrix],
            })
    doc["elements"] = elements
    return doc


def scenario_from_dict(doc: dict) -> ScenarioSpec:
    k = int(doc["selection_dim"])
    if "subsystems" in doc:
        sel = Space(tuple(Subsystem(s["name"], tuple(s["labels"])) for s in doc["subsystems"]))
    else:
        sel = Space.single([str(n + 1) for n in range(k)], name="path")
    if sel.dim != k:
        raise ValueError(f"selection_dim {k} does not match subsystems of dimension {sel.dim}")

    internal = None
    if doc.get("internal_dim") is not None:
        internal = _internal_space(int(doc["internal_dim"]), doc.get("internal_labels"))
    init = None
    if doc.get("internal_init") is not None:
        if internal is None:
            raise ValueError("internal_init given without internal_dim")
        init = Ket(internal, _decode_vector(doc["internal_init"]))

    def label(x):
        # composite labels are written comma-joined
        return sel.labels[sel.index(x)]

    elements = []
    for el in doc.get("elements", []):
        kind = el["kind"]
        if kind == "attenuator":
            elements.append(Attenuator(label(el["path"]), el["T"]))
        elif kind == "shutter":
            elements.append(Attenuator(label(el["path"]), 0.0))
        elif kind == "joint_shutter":
            elements.append(JointShutter(tuple(label(x) for x in el["labels"])))
        elif kind == "unitary":
            if internal is None:
                raise ValueError("unitary element needs internal_dim")
            matrix = np.array([[decode_complex(z) for z in row] for row in el["matrix"]])
            elements.append(UnitaryOnPath(label(el["path"]), Operator(internal, matrix)))
        else:
            raise ValueError(f"unknown element kind {kind!r}")

    pp = PrePost(Ket(sel, _decode_vector(doc["pre"])), Ket(sel, _decode_vector(doc["post"])))
    return ScenarioSpec(
        name=doc.get("name", "scenario"),
        prepost=pp,
        circuit=Circuit(sel, internal, tuple(elements)),
        description=doc.get("description", ""),
        internal_init=init,
        visibility=float(doc.get("visibility", 1.0)),
    )


def dumps_scenario(spec: ScenarioSpec) -> str:
    return json.dumps(scenario_to_dict(spec), indent=2) + "\n"


def save_scenario(spec: ScenarioSpec, path) -> None:
    Path(path).write_text(dumps_scenario(spec))


def load_scenario(path) -> ScenarioSpec:
    p = Path(path)
    if not p.is_file():
        raise NotFound(f"no scenario file {str(path)!r}")
    return scenario_from_dict(json.loads(p.read_text()))


def resolve_scenario(ref: str) -> ScenarioSpec:
    """Built-in scenario name, else a path to a scenario file."""
    if ref in BUILTIN:
        return BUILTIN[ref]()
    try:
        return load_scenario(ref)
    except NotFound:
        raise NotFound(f"unknown scenario {ref!r} (built-ins: {', '.join(BUILTIN)})") from None


def fmt(x) -> str:
    """Fixed CSV number formatting: 12 significant digits."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), f".{CSV_DIGITS}g")


def _write_rows(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def loss_csv(series: CountSeries, loss_column: bool = False) -> str:
    """Columns: setting, T, analytic_p, counts, trials, seed (and loss = 1 - T)."""
    header = LOSS_COLUMNS + (("loss",) if loss_column else ())
    rows = []
    for i, (t, p, c) in enumerate(zip(series.values, series.analytic, series.counts)):
        row = [i, t, p, c, series.trials, series.seed]
        if loss_column:
            row.append(1.0 - t)
        rows.append(row)
    return _write_rows(header, rows)


def pointer_csv(samples: Sequence[PointerSample]) -> str:
    return _write_rows(POINTER_COLUMNS, [(s.G, s.P_plus, s.R) for s in samples])
