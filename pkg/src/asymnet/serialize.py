"""JSON documents for networks, multinets and similarity networks.

Output is canonical: keys sorted, variables in id order, probabilities written
with 17 significant digits so every double survives a round trip exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Union

import jsonschema
import numpy as np

from .core import Cpt, DiscreteNetwork, Variable, validate_network
from .errors import ModelValidationError, ParseError, SchemaError
from .multinet import HypothesisSpace, Multinet, validate_multinet
from .simnet import Cover, OrdinaryLocalNetwork, SimilarityNetwork, validate_simnet

FORMAT_VERSION = "1"

Model = Union[DiscreteNetwork, Multinet, SimilarityNetwork]


@dataclass(frozen=True, eq=False)
class ModelDocument:
    kind: str
    version: str
    model: Model


def kind_of(model: Model) -> str:
    if isinstance(model, DiscreteNetwork):
        return "network"
    if isinstance(model, Multinet):
        return "multinet"
    if isinstance(model, SimilarityNetwork):
        return "simnet"
    raise TypeError(f"not a model: {type(model).__name__}")


# -- canonical emitter -------------------------------------------------------


def _emit(obj: Any, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = sorted(obj.items())
        for k, (key, val) in enumerate(items):
            out.append(f"{pad}  {json.dumps(key)}: ")
            _emit(val, indent + 1, out)
            out.append(",\n" if k < len(items) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if all(not isinstance(x, (dict, list, tuple)) for x in obj):
            out.append("[" + ", ".join(_scalar(x) for x in obj) + "]")
            return
        out.append("[\n")
        for k, val in enumerate(obj):
            out.append(pad + "  ")
            _emit(val, indent + 1, out)
            out.append(",\n" if k < len(obj) - 1 else "\n")
        out.append(pad + "]")
    else:
        out.append(_scalar(obj))


def _scalar(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not np.isfinite(x):
            raise ValueError("probabilities must be finite")
        s = format(x, ".17g")
        return s if any(c in s for c in ".en") else s + ".0"
    if isinstance(x, str):
        return json.dumps(x, ensure_ascii=False)
    if x is None:
        return "null"
    raise TypeError(f"cannot serialize {type(x).__name__}")


def canonical_json(obj: Any) -> str:
    out: list[str] = []
    _emit(obj, 0, out)
    return "".join(out) + "\n"


# -- payloads ----------------------------------------------------------------


def network_payload(net: DiscreteNetwork) -> dict:
    return {
        "variables": [{"id": v.id, "name": v.name, "values": list(v.values)} for v in net.variables],
        "arcs": [list(a) for a in sorted(net.arcs)],
        "cpts": {
            vid: {"parents": list(c.parents), "rows": [[float(x) for x in row] for row in c.rows]}
            for vid, c in net.cpts.items()
        },
    }


def _point_labels(hyp: HypothesisSpace, pt) -> list[str]:
    return [v.values[i] for v, i in zip(hyp.variables, pt)]


def multinet_payload(m: Multinet) -> dict:
    hyp = m.hypothesis
    return {
        "hypothesis_vars": list(hyp.ids),
        "blocks": [[_point_labels(hyp, pt) for pt in b] for b in m.blocks],
        "block_priors": [float(x) for x in m.block_priors],
        "locals": [network_payload(l) for l in m.locals],
    }


def simnet_payload(s: SimilarityNetwork) -> dict:
    hyp = s.hypothesis
    return {
        "hypothesis_vars": list(hyp.ids),
        "variables": list(s.variables),
        "cover": [[_point_labels(hyp, pt) for pt in e] for e in s.cover.edges],
        "locals": [
            {
                "edge": l.edge,
                "depicted": sorted(l.depicted),
                "retained": sorted(l.retained),
                "network": network_payload(l.network),
            }
            for l in s.locals
        ],
    }


def serialize_model(model: Model | ModelDocument) -> str:
    if isinstance(model, ModelDocument):
        model = model.model
    kind = kind_of(model)
    payload = {"network": network_payload, "multinet": multinet_payload, "simnet": simnet_payload}[kind](model)
    return canonical_json({"kind": kind, "version": FORMAT_VERSION, "model": payload})


# -- parsing -----------------------------------------------------------------


def _schema() -> dict:
    text = resources.files("asymnet").joinpath("schema/model.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


_VALIDATOR = None


def _validator():
    global _VALIDATOR
    if _VALIDATOR is None:
        schema = _schema()
        cls = jsonschema.validators.validator_for(schema)
        _VALIDATOR = cls(schema)
    return _VALIDATOR


def _path(parts) -> str:
    return "/" + "/".join(str(p) for p in parts)


def _network(d: dict, where: str) -> DiscreteNetwork:
    variables = []
    seen = set()
    for k, v in enumerate(d["variables"]):
        if v["id"] in seen:
            raise SchemaError(f"{where}/variables/{k}: duplicate variable {v['id']!r}")
        seen.add(v["id"])
        variables.append(Variable(v["id"], v["name"], tuple(v["values"])))
    card = {v.id: v.card for v in variables}
    for k, (a, b) in enumerate(d["arcs"]):
        for x in (a, b):
            if x not in card:
                raise SchemaError(f"{where}/arcs/{k}: unknown variable {x!r}")
    cpts = {}
    for vid, c in d["cpts"].items():
        at = f"{where}/cpts/{vid}"
        if vid not in card:
            raise SchemaError(f"{at}: CPT for unknown variable {vid!r}")
        for p in c["parents"]:
            if p not in card:
                raise SchemaError(f"{at}/parents: unknown variable {p!r}")
        nrows = int(np.prod([card[p] for p in c["parents"]], dtype=int))
        if len(c["rows"]) != nrows:
            raise SchemaError(f"{at}/rows: variable {vid!r} needs {nrows} rows, found {len(c['rows'])}")
        for r, row in enumerate(c["rows"]):
            if len(row) != card[vid]:
                raise SchemaError(
                    f"{at}/rows/{r}: row of variable {vid!r} has {len(row)} entries, expected {card[vid]}"
                )
        cpts[vid] = Cpt(vid, tuple(c["parents"]), np.array(c["rows"], dtype=float).reshape(nrows, card[vid]))
    return DiscreteNetwork(tuple(variables), frozenset(tuple(a) for a in d["arcs"]), cpts)


def _hypothesis(ids, nets, where) -> HypothesisSpace:
    if len(set(ids)) != len(ids):
        raise SchemaError(f"{where}/hypothesis_vars: repeated variable")
    for h in ids:
        if not any(h in n for n in nets):
            raise SchemaError(f"{where}/hypothesis_vars: unknown variable {h!r}")
    return HypothesisSpace(tuple(next(n.var(h) for n in nets if h in n) for h in ids))


def _points(hyp: HypothesisSpace, sets, where) -> tuple:
    out = []
    for i, labels_list in enumerate(sets):
        pts = []
        for j, labels in enumerate(labels_list):
            if len(labels) != len(hyp.variables):
                raise SchemaError(f"{where}/{i}/{j}: point needs {len(hyp.variables)} labels")
            try:
                pts.append(hyp.point(*labels))
            except ValueError as exc:
                raise SchemaError(f"{where}/{i}/{j}: {exc}") from None
        out.append(tuple(pts))
    return tuple(out)


def _build(kind: str, d: dict) -> Model:
    if kind == "network":
        return _network(d, "/model")
    nets = [
        _network(l if kind == "multinet" else l["network"], f"/model/locals/{i}" + ("" if kind == "multinet" else "/network"))
        for i, l in enumerate(d["locals"])
    ]
    hyp = _hypothesis(d["hypothesis_vars"], nets, "/model")
    if kind == "multinet":
        blocks = _points(hyp, d["blocks"], "/model/blocks")
        return Multinet(hyp, blocks, tuple(nets), np.array(d["block_priors"], dtype=float))
    edges = _points(hyp, d["cover"], "/model/cover")
    locals_ = tuple(
        OrdinaryLocalNetwork(l["edge"], frozenset(l["depicted"]), net, frozenset(l.get("retained", ())))
        for l, net in zip(d["locals"], nets)
    )
    return SimilarityNetwork(Cover(hyp, edges), locals_, tuple(d.get("variables", ())))


def validate_model(model: Model):
    kind = kind_of(model)
    if kind == "network":
        return validate_network(model)
    if kind == "multinet":
        return validate_multinet(model)
    return validate_simnet(model)


def parse_model(text: str, *, validate: bool = True) -> ModelDocument:
    """Parse a model document.

    Raises :class:`ParseError` (with line and column) for malformed JSON,
    :class:`SchemaError` (with a JSON path) for structural problems and, when
    ``validate`` is set, :class:`ModelValidationError` for semantic ones.
    """
    if not text.strip():
        raise ParseError("line 1: empty document")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    errors = sorted(_validator().iter_errors(data), key=lambda e: (len(e.path), list(map(str, e.path))))
    if errors:
        err = max(errors, key=lambda e: len(e.absolute_path))
        raise SchemaError(f"{_path(err.absolute_path)}: {err.message}")
    kind = data["kind"]
    model = _build(kind, data["model"])
    if validate:
        report = validate_model(model)
        if not report.ok:
            raise ModelValidationError(report)
    return ModelDocument(kind, data["version"], model)


def load_model(path: str | Path, *, validate: bool = True) -> ModelDocument:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not UTF-8 ({exc.reason})") from None
    return parse_model(text, validate=validate)


def save_model(model: Model, path: str | Path) -> None:
    Path(path).write_text(serialize_model(model), encoding="utf-8")
