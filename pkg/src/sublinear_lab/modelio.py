"""Model documents on disk.

Layout (keys in exactly this order; bracketed ones optional)::

    {["format_version": 1,] "outcomes": [...], "values": [...], "vertices": [[...], ...]
     [, "horizon": n] [, "semantics": "peng-forward" | "peng-backward" | "qwise"]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import FormatError, ModelError
from .model import CredalSet, FiniteSpace, RandomVar
from .reports import FORMAT_VERSION
from .sequence import SEMANTICS, SequenceModel

KEY_ORDER = ("format_version", "outcomes", "values", "vertices", "horizon", "semantics")
REQUIRED = ("outcomes", "values", "vertices")


@dataclass(frozen=True)
class ModelDoc:
    marginal: CredalSet
    x: RandomVar
    horizon: int | None = None
    semantics: str | None = None

    def sequence(self, horizon: int | None = None, semantics: str | None = None) -> SequenceModel:
        n = horizon or self.horizon
        if n is None:
            raise ModelError("no horizon given and the model document has none")
        return SequenceModel.iid(self.marginal, self.x, n, semantics or self.semantics or "peng-forward")


class _Object(list):
    """Key/value pairs of one JSON object, in source order."""


def _pairs(pairs):
    keys = [k for k, _ in pairs]
    if len(set(keys)) != len(keys):
        raise FormatError(f"duplicate keys in {keys}")
    return _Object(pairs)


def parse_model(text: str) -> ModelDoc:
    try:
        pairs = json.loads(text, object_pairs_hook=_pairs)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    if not isinstance(pairs, _Object):
        raise FormatError("model document must be a JSON object")
    keys = [k for k, _ in pairs]
    unknown = [k for k in keys if k not in KEY_ORDER]
    if unknown:
        raise FormatError(f"unknown fields {unknown}")
    missing = [k for k in REQUIRED if k not in keys]
    if missing:
        raise FormatError(f"missing fields {missing}")
    if keys != sorted(keys, key=KEY_ORDER.index):
        raise FormatError(f"fields out of order: {keys}; expected order {list(KEY_ORDER)}")
    doc = {k: _plain(v) for k, v in pairs}
    if "format_version" in doc and doc["format_version"] != FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {doc['format_version']!r}")
    outcomes, values, vertices = doc["outcomes"], doc["values"], doc["vertices"]
    if not isinstance(outcomes, list) or not all(isinstance(o, (str, int)) for o in outcomes):
        raise FormatError("outcomes must be a list of labels")
    if not isinstance(values, list) or not all(_is_number(v) for v in values):
        raise FormatError("values must be a list of numbers")
    if not isinstance(vertices, list) or not all(isinstance(r, list) and all(_is_number(w) for w in r) for r in vertices):
        raise FormatError("vertices must be a list of number lists")
    horizon = doc.get("horizon")
    if horizon is not None and (not isinstance(horizon, int) or isinstance(horizon, bool) or horizon < 1):
        raise FormatError("horizon must be a positive integer")
    semantics = doc.get("semantics")
    if semantics is not None and semantics not in SEMANTICS:
        raise FormatError(f"semantics must be one of {SEMANTICS}")
    space = FiniteSpace(tuple(str(o) for o in outcomes))
    return ModelDoc(CredalSet.from_weights(space, vertices), RandomVar(space, values), horizon, semantics)


def _plain(v):
    if isinstance(v, _Object) or (isinstance(v, list) and any(isinstance(e, _Object) for e in v)):
        raise FormatError("nested objects are not allowed in a model document")
    return v


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def load_model(path) -> ModelDoc:
    with open(path) as fh:
        return parse_model(fh.read())


def dump_model(doc: ModelDoc) -> str:
    out = {
        "format_version": FORMAT_VERSION,
        "outcomes": list(doc.marginal.space.outcome_labels),
        "values": doc.x.values.tolist(),
        "vertices": doc.marginal.matrix.tolist(),
    }
    if doc.horizon is not None:
        out["horizon"] = doc.horizon
    if doc.semantics is not None:
        out["semantics"] = doc.semantics
    return json.dumps(out) + "\n"
