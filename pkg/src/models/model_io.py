"""
모델 파일 입출력.

JSON 한 개에 (U², V) 를 직접 적거나, 파라미터로 예제 모델을 지정한다.

    {"label": "...", "u_squared": [[...]], "v": [[...]]}
    {"model": "harmonic", "alpha": 0.6, "beta": 0.0, "grid_points": 1000, "half_width": 12.0}
    {"model": "square_well", "tau": 1.0}
"""
import json
import logging
import numbers

import numpy as np

from models.examples import harmonic_model, square_well_model
from models.model_spec import HarmonicParams, SquareWellParams
from utils.errors import NotPositiveDefinite, ParseError, ValidationError
from utils.load import load_json, save_json
from utils.operator import ModelSpec, SymmetricMatrix

logger = logging.getLogger(__name__)

PARAMETERIZED = ("harmonic", "square_well")


def _number(data, key, default=None):
    if key not in data:
        if default is None:
            raise ParseError("missing parameter", field=key)
        return default
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ParseError("expected a number", field=key)
    return float(value)


def _integer(data, key, default):
    value = _number(data, key, float(default))
    if not value.is_integer():
        raise ParseError("expected an integer", field=key)
    return int(value)


def _matrix(data, key):
    if key not in data:
        raise ParseError("missing matrix", field=key)
    rows = data[key]
    if not isinstance(rows, list) or not rows or not all(isinstance(row, list) for row in rows):
        raise ParseError("expected a list of rows", field=key)
    for row in rows:
        if any(isinstance(x, bool) or not isinstance(x, numbers.Real) for x in row):
            raise ParseError("matrix entries must be numbers", field=key)
    if len({len(row) for row in rows}) != 1:
        raise ParseError("rows have different lengths", field=key)
    return np.array(rows, dtype=float)


def model_from_mapping(data, grid_points=1000, half_width=12.0) -> ModelSpec:
    if not isinstance(data, dict):
        raise ParseError("model file must contain a JSON object")

    kind = data.get("model")
    if kind is not None:
        if kind == "harmonic":
            params = HarmonicParams(
                alpha=_number(data, "alpha"),
                beta=_number(data, "beta", 0.0),
                grid_points=_integer(data, "grid_points", grid_points),
                half_width=_number(data, "half_width", float(half_width)),
            )
            return harmonic_model(params)
        if kind == "square_well":
            return square_well_model(SquareWellParams(_number(data, "tau")))
        raise ParseError(f"unknown model {kind!r}, expected one of {', '.join(PARAMETERIZED)}", field="model")

    u_squared = _matrix(data, "u_squared")
    v = _matrix(data, "v")
    label = data.get("label", "")
    if not isinstance(label, str):
        raise ParseError("label must be a string", field="label")
    try:
        return ModelSpec(SymmetricMatrix(u_squared), SymmetricMatrix(v), label=label)
    except NotPositiveDefinite as exc:
        raise ValidationError(f"u_squared is not positive definite: {exc}") from exc


def load_model(path, grid_points=1000, half_width=12.0) -> ModelSpec:
    try:
        data = load_json(path)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc.msg}", line=exc.lineno) from exc
    except OSError as exc:
        raise ParseError(f"cannot read model file {path}: {exc}") from exc
    spec = model_from_mapping(data, grid_points=grid_points, half_width=half_width)
    logger.info("loaded model %s (n=%d) from %s", spec.label or "<unlabelled>", spec.n, path)
    return spec


def save_model(spec: ModelSpec, path):
    data = {
        "label": spec.label,
        "u_squared": spec.u_squared.entries.tolist(),
        "v": spec.v.entries.tolist(),
    }
    save_json(data, path)
    logger.info("saved model %s to %s", spec.label or "<unlabelled>", path)
