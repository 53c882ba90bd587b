"""File formats shared by the CLI.

Matrix document::

    {"dim": n, "re": [[...], ...], "im": [[...], ...]}   # row-major, "im" optional

Intensity operator: a matrix document, or ``{"N": x, "tau1": <matrix document>}``.
Intensity vector: a JSON list, ``{"values": [...]}``, or inline ``"0.5,1.5"``.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Union

import numpy as np

from . import channels
from .divergences import intensity_vector
from .states import IntensityOperator, as_density, as_intensity, intensity_from_density


def load_json(path: Union[str, Path]) -> Any:
    with open(path) as fh:
        return json.load(fh)


def matrix_from_doc(doc: dict) -> np.ndarray:
    try:
        re = np.asarray(doc["re"], dtype=float)
    except KeyError:
        raise ValueError("matrix document needs an 're' field") from None
    im = np.asarray(doc["im"], dtype=float) if doc.get("im") is not None else None
    if re.ndim == 0:
        re = re.reshape(1, 1)
    n = int(doc.get("dim", re.shape[0]))
    if re.shape != (n, n) or (im is not None and im.shape != (n, n)):
        raise ValueError(f"matrix document entries do not match dim={n}")
    if im is not None and np.any(im):
        return re + 1j * im
    return re


def matrix_to_doc(M: np.ndarray) -> dict:
    M = np.asarray(M)
    return {"dim": int(M.shape[0]),
            "re": np.real(M).tolist(),
            "im": np.imag(M).tolist() if np.iscomplexobj(M) else np.zeros(M.shape).tolist()}


def intensity_from_doc(doc: dict) -> IntensityOperator:
    if "tau1" in doc:
        return intensity_from_density(as_density(matrix_from_doc(doc["tau1"])), float(doc["N"]))
    return as_intensity(matrix_from_doc(doc))


def load_matrix(path) -> np.ndarray:
    return matrix_from_doc(load_json(path))


def load_intensity(path) -> IntensityOperator:
    return intensity_from_doc(load_json(path))


def parse_vector(text_or_path: str) -> np.ndarray:
    """Intensity vector from a file or an inline comma-separated list."""
    p = Path(text_or_path)
    if p.exists():
        doc = load_json(p)
        if isinstance(doc, dict):
            doc = doc["values"]
        return intensity_vector(doc)
    return intensity_vector([float(v) for v in text_or_path.split(",") if v.strip()])


def channel_from_doc(doc: dict, dim_in: int) -> channels.ChannelSpec:
    """Build a channel from its JSON description.

    Kinds and parameters: ``unitary`` {"U"}, ``povm`` {"elements"},
    ``loss`` {"eta"}, ``background`` {"gamma"}, ``compose`` {"gamma"},
    ``marginalize`` {"keep"}, ``affine`` {"offset", "kraus"}.
    """
    kind = doc.get("kind")
    if kind == "unitary":
        return channels.unitary(matrix_from_doc(doc["U"]))
    if kind == "povm":
        return channels.povm([matrix_from_doc(e) for e in doc["elements"]])
    if kind == "loss":
        return channels.loss(doc["eta"], dim_in)
    if kind == "background":
        return channels.background(intensity_from_doc(doc["gamma"]))
    if kind == "compose":
        return channels.compose(intensity_from_doc(doc["gamma"]), dim_in)
    if kind == "marginalize":
        return channels.marginalize(doc["keep"], dim_in)
    if kind == "affine":
        off = doc.get("offset")
        return channels.affine(matrix_from_doc(off) if off is not None else None,
                               [_rect_from_doc(k) for k in doc["kraus"]])
    raise channels.InvalidChannel(f"unknown channel kind {kind!r}")


def _rect_from_doc(doc: dict) -> np.ndarray:
    re = np.asarray(doc["re"], dtype=float)
    im = np.asarray(doc["im"], dtype=float) if doc.get("im") is not None else None
    if re.ndim < 2:
        re = np.atleast_2d(re)
    return re + 1j * im if im is not None and np.any(im) else re


# --- deterministic number formatting ------------------------------------------

def fmt_float(x: float) -> str:
    """17 significant digits in fixed scientific notation; ``inf``/``nan`` as words."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.16e}"


def dumps(obj: Any) -> str:
    """JSON with every float written by :func:`fmt_float`.

    Non-finite floats become the strings ``"inf"``, ``"-inf"``, ``"nan"``.
    """
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist())
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        s = fmt_float(obj)
        return s if s[0].isdigit() or s[0] == "-" and s[1].isdigit() else json.dumps(s)
    return json.dumps(obj)


def format_csv_value(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (complex, np.complexfloating)):
        c = complex(v)
        if c.imag == 0:
            return fmt_float(c.real)
        return f"{fmt_float(c.real)}{'+' if c.imag >= 0 else '-'}{fmt_float(abs(c.imag))}j"
    return fmt_float(v)
