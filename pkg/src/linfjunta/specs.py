"""JSON documents describing functions, vector maps and box sets.

A function spec is an object with a ``type`` key:

``{"type": "trigpoly", "dim": 4, "terms": [[[1,0,0,0], 0.0625, 0.0], ...], "half": true}``
    Terms are ``[k, re, im]``.  With ``half`` true each term stands for itself
    and its mirror -k (the zero frequency keeps its real part).
``{"type": "trigpoly_file", "path": "f.txt"}``
    The text format of :meth:`TrigPoly.to_text`.
``{"type": "builtin", "name": "max", "dim": 10}``
    One of :data:`BUILTINS`.
``{"type": "grid_dump", "path": "f.csv", "domain": "cube"}``
    A CSV grid dump, interpolated multilinearly.
``{"type": "random", "dim": 3, "degree": 2, "scale": 1.0, "seed": 0}``
    A normalised random polynomial.

Relative paths resolve against the directory of the spec file.
"""
from __future__ import annotations

import json
import os
from typing import Union

import numpy as np

from .geometry import BoxSet, VectorMap, identity_map, random_smooth_map, sine_family
from .inequalities import RandomPolySpec, random_trigpoly
from .quadrature import FnHandle, read_grid_dump
from .torus import TrigPoly, read_trigpoly

Function = Union[TrigPoly, FnHandle]


def max_function(dim: int) -> FnHandle:
    """x -> max_n x_n on the cube."""
    def grad(X):
        G = np.zeros_like(X)
        G[np.arange(len(X)), np.argmax(X, axis=1)] = 1.0
        return G
    return FnHandle(dim, "cube", lambda X: X.max(axis=1), grad, name="max")


def coordinate_sum(dim: int) -> FnHandle:
    return FnHandle(dim, "cube", lambda X: X.sum(axis=1), lambda X: np.ones_like(X), name="sum")


def two_mode(dim: int = 4) -> TrigPoly:
    """(cos 2 pi x_1 + cos 2 pi x_2) / 8."""
    if dim < 2:
        raise ValueError("two_mode needs dim >= 2")
    e = np.eye(dim, dtype=int)
    return TrigPoly.cosine(dim, e[0], 0.125) + TrigPoly.cosine(dim, e[1], 0.125)


BUILTINS = {
    "max": max_function,
    "sum": coordinate_sum,
    "two_mode": two_mode,
    "cos": lambda dim: TrigPoly.cosine(dim, np.eye(dim, dtype=int)[0]),
}


def _path(doc: dict, base: str) -> str:
    p = doc["path"]
    return p if os.path.isabs(p) else os.path.join(base, p)


def function_from_doc(doc: dict, base: str = ".") -> Function:
    kind = doc.get("type")
    if kind == "trigpoly":
        dim = int(doc["dim"])
        terms = {}
        for k, re, im in doc["terms"]:
            k = tuple(int(v) for v in k)
            if len(k) != dim:
                raise ValueError(f"frequency {k} does not have length {dim}")
            terms[k] = terms.get(k, 0) + complex(re, im)
        if doc.get("half", False):
            return TrigPoly.from_half(dim, terms)
        return TrigPoly(dim, terms)
    if kind == "trigpoly_file":
        return read_trigpoly(_path(doc, base))
    if kind == "builtin":
        name = doc["name"]
        if name not in BUILTINS:
            raise ValueError(f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}")
        return BUILTINS[name](int(doc["dim"]))
    if kind == "grid_dump":
        return read_grid_dump(_path(doc, base), doc.get("domain", "cube"))
    if kind == "random":
        return random_trigpoly(RandomPolySpec(int(doc["dim"]), int(doc["degree"]),
                                              float(doc.get("scale", 1.0)), int(doc.get("seed", 0))))
    raise ValueError(f"unknown function type {kind!r}")


def load_function(path: str) -> Function:
    with open(path) as fh:
        doc = json.load(fh)
    return function_from_doc(doc, os.path.dirname(os.path.abspath(path)))


def map_from_doc(doc: dict, base: str = ".") -> VectorMap:
    """``{"family": "identity" | "sine" | "random_smooth", "N": .., "M": .., "seed": ..}``
    or ``{"family": "grid", "L": .., "components": [grid_dump specs]}``."""
    fam = doc.get("family")
    if fam == "identity":
        return identity_map(int(doc["N"]))
    if fam == "sine":
        return sine_family(int(doc["N"]))
    if fam == "random_smooth":
        return random_smooth_map(int(doc["N"]), int(doc.get("M", doc["N"])), int(doc.get("seed", 0)))
    if fam == "grid":
        comps = tuple(function_from_doc({"type": "grid_dump", "domain": "cube", **c}, base)
                      for c in doc["components"])
        return VectorMap(comps, float(doc["L"]), {"family": "grid"})
    raise ValueError(f"unknown map family {fam!r}")


def load_map(path: str) -> VectorMap:
    with open(path) as fh:
        doc = json.load(fh)
    return map_from_doc(doc, os.path.dirname(os.path.abspath(path)))


def load_boxset(path: str) -> BoxSet:
    with open(path) as fh:
        return BoxSet.from_json(fh.read())
