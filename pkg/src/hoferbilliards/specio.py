"""JSON input specs for tables, polygons and table paths.

Table spec (one object):
    {"type": "disc"}
    {"type": "fourier_support", "c0": x, "cos": [...], "sin": [...]}
    {"type": "smoothed_polygon", "vertices": [[x, y], ...],
     "profile_width": w, "scale": s, "mark": t0}

Path spec:
    {"type": "translation", "table": <table spec>, "v": [x, y]}
    {"type": "support_interp", "a": <fourier fields>, "b": <fourier fields>}
    {"type": "normal_perturbation", "table": <table spec>,
     "f": {"const": c, "cos": [...], "sin": [...]}}

All numbers are IEEE doubles, coordinates in plane units.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .curves import FourierSupportSpec, PolygonSpec, TableCurve, disc_table, build_fourier_table
from .homotopy import TablePath, normal_perturbation_path, support_interp_path, translation_path


class SpecError(ValueError):
    """Malformed input spec; reported with the offending field."""


def _load_obj(source):
    if isinstance(source, (str, Path)):
        try:
            return json.loads(Path(source).read_text())
        except FileNotFoundError as exc:
            raise SpecError(f"spec file not found: {source}") from exc
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON in {source}: {exc}") from exc
    return source


def _fourier_spec(obj, where):
    try:
        return FourierSupportSpec(
            float(obj["c0"]),
            np.asarray(obj.get("cos", []), dtype=float),
            np.asarray(obj.get("sin", []), dtype=float),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"{where}: bad fourier support fields ({exc})") from exc


def load_table(source) -> TableCurve:
    obj = _load_obj(source)
    if not isinstance(obj, dict) or "type" not in obj:
        raise SpecError("table: expected an object with a 'type' field")
    kind = obj["type"]
    if kind == "disc":
        return disc_table()
    if kind == "fourier_support":
        return build_fourier_table(_fourier_spec(obj, "table"))
    if kind == "smoothed_polygon":
        from .smoothing import family_from_polygon

        try:
            poly = PolygonSpec(np.asarray(obj["vertices"], dtype=float), float(obj.get("mark", 0.0)))
            fam = family_from_polygon(poly, width=obj.get("profile_width"))
            return fam.curve(float(obj["scale"]))
        except (KeyError, TypeError) as exc:
            raise SpecError(f"table.{exc}: missing or malformed field") from exc
    raise SpecError(f"table.type: unknown kind {kind!r}")


def load_polygon(source) -> PolygonSpec:
    obj = _load_obj(source)
    try:
        return PolygonSpec(np.asarray(obj["vertices"], dtype=float), float(obj.get("mark", 0.0)))
    except (KeyError, TypeError) as exc:
        raise SpecError(f"polygon.{exc}: missing or malformed field") from exc


def _periodic_samples(obj, where, samples=512):
    q = np.arange(samples) / samples
    try:
        vals = np.full(samples, float(obj.get("const", 0.0)))
        for k, c in enumerate(obj.get("cos", []), start=1):
            vals += float(c) * np.cos(2 * np.pi * k * q)
        for k, c in enumerate(obj.get("sin", []), start=1):
            vals += float(c) * np.sin(2 * np.pi * k * q)
    except (TypeError, ValueError) as exc:
        raise SpecError(f"{where}: bad harmonic coefficients ({exc})") from exc
    return vals


def load_path(source) -> TablePath:
    obj = _load_obj(source)
    if not isinstance(obj, dict) or "type" not in obj:
        raise SpecError("path: expected an object with a 'type' field")
    kind = obj["type"]
    if kind == "translation":
        try:
            v = np.asarray(obj["v"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError("path.v: expected a plane vector") from exc
        return translation_path(load_table(obj.get("table", {"type": "disc"})), v)
    if kind == "support_interp":
        if "a" not in obj or "b" not in obj:
            raise SpecError("path: support_interp needs 'a' and 'b' fourier specs")
        return support_interp_path(_fourier_spec(obj["a"], "path.a"), _fourier_spec(obj["b"], "path.b"))
    if kind == "normal_perturbation":
        table = load_table(obj.get("table", {"type": "disc"}))
        f = _periodic_samples(obj.get("f", {}), "path.f")
        return normal_perturbation_path(table, f).path
    raise SpecError(f"path.type: unknown kind {kind!r}")
