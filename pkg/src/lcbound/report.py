"""Serialization shared by every module: JSON key/value trees, CSV rows and run manifests."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

from . import __version__
from .poly_exact import BiPoly, Interval, Poly


def frac_str(x: Fraction) -> str:
    """Exact ``num/den`` rendering (denominator always present)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def decimal_str(x, digits: int = 12) -> str:
    """``digits`` significant digits, used beside an exact fraction."""
    return f"{float(x):.{digits}g}"


def _end(x) -> str:
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return frac_str(x)


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return frac_str(obj)
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return str(obj)
        return obj
    if isinstance(obj, Poly):
        return {"var": obj.var, "coeffs_low_to_high": [frac_str(c) for c in obj.coeffs]}
    if isinstance(obj, BiPoly):
        return {
            "vars": list(obj.vars),
            "terms": {f"{i},{j}": frac_str(c) for (i, j), c in sorted(obj.terms.items())},
        }
    if isinstance(obj, Interval):
        return {"lo": _end(obj.lo), "hi": _end(obj.hi),
                "lo_open": obj.lo_open, "hi_open": obj.hi_open}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, "to_dict"):
            return to_jsonable(obj.to_dict())
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "tolist"):
        return to_jsonable(obj.tolist())
    if hasattr(obj, "item"):
        return to_jsonable(obj.item())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj: Any) -> str:
    """Deterministic JSON (sorted keys, fixed indentation, trailing newline)."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def write_text(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(text.encode("utf-8"))


def manifest_path(output: Path) -> Path:
    output = Path(output)
    return output.with_name(output.name + ".manifest.json")


def write_manifest(output: Path, subcommand: str, argv: list[str], flags: dict,
                   seed: int | None = None) -> Path:
    """Record how ``output`` was produced so ``replay`` can regenerate it."""
    m = {
        "subcommand": subcommand,
        "argv": argv,
        "flags": flags,
        "seed": seed,
        "version": __version__,
        "outputs": [Path(output).name],
    }
    path = manifest_path(output)
    write_text(path, dumps(m))
    return path


def read_manifest(path: Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
