"""JSON documents read by ``el`` and ``eta`` and written by ``dump``."""

import json
from pathlib import Path
from typing import Any, Iterable, Optional

from ..algebra.bundle import BundleSpec, FamilyRole
from ..algebra.expr import Density
from ..algebra.parser import format_coordinate, format_expr, parse_expr
from ..calculus.operators import LinearDiffOp
from ..calculus.variational import euler_lagrange
from ..errors import DocumentError, UnknownFamilyError
from ..models.base import Model
from ..utils.logger import get_logger

_logger = get_logger("runner.documents")


def read_json(path: str | Path) -> Any:
    """Decoded JSON file; OSError and JSONDecodeError propagate."""
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_json(path: Path, data: Any) -> None:
    path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


def _require(data: Any, *keys: str) -> None:
    if not isinstance(data, dict):
        raise DocumentError(f"Expected a JSON object, got {type(data).__name__}")
    missing = [k for k in keys if k not in data]
    if missing:
        raise DocumentError(f"Document lacks required keys: {', '.join(missing)}")


def bundle_from(data: Any) -> BundleSpec:
    _require(data, "base_dim")
    try:
        return BundleSpec.from_dict(data)
    except (KeyError, TypeError, ValueError) as e:
        raise DocumentError(f"Malformed bundle: {e}") from None


def density_document(spec: BundleSpec, density: Density) -> dict[str, Any]:
    return {"bundle": spec.to_dict(), "density": format_expr(density.coeff)}


def load_density(path: str | Path) -> tuple[BundleSpec, Density]:
    """Read ``{"bundle": ..., "density": text}``.

    Raises:
        DocumentError: Missing keys or malformed bundle
        ExpressionSyntaxError: Malformed density text
    """
    data = read_json(path)
    _require(data, "bundle", "density")
    spec = bundle_from(data["bundle"])
    return spec, Density(parse_expr(spec, str(data["density"])))


def load_operator(path: str | Path) -> LinearDiffOp:
    """Read an operator document with its embedded bundle."""
    data = read_json(path)
    _require(data, "bundle", "source", "target")
    spec = bundle_from(data["bundle"])
    try:
        return LinearDiffOp.from_dict(data, spec)
    except (KeyError, TypeError) as e:
        if isinstance(e, UnknownFamilyError):
            raise
        raise DocumentError(f"Malformed operator document: {e}") from None


def euler_lagrange_map(spec: BundleSpec, density: Density, fields: Optional[Iterable[str]] = None) -> dict[str, str]:
    """Euler-Lagrange expression text per component of the varied families.

    Raises:
        UnknownFamilyError: A requested family is not declared
    """
    if fields is None:
        names = [f.name for f in spec.families_with_role(FamilyRole.FIELD)]
    else:
        names = list(fields)
        for name in names:
            spec.family(name)
    el = euler_lagrange(density, names)
    return {format_coordinate(coord): format_expr(value) for coord, value in el.items()}


def dump_model(model: Model, directory: str | Path) -> list[Path]:
    """Write bundle.json, density.json, gauge.json and chain-<k>.json."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def emit(name: str, data: Any) -> None:
        path = out / name
        write_json(path, data)
        written.append(path)

    emit("bundle.json", model.spec.to_dict())
    emit("density.json", density_document(model.spec, model.lagrangian))
    emit("gauge.json", model.gauge_symmetry.to_dict())
    for k, stage in enumerate(model.chain.stages if model.chain is not None else ()):
        emit(f"chain-{k}.json", stage.to_dict())
    _logger.info(f"Dumped {model.name} to {out} ({len(written)} files)")
    return written
