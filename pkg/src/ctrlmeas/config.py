"""Declarative experiment configuration: a single JSON document.

Recognized fields (anything else is an error, to catch typos early):

    dimension       int >= 2
    state           preset name, {"re": ..., "im": ...} matrix,
                    or {"random": {"seed": n}}
    basis_a         "computational" | "fourier" | {"columns": {"re", "im"}}
                    | {"random": {"seed": n}}
    basis_b         same
    eigenvalues_a   optional list of d reals (default 1..d)
    eigenvalues_b   optional list of d reals
    theta           angle or list of angles, each in [0, pi/2]
    phi             angle, list of angles, or {"uniform_count": K}
    shots           optional positive int; absent selects exact mode
    seed            int (default 0)
    seeds           optional positive int: Monte Carlo repetitions for
                    strength sweeps (default 20)
    format          "csv" | "json" (default "csv")
    output          optional output directory

Angles are radians; strings like "pi/4", "-pi/2", "3pi/8" are accepted.
State presets: computational-<k>, plus (uniform superposition), y-plus
(d = 2 only), maximally-mixed.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass

import numpy as np

from .core import (
    DensityMatrix,
    Observable,
    ObservablePair,
    computational_basis,
    fourier_basis,
    random_basis,
    random_pure_state,
)
from .errors import ConfigError, ValidationError

_KNOWN_FIELDS = {
    "dimension",
    "state",
    "basis_a",
    "basis_b",
    "eigenvalues_a",
    "eigenvalues_b",
    "theta",
    "phi",
    "shots",
    "seed",
    "seeds",
    "format",
    "output",
}

_ANGLE_RE = re.compile(r"^([+-]?)(\d+(?:\.\d+)?)?\s*\*?\s*pi(?:\s*/\s*(\d+(?:\.\d+)?))?$", re.IGNORECASE)


def parse_angle(value, field_name: str) -> float:
    """Parse a number or a 'pi'-style string into radians."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        text = value.strip()
        m = _ANGLE_RE.match(text)
        if m:
            sign = -1.0 if m.group(1) == "-" else 1.0
            coeff = float(m.group(2)) if m.group(2) else 1.0
            denom = float(m.group(3)) if m.group(3) else 1.0
            return sign * coeff * math.pi / denom
        try:
            return float(text)
        except ValueError:
            pass
    raise ConfigError(f"{field_name}: cannot parse angle {value!r}")


def _angle_list(value, field_name: str) -> list[float]:
    if isinstance(value, list):
        return [parse_angle(v, field_name) for v in value]
    return [parse_angle(value, field_name)]


@dataclass
class ExperimentConfig:
    """Parsed and validated experiment description."""

    dimension: int
    state: str | dict
    basis_a: str | dict
    basis_b: str | dict
    theta: list[float]
    phi: list[float]
    seed: int = 0
    shots: int | None = None
    seeds: int = 20
    eigenvalues_a: list[float] | None = None
    eigenvalues_b: list[float] | None = None
    format: str = "csv"
    output: str | None = None

    def to_dict(self) -> dict:
        doc = {
            "dimension": self.dimension,
            "state": self.state,
            "basis_a": self.basis_a,
            "basis_b": self.basis_b,
            "theta": list(self.theta),
            "phi": list(self.phi),
            "seed": self.seed,
            "seeds": self.seeds,
            "format": self.format,
        }
        if self.shots is not None:
            doc["shots"] = self.shots
        if self.eigenvalues_a is not None:
            doc["eigenvalues_a"] = list(self.eigenvalues_a)
        if self.eigenvalues_b is not None:
            doc["eigenvalues_b"] = list(self.eigenvalues_b)
        if self.output is not None:
            doc["output"] = self.output
        return doc


def parse_config(doc: dict) -> ExperimentConfig:
    """Validate a raw JSON object field by field."""
    if not isinstance(doc, dict):
        raise ConfigError(f"config root must be an object, got {type(doc).__name__}")
    unknown = set(doc) - _KNOWN_FIELDS
    if unknown:
        raise ConfigError(f"unknown field(s): {', '.join(sorted(unknown))}")
    for required in ("dimension", "state", "basis_a", "basis_b", "theta", "phi"):
        if required not in doc:
            raise ConfigError(f"{required}: field is required")

    d = doc["dimension"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 2:
        raise ConfigError(f"dimension: must be an integer >= 2, got {d!r}")

    thetas = _angle_list(doc["theta"], "theta")
    for t in thetas:
        if not 0.0 <= t <= math.pi / 2:
            raise ConfigError(f"theta: must lie in [0, pi/2], got {t}")

    phi_raw = doc["phi"]
    if isinstance(phi_raw, dict):
        if set(phi_raw) != {"uniform_count"}:
            raise ConfigError("phi: object form must be exactly {\"uniform_count\": K}")
        count = phi_raw["uniform_count"]
        if not isinstance(count, int) or count < 1:
            raise ConfigError(f"phi: uniform_count must be a positive integer, got {count!r}")
        phis = [2.0 * math.pi * k / count for k in range(count)]
    else:
        phis = _angle_list(phi_raw, "phi")
    if not phis:
        raise ConfigError("phi: need at least one phase")

    shots = doc.get("shots")
    if shots is not None and (not isinstance(shots, int) or isinstance(shots, bool) or shots < 1):
        raise ConfigError(f"shots: must be a positive integer, got {shots!r}")

    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError(f"seed: must be an integer, got {seed!r}")

    seeds = doc.get("seeds", 20)
    if not isinstance(seeds, int) or isinstance(seeds, bool) or seeds < 1:
        raise ConfigError(f"seeds: must be a positive integer, got {seeds!r}")

    fmt = doc.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format: must be 'csv' or 'json', got {fmt!r}")

    output = doc.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError(f"output: must be a string path, got {output!r}")

    eigenvalues = {}
    for name in ("eigenvalues_a", "eigenvalues_b"):
        ev = doc.get(name)
        if ev is not None:
            if not isinstance(ev, list) or len(ev) != d:
                raise ConfigError(f"{name}: must be a list of {d} numbers")
            try:
                ev = [float(x) for x in ev]
            except (TypeError, ValueError):
                raise ConfigError(f"{name}: must be a list of {d} numbers")
        eigenvalues[name] = ev

    state = _check_state_spec(doc["state"], d)
    basis_a = _check_basis_spec(doc["basis_a"], d, "basis_a")
    basis_b = _check_basis_spec(doc["basis_b"], d, "basis_b")

    return ExperimentConfig(
        dimension=d,
        state=state,
        basis_a=basis_a,
        basis_b=basis_b,
        theta=thetas,
        phi=phis,
        seed=seed,
        shots=shots,
        seeds=seeds,
        eigenvalues_a=eigenvalues["eigenvalues_a"],
        eigenvalues_b=eigenvalues["eigenvalues_b"],
        format=fmt,
        output=output,
    )


def load_config(path) -> ExperimentConfig:
    """Read and parse a config file, keeping line information for syntax errors."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        return parse_config(doc)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _check_state_spec(spec, d: int):
    if isinstance(spec, str):
        if spec in ("plus", "y-plus", "maximally-mixed"):
            if spec == "y-plus" and d != 2:
                raise ConfigError("state: preset 'y-plus' is defined for dimension 2 only")
            return spec
        m = re.fullmatch(r"computational-(\d+)", spec)
        if m:
            if int(m.group(1)) >= d:
                raise ConfigError(f"state: basis index {m.group(1)} outside 0..{d - 1}")
            return spec
        raise ConfigError(f"state: unknown preset {spec!r}")
    if isinstance(spec, dict):
        if set(spec) == {"random"}:
            inner = spec["random"]
            if not isinstance(inner, dict) or set(inner) != {"seed"} or not isinstance(inner["seed"], int):
                raise ConfigError('state: random form must be {"random": {"seed": n}}')
            return spec
        if set(spec) == {"re", "im"}:
            _check_matrix_arrays(spec, d, "state")
            return spec
        raise ConfigError("state: object form must have keys {re, im} or {random}")
    raise ConfigError(f"state: cannot interpret {spec!r}")


def _check_basis_spec(spec, d: int, field_name: str):
    if isinstance(spec, str):
        if spec in ("computational", "fourier"):
            return spec
        raise ConfigError(f"{field_name}: unknown preset {spec!r}")
    if isinstance(spec, dict):
        if set(spec) == {"random"}:
            inner = spec["random"]
            if not isinstance(inner, dict) or set(inner) != {"seed"} or not isinstance(inner["seed"], int):
                raise ConfigError(f'{field_name}: random form must be {{"random": {{"seed": n}}}}')
            return spec
        if set(spec) == {"columns"}:
            _check_matrix_arrays(spec["columns"], d, field_name)
            return spec
        raise ConfigError(f"{field_name}: object form must have keys {{columns}} or {{random}}")
    raise ConfigError(f"{field_name}: cannot interpret {spec!r}")


def _check_matrix_arrays(obj, d: int, field_name: str):
    if not isinstance(obj, dict) or set(obj) != {"re", "im"}:
        raise ConfigError(f"{field_name}: matrix form needs exactly the keys 're' and 'im'")
    for part in ("re", "im"):
        arr = obj[part]
        if (
            not isinstance(arr, list)
            or len(arr) != d
            or any(not isinstance(row, list) or len(row) != d for row in arr)
        ):
            raise ConfigError(f"{field_name}: '{part}' must be a {d} x {d} array")


def build_state(cfg: ExperimentConfig) -> DensityMatrix:
    spec, d = cfg.state, cfg.dimension
    try:
        if isinstance(spec, str):
            if spec == "maximally-mixed":
                return DensityMatrix(np.eye(d, dtype=complex) / d)
            if spec == "plus":
                psi = np.ones(d, dtype=complex) / math.sqrt(d)
                return DensityMatrix(np.outer(psi, psi.conj()))
            if spec == "y-plus":
                psi = np.array([1.0, 1.0j]) / math.sqrt(2.0)
                return DensityMatrix(np.outer(psi, psi.conj()))
            k = int(spec.split("-")[-1])
            m = np.zeros((d, d), dtype=complex)
            m[k, k] = 1.0
            return DensityMatrix(m)
        if "random" in spec:
            return random_pure_state(d, spec["random"]["seed"])
        return DensityMatrix(np.array(spec["re"], dtype=float) + 1j * np.array(spec["im"], dtype=float))
    except ValidationError as exc:
        raise ConfigError(f"state: {exc}") from exc


def build_observable(spec, d: int, eigenvalues, field_name: str) -> Observable:
    try:
        if isinstance(spec, str):
            if spec == "computational":
                return computational_basis(d, eigenvalues)
            return fourier_basis(d, eigenvalues)
        if "random" in spec:
            return random_basis(d, spec["random"]["seed"], eigenvalues)
        cols = spec["columns"]
        matrix = np.array(cols["re"], dtype=float) + 1j * np.array(cols["im"], dtype=float)
        return Observable(matrix, eigenvalues)
    except ValidationError as exc:
        raise ConfigError(f"{field_name}: {exc}") from exc


def build_pair(cfg: ExperimentConfig) -> ObservablePair:
    return ObservablePair(
        build_observable(cfg.basis_a, cfg.dimension, cfg.eigenvalues_a, "basis_a"),
        build_observable(cfg.basis_b, cfg.dimension, cfg.eigenvalues_b, "basis_b"),
    )
