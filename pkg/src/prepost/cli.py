"""Command-line front end: scenario files in, probability tables out.

Subcommands::

    prepost run SCENARIO        evaluate every case (or the sweep) of a scenario
    prepost sweep SCENARIO      same, but the scenario must define a sweep
    prepost oracle SCENARIO     pointer simulation next to the generalized ABL rule
    prepost zeeman [...]        hydrogen paradox scenario built from flags
    prepost validate SCENARIO   schema check only

Exit codes: 0 success, 2 input error, 3 incompatible pre/post-selection,
4 numerical failure (completeness check blown or eigensolver diverged).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import measurement as msr
from .errors import ConvergenceError, IncompatibleSelection, IncompleteMeasurement, PrePostError
from .hilbert import (
    LabelGroup,
    SpectralObservable,
    State,
    diagonal_observable,
    hermitian_eigendecomposition,
    make_state,
    projector_from_states,
    spectral_from_eigenpairs,
)
from .pointer import PointerModel, pointer_oracle
from .twotime import TwoTimeEnsemble, boundary_states_at
from .zeeman import HydrogenBasis, build_spectrum

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INCOMPATIBLE = 3
EXIT_NUMERICAL = 4

SCHEMA_VERSION = 1
PARAMETERS = ("epsilon", "delta", "delta_e")

_number = {"type": "number"}
_amplitude = {"oneOf": [_number, {"type": "array", "items": _number, "minItems": 2, "maxItems": 2}]}
_state = {"type": "object", "additionalProperties": _amplitude, "minProperties": 1}
_matrix = {"type": "array", "minItems": 1, "items": {"type": "array", "items": _amplitude}}
_params = {
    "type": "object",
    "properties": {p: _number for p in PARAMETERS},
    "additionalProperties": False,
}

SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "pre", "post", "observable"],
    "additionalProperties": False,
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "description": {"type": "string"},
        "basis": {"oneOf": [
            {"type": "integer", "minimum": 1},
            {"type": "array", "items": {"type": "string"}, "minItems": 1},
        ]},
        "pre": _state,
        "post": _state,
        "observable": {
            "type": "object",
            "minProperties": 1,
            "maxProperties": 2,
            "additionalProperties": False,
            "properties": {
                "matrix": _matrix,
                "diagonal": {"type": "array", "items": _number, "minItems": 1},
                "branches": {"type": "array", "minItems": 1, "items": {
                    "type": "object",
                    "required": ["value", "states"],
                    "additionalProperties": False,
                    "properties": {"value": _number, "states": {"type": "array", "items": _state}},
                }},
                "zeeman": {
                    "type": "object",
                    "required": ["n_max"],
                    "additionalProperties": False,
                    "properties": {"n_max": {"type": "integer", "minimum": 1}},
                },
                "perturbation": {"anyOf": [{"type": "array", "items": _number}, _matrix]},
            },
        },
        "parameters": _params,
        "measurement": {
            "type": "object",
            "required": ["kind"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["projective", "gaussian"]},
                "exponent": {"enum": ["half", "quarter"]},
            },
        },
        "convention": {"enum": list(msr.CONVENTIONS)},
        "cases": {"type": "array", "minItems": 1, "items": _params},
        "sweep": {
            "type": "object",
            "required": ["parameter", "grid", "start", "stop", "count"],
            "additionalProperties": False,
            "properties": {
                "parameter": {"enum": list(PARAMETERS)},
                "grid": {"enum": ["linear", "geometric"]},
                "start": _number,
                "stop": _number,
                "count": {"type": "integer", "minimum": 1},
            },
        },
        "oracle": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "sigma": {"type": "number", "exclusiveMinimum": 0},
                "theta": _number,
                "grid_points": {"type": "integer", "minimum": 2},
            },
        },
        "evolution": {
            "type": "object",
            "required": ["t_i", "t_f", "t"],
            "additionalProperties": False,
            "properties": {"hamiltonian": _matrix, "t_i": _number, "t_f": _number, "t": _number},
        },
    },
}


class ScenarioError(PrePostError, ValueError):
    """Input that cannot be turned into a runnable scenario (exit code 2)."""


class ParseError(ScenarioError):
    pass


class ValidationError(ScenarioError):
    pass


def _complex(v) -> complex:
    return complex(v[0], v[1]) if isinstance(v, list) else complex(v)


def _hydrogen_label(key: str) -> tuple:
    try:
        n, l, m = (int(x) for x in key.split(","))
    except ValueError:
        raise ValidationError(f"hydrogen labels look like 'n,l,m', got {key!r}") from None
    return (n, l, m)


def format_label(label) -> str:
    if isinstance(label, LabelGroup):
        keys = list(label)
        if keys and all(isinstance(k, tuple) and len(k) == 2 for k in keys):
            n = keys[0][0]
            if all(k[0] == n for k in keys) and sorted(k[1] for k in keys) == list(range(1 - n, n)):
                return f"n={n}"
        return "+".join(format_label(k) for k in keys)
    if isinstance(label, tuple) and len(label) == 2:
        return f"n={label[0]},m={label[1]}"
    if isinstance(label, float):
        return f"{label:.12g}"
    return str(label)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


@dataclass
class Scenario:
    """A validated scenario document."""

    doc: dict
    source: str = "<memory>"
    labels: tuple = field(init=False)
    kind: str = field(init=False)
    hydrogen: HydrogenBasis | None = field(init=False, default=None)

    def __post_init__(self):
        try:
            jsonschema.validate(self.doc, SCENARIO_SCHEMA)
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ValidationError(f"{where}: {exc.message}") from None
        self._check_semantics()

    @property
    def name(self) -> str:
        return self.doc.get("name", Path(self.source).stem)

    @property
    def convention(self) -> str:
        return self.doc.get("convention", msr.KRAUS)

    @property
    def measurement_kind(self) -> str:
        return self.doc.get("measurement", {"kind": "projective"})["kind"]

    @property
    def exponent(self) -> str:
        return self.doc.get("measurement", {}).get("exponent", "half")

    def _check_semantics(self) -> None:
        d = self.doc
        obs = d["observable"]
        kinds = [k for k in ("matrix", "diagonal", "branches", "zeeman") if k in obs]
        if len(kinds) != 1:
            raise ValidationError("observable: exactly one of matrix, diagonal, branches, zeeman is required")
        self.kind = kinds[0]
        if "perturbation" in obs and self.kind not in ("matrix", "diagonal"):
            raise ValidationError("observable: perturbation only applies to matrix or diagonal observables")
        if self.kind == "zeeman":
            if "basis" in d:
                raise ValidationError("basis: a zeeman observable fixes the hydrogen basis; omit 'basis'")
            self.hydrogen = HydrogenBasis(obs["zeeman"]["n_max"])
            self.labels = self.hydrogen.states
        else:
            basis = d.get("basis")
            if basis is None:
                raise ValidationError("basis: required unless the observable is zeeman")
            self.labels = tuple(str(i) for i in range(basis)) if isinstance(basis, int) else tuple(basis)
            if len(set(self.labels)) != len(self.labels):
                raise ValidationError("basis: labels must be unique")
        dim = len(self.labels)
        if self.kind == "diagonal" and len(obs["diagonal"]) != dim:
            raise ValidationError(f"observable/diagonal: expected {dim} entries")
        if self.kind == "matrix" and _shape(obs["matrix"]) != (dim, dim):
            raise ValidationError(f"observable/matrix: expected a {dim}x{dim} matrix")
        if "perturbation" in obs:
            expect = (dim,) if self.kind == "diagonal" else (dim, dim)
            if _shape(obs["perturbation"]) != expect:
                raise ValidationError(f"observable/perturbation: expected shape {expect}")
        for key in ("pre", "post"):
            self.state(key)
        if "evolution" in d:
            ev = d["evolution"]
            if "hamiltonian" in ev and _shape(ev["hamiltonian"]) != (dim, dim):
                raise ValidationError(f"evolution/hamiltonian: expected a {dim}x{dim} matrix")
            if not ev["t_i"] < ev["t_f"]:
                raise ValidationError("evolution: t_i must be smaller than t_f")
            if not ev["t_i"] <= ev["t"] <= ev["t_f"]:
                raise ValidationError("evolution: t must lie in [t_i, t_f]")
        used = self.used_parameters()
        if "sweep" in d:
            sw = d["sweep"]
            if sw["parameter"] not in used:
                raise ValidationError(f"sweep/parameter: {sw['parameter']!r} does not enter this scenario")
            if sw["grid"] == "geometric" and not (sw["start"] > 0 and sw["stop"] > 0):
                raise ValidationError("sweep: geometric grids need positive bounds")
            if "cases" in d:
                raise ValidationError("cases and sweep are mutually exclusive")
        for i, case in enumerate(d.get("cases", [])):
            extra = set(case) - used
            if extra:
                raise ValidationError(f"cases/{i}: parameters {sorted(extra)} do not enter this scenario")
        for point in self.points():
            missing = used - set(point)
            if self.kind == "zeeman" and "delta_e" in missing:
                raise ValidationError("parameters: delta_e is required for a zeeman observable")
            if "epsilon" in missing:
                raise ValidationError("parameters: epsilon is required when a perturbation is given")

    def used_parameters(self) -> set:
        used = set()
        obs = self.doc["observable"]
        if "perturbation" in obs:
            used.add("epsilon")
        if self.kind == "zeeman":
            used.add("delta_e")
        if self.measurement_kind == "gaussian" or "oracle" in self.doc:
            used.add("delta")
        return used

    def points(self) -> list[dict]:
        base = dict(self.doc.get("parameters", {}))
        if "sweep" in self.doc:
            sw = self.doc["sweep"]
            if sw["grid"] == "geometric":
                values = np.geomspace(sw["start"], sw["stop"], sw["count"])
            else:
                values = np.linspace(sw["start"], sw["stop"], sw["count"])
            return [{**base, sw["parameter"]: float(v)} for v in values]
        if "cases" in self.doc:
            return [{**base, **case} for case in self.doc["cases"]]
        return [base]

    def row_keys(self) -> list[str]:
        if "sweep" in self.doc:
            return [self.doc["sweep"]["parameter"]]
        keys = []
        for case in self.doc.get("cases", []):
            keys += [k for k in case if k not in keys]
        return keys

    def state(self, key: str) -> State:
        spec = self.doc[key]
        return self._parse_state(spec, key)

    def _parse_state(self, spec: dict, where: str) -> State:
        comps = {}
        for lab, amp in spec.items():
            label = _hydrogen_label(lab) if self.hydrogen else lab
            comps[label] = _complex(amp)
        try:
            if self.hydrogen:
                return self.hydrogen.state(comps)
            unknown = set(comps) - set(self.labels)
            if unknown:
                raise ValidationError(f"{where}: labels {sorted(unknown)} are not in the basis")
            return make_state(self.labels, [comps.get(lab, 0.0) for lab in self.labels])
        except ScenarioError:
            raise
        except PrePostError as exc:
            raise ValidationError(f"{where}: {exc}") from None

    def observable(self, params: dict) -> SpectralObservable:
        obs = self.doc["observable"]
        eps = params.get("epsilon", 0.0)
        if self.kind == "zeeman":
            return build_spectrum(self.hydrogen.n_max, params["delta_e"]).observable()
        if self.kind == "diagonal":
            values = np.asarray(obs["diagonal"], dtype=float)
            if "perturbation" in obs:
                values = values + eps * np.asarray(obs["perturbation"], dtype=float)
            return diagonal_observable(values, self.labels, tol=0.0)
        if self.kind == "matrix":
            m = np.array([[_complex(v) for v in row] for row in obs["matrix"]])
            if "perturbation" in obs:
                m = m + eps * np.array([[_complex(v) for v in row] for row in obs["perturbation"]])
            return hermitian_eigendecomposition(m)
        vals, vecs, labs = [], [], []
        for i, br in enumerate(obs["branches"]):
            states = [self._parse_state(s, f"observable/branches/{i}") for s in br["states"]]
            proj = projector_from_states(states, dimension=len(self.labels))
            w, v = np.linalg.eigh(proj)
            for j in np.flatnonzero(w > 0.5):
                vals.append(float(br["value"]))
                vecs.append(v[:, j])
        if len(vecs) != len(self.labels):
            raise ValidationError("observable/branches: branch states must span the whole basis")
        return spectral_from_eigenpairs(vals, np.array(vecs).T, tol=0.0)

    def boundary_states(self) -> tuple[State, State]:
        pre, post = self.state("pre"), self.state("post")
        ev = self.doc.get("evolution")
        if ev is None:
            return pre, post
        ham = None
        if "hamiltonian" in ev:
            ham = np.array([[_complex(v) for v in row] for row in ev["hamiltonian"]])
        ens = TwoTimeEnsemble(pre, post, ev["t_i"], ev["t_f"], ham)
        return boundary_states_at(ens, ev["t"])


def _shape(nested) -> tuple:
    """(rows, cols) of a matrix spec, or (n,) of a flat list of numbers."""
    if all(isinstance(x, (int, float)) for x in nested):
        return (len(nested),)
    if all(isinstance(row, list) for row in nested):
        cols = {len(row) for row in nested}
        return (len(nested), cols.pop() if len(cols) == 1 else -1)
    return (-1,)


def _resolve(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    bundled = resources.files("prepost") / "scenarios" / path
    if bundled.is_file():
        return Path(str(bundled))
    raise ParseError(f"{path}: no such file (and no bundled scenario of that name)")


def load_scenario(path: str) -> Scenario:
    p = _resolve(path)
    raw = p.read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{p}: not UTF-8 at byte {exc.start}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise ParseError(
            f"{p}: invalid JSON at byte {offset} (line {exc.lineno}, column {exc.colno}): {exc.msg}"
        ) from None
    return Scenario(doc, str(p))


@dataclass
class Options:
    convention: str | None = None
    exponent: str | None = None
    tol: float = msr.COMPLETENESS_TOL


def evaluate(scn: Scenario, params: dict, opts: Options = Options()) -> msr.OutcomeDistribution:
    """Outcome distribution of one scenario point."""
    pre, post = scn.boundary_states()
    obs = scn.observable(params)
    convention = opts.convention or scn.convention
    if scn.measurement_kind == "projective":
        return msr.abl(pre, post, obs)
    if "delta" not in params:
        raise ValidationError("parameters: delta is required for a gaussian measurement")
    meas = msr.gaussian_resolution_measurement(obs, params["delta"], opts.exponent or scn.exponent, tol=opts.tol)
    return msr.abl_generalized(pre, post, meas, convention)


@dataclass
class Row:
    params: dict
    dist: msr.OutcomeDistribution


@dataclass
class Report:
    scenario: Scenario
    rows: list
    row_keys: list

    def columns(self) -> list[str]:
        cols = []
        for r in self.rows:
            cols += [c for c in map(format_label, r.dist.labels) if c not in cols]
        return cols

    def table(self) -> str:
        out = [f"# {self.scenario.name}"]
        for r in self.rows:
            head = ", ".join(f"{k}={_fmt(r.params[k])}" for k in self.row_keys if k in r.params)
            out.append(f"[{head}]" if head else "[]")
            labels = [format_label(l) for l in r.dist.labels]
            width = max(len("outcome"), *map(len, labels))
            out.append(f"  {'outcome':<{width}}  {'value':>19}  probability")
            values = r.dist.values or (None,) * len(labels)
            for lab, v, p in zip(labels, values, r.dist.probabilities):
                vs = "" if v is None else _fmt(v)
                out.append(f"  {lab:<{width}}  {vs:>19}  {_fmt(p)}")
        return "\n".join(out) + "\n"

    def csv(self) -> str:
        cols = self.columns()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.row_keys + cols)
        for r in self.rows:
            probs = dict(zip(map(format_label, r.dist.labels), r.dist.probabilities))
            w.writerow(
                [_fmt(r.params[k]) if k in r.params else "" for k in self.row_keys]
                + [_fmt(probs[c]) if c in probs else "" for c in cols]
            )
        return buf.getvalue()

    def json(self) -> str:
        doc = {
            "schema": SCHEMA_VERSION,
            "name": self.scenario.name,
            "rows": [
                {
                    "parameters": {k: r.params[k] for k in sorted(r.params)},
                    "outcomes": [
                        {"label": format_label(l), "value": v, "probability": float(p)}
                        for l, v, p in zip(r.dist.labels, r.dist.values or (None,) * len(r.dist), r.dist.probabilities)
                    ],
                }
                for r in self.rows
            ],
        }
        return json.dumps(doc, indent=2) + "\n"


def run_scenario(scn: Scenario | str, opts: Options = Options()) -> Report:
    if not isinstance(scn, Scenario):
        scn = load_scenario(scn)
    # Points are independent; evaluated in order so rows follow the sweep index.
    rows = [Row(p, evaluate(scn, p, opts)) for p in scn.points()]
    return Report(scn, rows, scn.row_keys())


@dataclass
class OracleRow:
    params: dict
    labels: tuple
    oracle: np.ndarray
    povm: np.ndarray

    @property
    def discrepancy(self) -> float:
        return float(np.max(np.abs(self.oracle - self.povm)))


@dataclass
class OracleReport:
    scenario: Scenario
    rows: list
    row_keys: list

    @property
    def max_discrepancy(self) -> float:
        return max(r.discrepancy for r in self.rows)

    def table(self) -> str:
        out = [f"# {self.scenario.name}: pointer oracle vs generalized ABL (kraus)"]
        for r in self.rows:
            head = ", ".join(f"{k}={_fmt(r.params[k])}" for k in self.row_keys if k in r.params)
            out.append(f"[{head}]" if head else "[]")
            labels = [format_label(l) for l in r.labels]
            width = max(len("outcome"), *map(len, labels))
            out.append(f"  {'outcome':<{width}}  {'oracle':>18}  {'povm':>18}  |diff|")
            for lab, a, b in zip(labels, r.oracle, r.povm):
                out.append(f"  {lab:<{width}}  {_fmt(a):>18}  {_fmt(b):>18}  {_fmt(abs(a - b))}")
        out.append(f"max discrepancy: {_fmt(self.max_discrepancy)}")
        return "\n".join(out) + "\n"

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        labels = [format_label(l) for l in self.rows[0].labels]
        w.writerow(self.row_keys + [f"oracle:{l}" for l in labels] + [f"povm:{l}" for l in labels]
                   + ["max_discrepancy"])
        for r in self.rows:
            w.writerow([_fmt(r.params[k]) for k in self.row_keys]
                       + [_fmt(x) for x in r.oracle] + [_fmt(x) for x in r.povm] + [_fmt(r.discrepancy)])
        return buf.getvalue()

    def json(self) -> str:
        doc = {
            "schema": SCHEMA_VERSION,
            "name": self.scenario.name,
            "max_discrepancy": self.max_discrepancy,
            "rows": [
                {
                    "parameters": {k: r.params[k] for k in sorted(r.params)},
                    "labels": [format_label(l) for l in r.labels],
                    "oracle": r.oracle.tolist(),
                    "povm": r.povm.tolist(),
                    "discrepancy": r.discrepancy,
                }
                for r in self.rows
            ],
        }
        return json.dumps(doc, indent=2) + "\n"


def compare_oracle(scn: Scenario | str, opts: Options = Options()) -> OracleReport:
    """Pointer simulation against the Gaussian-resolution ABL rule with delta = sigma/theta.

    The generalized rule uses the Kraus convention and quarter-variance
    weights unless ``opts`` overrides the exponent.
    """
    if not isinstance(scn, Scenario):
        scn = load_scenario(scn)
    spec = scn.doc.get("oracle")
    if spec is None:
        raise ValidationError("oracle: the scenario has no oracle section")
    pre, post = scn.boundary_states()
    theta = spec.get("theta", 1.0)
    rows = []
    for params in scn.points():
        obs = scn.observable(params)
        sigma = spec.get("sigma")
        if sigma is None:
            if "delta" not in params:
                raise ValidationError("oracle: give sigma or a delta parameter")
            sigma = abs(theta) * params["delta"]
        model = PointerModel.for_observable(obs, sigma, theta)
        if "grid_points" in spec:
            model = PointerModel(sigma, theta, model.grid_min, model.grid_max, spec["grid_points"])
        oracle = pointer_oracle(pre, post, obs, sigma, theta, model=model)
        meas = msr.gaussian_resolution_measurement(obs, sigma / abs(theta), opts.exponent or msr.QUARTER_VARIANCE,
                                                   tol=opts.tol)
        povm = msr.abl_generalized(pre, post, meas, opts.convention or msr.KRAUS)
        rows.append(OracleRow({**params, "sigma": sigma}, obs.labels, oracle.probabilities, povm.probabilities))
    keys = scn.row_keys()
    if "sigma" not in keys:
        keys = keys + ["sigma"]
    return OracleReport(scn, rows, keys)


def zeeman_scenario(n_max: int = 2, delta_e: float = 1e-4, delta: float | None = None,
                    sweep_count: int = 61, sweep_decades: float = 2.0) -> dict:
    """Hydrogen paradox scenario document.

    Without ``delta`` the document sweeps the resolution geometrically from
    ``delta_e / 10**decades`` to ``delta_e * 10**decades``.
    """
    doc = {
        "schema": SCHEMA_VERSION,
        "name": "hydrogen-paradox",
        "pre": {"1,0,0": 1, "2,1,1": 1, "2,1,-1": 1},
        "post": {"1,0,0": 1, "2,1,1": 1, "2,1,-1": -1},
        "observable": {"zeeman": {"n_max": n_max}},
        "parameters": {"delta_e": delta_e},
        "measurement": {"kind": "gaussian", "exponent": "half"},
    }
    if delta is not None:
        doc["parameters"]["delta"] = delta
    else:
        span = 10.0 ** sweep_decades
        doc["sweep"] = {"parameter": "delta", "grid": "geometric",
                        "start": delta_e / span, "stop": delta_e * span, "count": sweep_count}
    return doc


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--csv", metavar="PATH", help="write machine-readable CSV")
    p.add_argument("--json", metavar="PATH", help="write machine-readable JSON")
    p.add_argument("--convention", choices=msr.CONVENTIONS, help="generalized ABL convention")
    p.add_argument("--exponent", choices=("half", "quarter"), help="Gaussian weight convention")
    p.add_argument("--tol", type=float, default=msr.COMPLETENESS_TOL,
                   help="completeness tolerance for generalized measurements")
    p.add_argument("--quiet", action="store_true", help="suppress the table on standard output")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="prepost", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in [("run", "evaluate a scenario"),
                        ("sweep", "evaluate a scenario that defines a sweep"),
                        ("oracle", "compare the pointer oracle with the generalized ABL rule")]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("scenario", help="scenario JSON file or bundled scenario name")
        _common(p)
    p = sub.add_parser("zeeman", help="hydrogen paradox scenario from flags")
    p.add_argument("--n-max", type=int, default=2)
    p.add_argument("--delta-e", type=float, default=1e-4, help="Zeeman shift per unit m (eV)")
    p.add_argument("--delta", type=float, help="detector resolution (eV); omit to sweep")
    p.add_argument("--sweep-count", type=int, default=61)
    p.add_argument("--sweep-decades", type=float, default=2.0)
    _common(p)
    p = sub.add_parser("validate", help="schema check only")
    p.add_argument("scenario")
    return ap


def _emit(report, args) -> None:
    if args.csv:
        Path(args.csv).write_text(report.csv(), encoding="utf-8")
    if args.json:
        Path(args.json).write_text(report.json(), encoding="utf-8")
    if not args.quiet:
        sys.stdout.write(report.table())


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            scn = load_scenario(args.scenario)
            print(f"ok: {scn.name} ({len(scn.points())} point(s))")
            return EXIT_OK
        opts = Options(args.convention, args.exponent, args.tol)
        if args.command == "zeeman":
            scn = Scenario(zeeman_scenario(args.n_max, args.delta_e, args.delta,
                                           args.sweep_count, args.sweep_decades))
            _emit(run_scenario(scn, opts), args)
            return EXIT_OK
        scn = load_scenario(args.scenario)
        if args.command == "sweep" and "sweep" not in scn.doc:
            raise ValidationError("sweep: the scenario defines no sweep")
        report = compare_oracle(scn, opts) if args.command == "oracle" else run_scenario(scn, opts)
        _emit(report, args)
        return EXIT_OK
    except IncompatibleSelection as exc:
        print(f"error: incompatible pre/post-selection: {exc}", file=sys.stderr)
        return EXIT_INCOMPATIBLE
    except (IncompleteMeasurement, ConvergenceError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (PrePostError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
