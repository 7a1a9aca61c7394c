"""``itoalg`` command line: validate, represent, decompose, classify, seminorms,
simulate and report.

Exit codes: 0 success, 1 I/O or parse error, 2 axiom violations, 3 structural
error (no unit, noncommutative algebra, ...). Reports go to stdout as JSON
with sorted keys; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import builders
from .algebra import ItoAlgebraSpec, default_tol, validate
from .errors import ItoAlgebraError, ShapeError, StructuralError
from .io import dumps, spec_from_dict
from .representation import build_rep, convolve, quadruple
from .seminorms import boundedness_lower_bound, check_axioms, random_elements, seminorms
from .simulate import canonical_form, ito_table_check, mean_increment, sample_paths
from .structure import classify, decompose, decomposition_residuals

INNER_PRODUCT_NOTE = "<a|b>_+ = l(a* b)"


class InputError(Exception):
    """Unreadable or malformed input (exit code 1)."""


# --------------------------------------------------------------------------
# input


def _parse_json(text, source):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: {exc.msg} at line {exc.lineno}, column {exc.colno}")


def spec_from_builder(doc, tol=None) -> ItoAlgebraSpec:
    """Build a spec from ``{"builder": name, ...}``."""
    if not isinstance(doc, dict) or "builder" not in doc:
        raise ShapeError("builder document needs a 'builder' key")
    kind = doc["builder"]
    try:
        if kind == "newton":
            return builders.newton(tol=tol)
        if kind == "wiener":
            return builders.wiener(int(doc["d"]), tol=tol)
        if kind == "poisson":
            return builders.poisson(int(doc["d"]), tol=tol)
        if kind == "vacuum":
            m = int(doc["m"])
            alg = doc.get("algebra", "full")
            if isinstance(alg, str):
                inp = builders.VacuumInput.named(m, alg)
            else:
                inp = builders.VacuumInput(m, tuple(_complex_matrix(a) for a in alg))
            return builders.vacuum(inp, tol=tol)
        if kind == "thermal":
            k = int(doc["k"])
            rho = _complex_matrix(doc["rho"]) if "rho" in doc else np.eye(k) / k
            return builders.thermal(builders.ThermalInput(k, rho), tol=tol)
        if kind == "sum":
            parts = [spec_from_builder(p, tol=tol) for p in doc["parts"]]
            if not parts:
                raise ShapeError("sum needs at least one part")
            out = parts[0]
            for p in parts[1:]:
                out = builders.orthogonal_sum(out, p, tol=tol)
            return out
        if kind == "random":
            return builders.random_algebra(int(doc.get("seed", 0)), kind=doc.get("kind", "mixed"),
                                           tol=tol)
    except KeyError as exc:
        raise ShapeError(f"builder {kind!r} is missing field {exc}")
    raise ShapeError(f"unknown builder {kind!r}")


def _complex_matrix(rows):
    """Rows of numbers or of ``[re, im]`` pairs."""
    arr = np.array(rows, dtype=float)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim != 2:
        raise ShapeError("matrix must be a list of rows")
    return arr.astype(complex)


def load_input(args) -> ItoAlgebraSpec:
    if (args.builder is None) == (args.path is None):
        raise InputError("give exactly one of --builder JSON or a spec path")
    if args.builder is not None:
        doc = _parse_json(args.builder, "--builder")
    else:
        try:
            with open(args.path) as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {args.path}: {exc.strerror}")
        doc = _parse_json(text, args.path)
    if isinstance(doc, dict) and "builder" in doc:
        return spec_from_builder(doc, tol=args.tol)
    return spec_from_dict(doc, tol=args.tol)


# --------------------------------------------------------------------------
# reports


def validate_report(spec):
    rep = validate(spec)
    return {
        "dim": spec.dim,
        "labels": list(spec.labels),
        "passed": rep.passed,
        "tol": spec.tol,
        "violations": [{"axiom": v.axiom, "name": v.name, "witness": list(v.witness),
                        "witness_labels": [spec.labels[i] for i in v.witness],
                        "residual": v.residual} for v in rep.violations],
    }


def represent_report(spec, rep=None):
    rep = build_rep(spec) if rep is None else rep
    quads = {}
    for label, a in zip(spec.labels, spec.basis_elements()):
        q = quadruple(rep, a)
        quads[label] = {"alpha": q.alpha, "ket": q.ket, "bra": q.bra, "op": q.op}
    worst = 0.0
    basis = spec.basis_elements()
    qs = [quadruple(rep, a) for a in basis]
    for i, a in enumerate(basis):
        for j, b in enumerate(basis):
            diff = (quadruple(rep, a * b) - convolve(qs[i], qs[j])).max_abs()
            worst = max(worst, diff)
    return {
        "rank": rep.rank,
        "gram_eigenvalues": rep.eigenvalues,
        "gns_residual": rep.gns_residual,
        "homomorphism_residual": worst,
        "quadruples": quads,
    }


def decompose_report(spec, rep=None, dec=None):
    rep = build_rep(spec) if rep is None else rep
    dec = decompose(spec, rep) if dec is None else dec
    parts = {}
    for i, label in enumerate(spec.labels):
        parts[label] = {"alpha": dec.newton_coeff[i], "b": dec.brownian[i], "c": dec.levy[i]}
    return {
        "idempotent": dec.idempotent.coords if dec.idempotent is not None else None,
        "brownian_basis": dec.brownian_basis.T,
        "levy_basis": dec.levy_basis.T,
        "components": parts,
        "residuals": decomposition_residuals(dec),
        "inner_product": INNER_PRODUCT_NOTE,
    }


def classify_report(spec, rep=None, dec=None):
    c = classify(spec, dec=dec, rep=rep)
    return {
        "kind": c.kind,
        "is_newton": c.is_newton,
        "is_wiener": c.is_wiener,
        "is_poisson": c.is_poisson,
        "is_mixed": c.is_mixed,
        "is_vacuum": c.is_vacuum,
        "is_thermal": c.is_thermal,
        "is_commutative": c.is_commutative,
        "brownian_dim": c.brownian_dim,
        "levy_dim": c.levy_dim,
    }


def seminorms_report(spec, rep=None, seed=0, samples=200, trials=2000):
    rep = build_rep(spec) if rep is None else rep
    per = {}
    for i, (label, a) in enumerate(zip(spec.labels, spec.basis_elements())):
        op, plus, minus, pm = seminorms(rep, a)
        per[label] = {"operator": op, "plus": plus, "minus": minus, "plus_minus": pm,
                      "boundedness_lower_bound": boundedness_lower_bound(
                          rep, a, trials=trials, seed=seed + i)}
    ax = check_axioms(rep, random_elements(spec, samples, seed))
    return {"basis": per, "axiom_residuals": ax.residuals, "max_violation": ax.max_violation,
            "samples": samples, "seed": seed}


def _parse_pairs(items, n):
    pairs = []
    for item in items or []:
        try:
            i, j = (int(x) for x in item.split(","))
        except ValueError:
            raise InputError(f"--pairs expects 'i,j', got {item!r}")
        if not (0 <= i < n and 0 <= j < n):
            raise InputError(f"pair {item!r} out of range for dimension {n}")
        pairs.append((i, j))
    return pairs


def simulate_report(spec, args):
    form = canonical_form(spec, decompose(spec))
    paths = sample_paths(form, args.t, args.mesh, args.paths, args.seed)
    pairs = _parse_pairs(args.pairs, spec.dim) or [(i, i) for i in range(spec.dim)]
    checks = {}
    rows = []
    for i, j in pairs:
        chk = ito_table_check(spec, paths, (i, j))
        checks[f"{spec.labels[i]},{spec.labels[j]}"] = {
            "pair": [i, j], "mean": chk.mean, "stderr": chk.stderr,
            "expected_mean": chk.expected_mean, "rms_error": chk.rms_error,
            "max_error": chk.max_error,
        }
        for p, real, pred in zip(paths, chk.realized, chk.predicted):
            rows.append([p.path_index, i, j, real.real, real.imag, pred.real, pred.imag])
    means = {}
    for i, label in enumerate(spec.labels):
        m = mean_increment(spec, paths, i)
        means[label] = {"mean": m.mean, "stderr": m.stderr, "expected": m.expected,
                        "within_3_stderr": m.within()}
    if args.csv:
        try:
            with open(args.csv, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["path", "i", "j", "realized_re", "realized_im",
                            "predicted_re", "predicted_im"])
                for row in rows:
                    w.writerow([row[0], row[1], row[2]] + [repr(float(x)) for x in row[3:]])
        except OSError as exc:
            raise InputError(f"cannot write {args.csv}: {exc.strerror}")
    return {
        "seed": args.seed, "horizon": args.t, "mesh": args.mesh, "paths": args.paths,
        "wiener_directions": form.n_wiener, "poisson_directions": form.n_poisson,
        "rates": form.rates, "covariation": checks, "mean_increments": means,
    }


def full_report(spec, args):
    rep = build_rep(spec)
    dec = decompose(spec, rep)
    return {
        "validate": validate_report(spec),
        "represent": represent_report(spec, rep),
        "decompose": decompose_report(spec, rep, dec),
        "classify": classify_report(spec, rep, dec),
        "seminorms": seminorms_report(spec, rep, seed=args.seed or 0),
    }


# --------------------------------------------------------------------------
# entry points


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="itoalg", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("validate", "represent", "decompose", "classify", "seminorms", "simulate",
                 "report"):
        p = sub.add_parser(name)
        p.add_argument("path", nargs="?", help="spec or builder JSON file")
        p.add_argument("--builder", help="inline builder or spec JSON")
        p.add_argument("--tol", type=float, default=None,
                       help="tolerance (default: $ITOALG_TOL or 1e-9)")
        p.add_argument("--format", choices=("json", "pretty"), default="json")
        p.add_argument("--seed", type=int, default=None)
        if name == "simulate":
            p.add_argument("--t", type=float, default=1.0, help="horizon")
            p.add_argument("--mesh", type=float, default=2.0 ** -10)
            p.add_argument("--paths", type=int, default=100)
            p.add_argument("--pairs", nargs="+", help="basis index pairs 'i,j'")
            p.add_argument("--csv", help="per-path covariation table")
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    if args.tol is None:
        try:
            args.tol = default_tol()
        except ValueError as exc:
            print(f"error: {exc}", file=stderr)
            return 1
    if args.command == "simulate" and args.seed is None:
        print("error: simulate requires --seed", file=stderr)
        return 1

    def emit(obj):
        stdout.write(dumps(obj, indent=2 if args.format == "pretty" else None) + "\n")

    try:
        spec = load_input(args)
        checked = validate_report(spec)
        if not checked["passed"]:
            emit(checked if args.command == "validate" else {"validate": checked})
            for v in checked["violations"]:
                print(f"{v['name']}: witness {v['witness_labels']}, residual {v['residual']:.3g}",
                      file=stderr)
            return 2
        if args.command == "validate":
            out = checked
        elif args.command == "represent":
            out = represent_report(spec)
        elif args.command == "decompose":
            out = decompose_report(spec)
        elif args.command == "classify":
            out = classify_report(spec)
        elif args.command == "seminorms":
            out = seminorms_report(spec, seed=args.seed or 0)
        elif args.command == "simulate":
            out = simulate_report(spec, args)
        else:
            out = full_report(spec, args)
    except InputError as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    except StructuralError as exc:
        print(f"{type(exc).__name__}: {exc}", file=stderr)
        return 3
    except (ItoAlgebraError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=stderr)
        return 1
    emit(out)
    return 0


def main():
    sys.exit(run())
