"""Batch experiment runner.

    gaudin-opers {spectrum,cyclicity,rigidity,limit,verify} [--config FILE] [--seed N] [--tol X] [--out DIR]

Each run writes ``results.json`` and ``<kind>.csv`` (deterministic given the
seed) plus ``manifest.json`` (inputs, versions, seed, timings) into ``--out``.
Exit codes: 0 pass, 1 configuration error, 2 numerical or exact gate failure.
"""
from __future__ import annotations

import argparse
import itertools
import json
import platform
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
import sympy
import yaml

from . import __version__
from .exact import commutator, parse_scalar
from .gaudin.family import inhomogeneous_hamiltonians, mu_term
from .gaudin.classical import classical_mf_generators, poisson_bracket
from .gaudin.shift import quantum_mf_family, symbol_check
from .gaudin.spectrum import (
    SpectrumError,
    cyclic_span_dimension,
    joint_spectrum,
    rescaling_limit_check,
    simple_spectrum_search,
)
from .lie.elements import principal_nilpotent, random_cartan
from .lie.modules import TensorModule, build_irreducible, casimir, principal_grading_character
from .lie.roots import Weight, build_root_system, parse_type, q_weyl_dimension
from .monodromy.rigidity import DEFAULT_GRID, rigidity_scan
from .opers import build_oper_space, gorenstein_series_check, sl2_oper_monodromy, sl2_spectrum_to_oper
from .serialize import dumps, spectrum_to_dict, write_csv, write_json

__all__ = ["ExperimentConfig", "ConfigError", "load_config", "run", "main"]

KINDS = ("spectrum", "cyclicity", "rigidity", "limit", "verify")
DIGITS = 10


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    kind: str
    algebra: str = "A1"
    weights: list = field(default_factory=list)
    z: list = field(default_factory=list)
    mu: dict = field(default_factory=lambda: {"kind": "random"})
    tol: float | None = None
    seed: int | None = None
    out: str = "results"
    grid: list = field(default_factory=list)
    lam: str = "1"
    s_values: list = field(default_factory=lambda: [10, 100, 1000])
    max_resamples: int = 3
    margin: float = 1e-2


_DEFAULTS = {
    "spectrum": {"algebra": "A1", "weights": [[3]], "tol": 1e-6},
    "cyclicity": {"algebra": "A1", "weights": [[k] for k in range(7)], "tol": 0.0},
    "rigidity": {"lam": "1", "tol": 1e-6},
    "limit": {"algebra": "A1", "weights": [[1], [1]], "z": ["0", "1"], "mu": {"kind": "explicit", "value": [["1", "0"], ["0", "-1"]]}, "tol": 1e-2},
    "verify": {"algebra": "A2", "tol": 0.0},
}


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.{DIGITS}g}"
    if isinstance(x, (complex, np.complexfloating)):
        c = complex(x)
        return f"{c.real:.{DIGITS}g}{c.imag:+.{DIGITS}g}j"
    return str(x)


def _scalar(v):
    if isinstance(v, str):
        return parse_scalar(v.replace("j", "i"))
    if isinstance(v, float):
        return sympy.nsimplify(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return sympy.nsimplify(v[0]) + sympy.I * sympy.nsimplify(v[1])
    return sympy.sympify(v)


def load_config(kind: str, path: str | None, overrides: dict) -> ExperimentConfig:
    """Merge defaults, the YAML/JSON file and command-line overrides, then validate."""
    if kind not in KINDS:
        raise ConfigError(f"unknown experiment kind {kind!r}")
    data = dict(_DEFAULTS[kind])
    if path:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file {path} does not exist")
        loaded = yaml.safe_load(p.read_text()) or {}
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a mapping")
        if loaded.get("kind", kind) not in (kind, "identity-suite" if kind == "verify" else kind):
            raise ConfigError(f"config kind {loaded['kind']!r} does not match subcommand {kind!r}")
        loaded.pop("kind", None)
        data.update(loaded)
    data.update({k: v for k, v in overrides.items() if v is not None})
    known = set(ExperimentConfig.__dataclass_fields__)
    extra = set(data) - known
    if extra:
        raise ConfigError(f"unknown config keys: {sorted(extra)}")
    cfg = ExperimentConfig(kind=kind, **data)
    validate(cfg)
    return cfg


def validate(cfg: ExperimentConfig) -> None:
    try:
        letter, rank = parse_type(cfg.algebra)
    except ValueError as exc:
        raise ConfigError(f"algebra: {exc}") from None
    if cfg.kind in ("spectrum", "cyclicity", "limit") and letter != "A":
        raise ConfigError("precondition violated: matrix modules exist only for A-series algebras")
    if cfg.tol is not None and cfg.tol < 0:
        raise ConfigError("tol must be nonnegative")
    for w in cfg.weights:
        wt = Weight(w)
        if len(wt) != rank:
            raise ConfigError(f"weight {w} has {len(wt)} coordinates, {cfg.algebra} has rank {rank}")
        if not (wt.is_integral and wt.is_dominant):
            raise ConfigError(f"precondition violated: weight {w} is not dominant integral")
    if cfg.kind in ("spectrum", "limit"):
        if not cfg.weights:
            raise ConfigError("at least one weight is required")
        z = cfg.z or (["0"] if len(cfg.weights) == 1 else [])
        if len(z) != len(cfg.weights):
            raise ConfigError("one point z_i per weight is required")
        pts = [_scalar(x) for x in z]
        if len(set(pts)) != len(pts):
            raise ConfigError("precondition violated: points z_i must be pairwise distinct")
        kind = cfg.mu.get("kind")
        if kind not in ("random", "explicit", "principal-nilpotent"):
            raise ConfigError("mu.kind must be random, explicit or principal-nilpotent")
        if kind == "random" and cfg.seed is None:
            raise ConfigError("a seed is mandatory for random mu")
        if kind == "explicit":
            val = cfg.mu.get("value")
            if not isinstance(val, list) or len(val) != rank + 1 or any(len(r) != rank + 1 for r in val):
                raise ConfigError(f"mu.value must be a {rank + 1}x{rank + 1} matrix")
    if cfg.kind == "limit":
        s = [float(x) for x in cfg.s_values]
        if any(b <= a for a, b in zip(s, s[1:])) or not s:
            raise ConfigError("s_values must be increasing")
        if cfg.mu.get("kind") == "principal-nilpotent":
            raise ConfigError("precondition violated: the rescaling limit needs semisimple mu")
    if cfg.kind == "rigidity":
        try:
            lam = Fraction(str(cfg.lam))
        except ValueError:
            raise ConfigError("lam must be a number") from None
        if lam < 0 or (2 * lam).denominator != 1:
            raise ConfigError("lam must be a nonnegative half-integer")
    if cfg.max_resamples < 0:
        raise ConfigError("max_resamples must be nonnegative")


def _mu(cfg: ExperimentConfig, n: int, rng: np.random.Generator | None = None):
    kind = cfg.mu.get("kind", "random")
    if kind == "explicit":
        return sympy.Matrix([[_scalar(x) for x in row] for row in cfg.mu["value"]])
    if kind == "principal-nilpotent":
        return principal_nilpotent(n)
    return random_cartan(n, rng)


def _module(cfg: ExperimentConfig) -> TensorModule:
    return TensorModule([build_irreducible(cfg.algebra, w) for w in cfg.weights])


def _points(cfg: ExperimentConfig) -> list:
    z = cfg.z or ["0"]
    return [_scalar(x) for x in z]


# ------------------------------------------------------------------ runners


def run_spectrum(cfg: ExperimentConfig):
    tm = _module(cfg)
    n = tm.n
    z = _points(cfg)
    tol = cfg.tol
    mu_kind = cfg.mu.get("kind")

    def build(rng):
        mu = _mu(cfg, n, rng)
        return quantum_mf_family(tm, mu, z if tm.N > 1 else None)

    if mu_kind == "random":
        spec, fam, used = simple_spectrum_search(build, tm.dimension, seed=cfg.seed, max_resamples=cfg.max_resamples, gap_tol=tol)
    else:
        fam = build(None)
        used = 0
        try:
            spec = joint_spectrum(fam, seed=cfg.seed or 0)
        except SpectrumError:
            spec = joint_spectrum(fam, seed=cfg.seed or 0, allow_generalized=True)
    mu = fam.parameters["mu"]
    expect_simple = mu_kind != "principal-nilpotent"
    gate = (spec.n_distinct == tm.dimension and spec.min_gap > tol and not spec.ambiguous) if expect_simple else True

    labels = list(spec.labels)
    header = ["index", *labels, "multiplicity", "min_gap"]
    sl2 = cfg.algebra == "A1"
    ham_cols = [labels.index(f"H{i + 1}") for i in range(tm.N)] if sl2 else []
    weights = [int(f.highest_weight.coords[0]) for f in tm.factors] if sl2 else []
    if sl2:
        header += [f"u[{i + 1},1,{k}]" for i in range(tm.N) for k in (0, 1)] + ["monodromy_defect", "monodromy_passed"]
    header += ["tol"]
    rows, opers = [], []
    for k, row in enumerate(spec.eigenvalue_tuples):
        out = [k, *[_fmt(complex(round(v.real, DIGITS), round(v.imag, DIGITS))) for v in row], spec.multiplicities[k], _fmt(spec.min_gap)]
        if sl2:
            pt = sl2_spectrum_to_oper([row[c] for c in ham_cols], [complex(p) for p in z], weights, mu)
            rep = sl2_oper_monodromy(pt, weights, tol=1e-6)
            worst = max(rep.defects.values())
            out += [_fmt(pt.values[(i, 1, kk)]) for i in range(tm.N) for kk in (0, 1)] + [_fmt(worst), rep.passed]
            opers.append(pt.to_dict())
            gate = gate and (rep.passed or not expect_simple)
        out.append(_fmt(tol))
        rows.append(out)
    result = {
        "kind": "spectrum",
        "mu": [[str(x) for x in r] for r in sympy.Matrix(mu).tolist()],
        "resamples": used,
        "dimension": tm.dimension,
        "n_distinct": spec.n_distinct,
        "spectrum": spectrum_to_dict(spec, DIGITS),
        "opers": opers,
        "tol": tol,
        "passed": bool(gate),
    }
    return result, header, rows, gate


def run_cyclicity(cfg: ExperimentConfig):
    n = parse_type(cfg.algebra)[1] + 1
    f = principal_nilpotent(n)
    header = ["weight", "dimension", "cyclic_span", "character_matches", "passed", "tol"]
    rows, gate, items = [], True, []
    rsd = build_root_system(cfg.algebra)
    for w in cfg.weights:
        mod = build_irreducible(cfg.algebra, w)
        fam = quantum_mf_family(mod, f)
        span = cyclic_span_dimension(mod, mod.highest_vector_index, list(fam.operators))
        char_ok = principal_grading_character(mod) == q_weyl_dimension(rsd, w)
        ok = span == mod.dimension and char_ok
        gate &= ok
        rows.append([" ".join(str(c) for c in w), mod.dimension, span, char_ok, ok, "exact"])
        items.append({"weight": list(w), "dimension": mod.dimension, "cyclic_span": span, "character_matches": char_ok})
    return {"kind": "cyclicity", "algebra": cfg.algebra, "items": items, "tol": "exact", "passed": bool(gate)}, header, rows, gate


def _grid(cfg: ExperimentConfig) -> list[complex]:
    if not cfg.grid:
        return [complex(u) for u in DEFAULT_GRID]
    return [complex(_scalar(u)) for u in cfg.grid]


def run_rigidity(cfg: ExperimentConfig):
    lam = Fraction(str(cfg.lam))
    scan = rigidity_scan(lam, _grid(cfg), tol=cfg.tol)
    header = ["u_re", "u_im", "defect", "error_estimate", "passed", "tol"]
    rows = [[_fmt(r.u.real), _fmt(r.u.imag), _fmt(r.defect), _fmt(r.error_estimate), r.passed, _fmt(cfg.tol)] for r in scan.rows]
    gate = scan.unique_pass_at_zero and scan.margin >= cfg.margin
    result = {
        "kind": "rigidity",
        "lam": str(lam),
        "passing": [_fmt(u) for u in scan.passing],
        "margin": _fmt(scan.margin),
        "margin_required": cfg.margin,
        "tol": cfg.tol,
        "passed": bool(gate),
    }
    return result, header, rows, gate


def run_limit(cfg: ExperimentConfig):
    tm = _module(cfg)
    mu = _mu(cfg, tm.n, np.random.default_rng(cfg.seed))
    rep = rescaling_limit_check(tm, _points(cfg), mu, [Fraction(str(s)) for s in cfg.s_values], seed=cfg.seed or 0)
    header = ["s", "max_angle", "ambiguous", "tol"]
    rows = [[_fmt(float(s)), _fmt(a), amb, _fmt(cfg.tol)] for s, a, amb in zip(rep.s_values, rep.max_angles, rep.ambiguous)]
    gate = rep.monotone and rep.max_angles[-1] < cfg.tol
    result = {
        "kind": "limit",
        "angles": [_fmt(a) for a in rep.max_angles],
        "monotone": rep.monotone,
        "tol": cfg.tol,
        "passed": bool(gate),
    }
    return result, header, rows, gate


def _identity_checks(cfg: ExperimentConfig) -> list[tuple[str, bool]]:
    rsd = build_root_system(cfg.algebra)
    letter, rank = parse_type(cfg.algebra)
    checks = []
    try:
        rsd.check_invariants()
        checks.append(("root_system_invariants", True))
    except AssertionError:
        checks.append(("root_system_invariants", False))
    checks.append(("generator_count", 2 * rsd.mf_generator_count == rsd.dim + rsd.rank))
    checks.append(("oper_space_count", build_oper_space(cfg.algebra, [0, 1]).dimension == rsd.mf_generator_count * 2))
    for w in ([0] * rank, list(rsd.rho)):
        checks.append((f"series[{' '.join(str(c) for c in w)}]", gorenstein_series_check(rsd, [int(c) for c in w])))
    if letter != "A":
        return checks
    n = rank + 1
    rng = np.random.default_rng(cfg.seed or 0)
    fundamental = [1] + [0] * (rank - 1)
    for w in (fundamental, [1] + [0] * (rank - 2) + [1] if rank > 1 else [2]):
        mod = build_irreducible(cfg.algebra, w)
        tag = " ".join(map(str, w))
        try:
            mod.check_invariants()
            checks.append((f"module_relations[{tag}]", True))
        except AssertionError:
            checks.append((f"module_relations[{tag}]", False))
        c = casimir(mod)
        checks.append((f"casimir_central[{tag}]", all(commutator(c, g).is_zero_matrix for g in mod.generator_matrices.values())))
    tm = TensorModule([build_irreducible(cfg.algebra, fundamental)] * 3)
    z = [sympy.Rational(int(rng.integers(-20, 21)), int(rng.integers(1, 8))) for _ in range(3)]
    while len(set(z)) < 3:
        z = [x + k for k, x in enumerate(z)]
    mu = random_cartan(n, rng)
    fam = inhomogeneous_hamiltonians(tm, z, mu)
    checks.append(("gaudin_commute", fam.commutes()))
    checks.append(("gaudin_hermitian", fam.is_hermitian()))
    total = fam.operators[0]
    for op in fam.operators[1:]:
        total = total + op
    mu_sum = mu_term(tm, 0, mu)
    for i in range(1, 3):
        mu_sum = mu_sum + mu_term(tm, i, mu)
    checks.append(("hamiltonian_sum", (total - mu_sum).is_zero_matrix))
    if n <= 3:
        checks.append(("symbol_check", all(symbol_check(n, random_cartan(n, rng)).values())))
        gens = classical_mf_generators(n, random_cartan(n, rng))
        polys = gens.polynomials
        checks.append(
            (
                "classical_poisson_commute",
                all(poisson_bracket(p, q, gens.basis) == 0 for p, q in itertools.combinations(polys, 2)),
            )
        )
    return checks


def run_verify(cfg: ExperimentConfig):
    checks = _identity_checks(cfg)
    header = ["check", "passed", "tol"]
    rows = [[name, ok, "exact"] for name, ok in checks]
    gate = all(ok for _, ok in checks)
    result = {"kind": "verify", "algebra": cfg.algebra, "checks": {k: v for k, v in checks}, "tol": "exact", "passed": bool(gate)}
    return result, header, rows, gate


RUNNERS = {
    "spectrum": run_spectrum,
    "cyclicity": run_cyclicity,
    "rigidity": run_rigidity,
    "limit": run_limit,
    "verify": run_verify,
}


def _versions() -> dict:
    import scipy

    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "sympy": sympy.__version__,
        "gaudin_opers": __version__,
    }


def run(cfg: ExperimentConfig) -> int:
    """Run one experiment, write its files, and return the exit status."""
    t0 = time.perf_counter()
    result, header, rows, gate = RUNNERS[cfg.kind](cfg)
    elapsed = time.perf_counter() - t0
    out = Path(cfg.out)
    write_json(out / "results.json", result)
    write_csv(out / f"{cfg.kind}.csv", header, rows)
    write_json(
        out / "manifest.json",
        {
            "inputs": json.loads(dumps(asdict(cfg))),
            "versions": _versions(),
            "seed": cfg.seed,
            "timings": {"total_seconds": round(elapsed, 3)},
            "files": ["results.json", f"{cfg.kind}.csv"],
        },
    )
    return 0 if gate else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gaudin-opers", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind)
        p.add_argument("--config", help="YAML or JSON file with experiment settings")
        p.add_argument("--seed", type=int, help="seed for every random choice")
        p.add_argument("--tol", type=float, help="gate tolerance")
        p.add_argument("--out", help="output directory (default: results)")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        cfg = load_config(args.kind, args.config, {"seed": args.seed, "tol": args.tol, "out": args.out})
    except (ConfigError, yaml.YAMLError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    status = run(cfg)
    print(f"{cfg.kind}: {'pass' if status == 0 else 'gate failure'} -> {cfg.out}")
    return status


if __name__ == "__main__":
    sys.exit(main())
