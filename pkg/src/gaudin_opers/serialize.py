"""JSON and CSV encodings: rationals as "p/q" strings, complex numbers as [re, im]."""
from __future__ import annotations

import csv
import json
from fractions import Fraction
from pathlib import Path

import numpy as np
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from .exact import format_scalar, parse_scalar, qmatrix
from .gaudin.family import OperatorFamily
from .gaudin.spectrum import JointSpectrum
from .lie.modules import IrreducibleModule
from .lie.roots import RootSystemData, Weight, build_root_system

__all__ = [
    "encode_exact",
    "decode_exact",
    "encode_complex",
    "decode_complex",
    "root_system_to_dict",
    "root_system_from_dict",
    "module_to_dict",
    "module_from_dict",
    "family_to_dict",
    "spectrum_to_dict",
    "dumps",
    "write_json",
    "write_csv",
]


def _frac(x) -> str:
    f = Fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def encode_exact(m: DomainMatrix) -> list[list[str]]:
    return [[format_scalar(x) for x in row] for row in m.to_list()]


def decode_exact(rows: list[list[str]]) -> DomainMatrix:
    return qmatrix([[parse_scalar(x) for x in row] for row in rows])


def encode_complex(x):
    """Scalars become [re, im]; arrays become nested lists of pairs."""
    a = np.asarray(x, dtype=complex)
    if a.ndim == 0:
        c = complex(a)
        return [float(c.real), float(c.imag)]
    return [encode_complex(v) for v in a]


def decode_complex(data) -> np.ndarray | complex:
    if len(data) == 2 and all(isinstance(v, (int, float)) for v in data):
        return complex(data[0], data[1])
    return np.array([decode_complex(v) for v in data], dtype=complex)


def root_system_to_dict(rsd: RootSystemData) -> dict:
    return {
        "type_label": rsd.type_label,
        "cartan_matrix": [list(r) for r in rsd.cartan_matrix],
        "simple_roots": [list(r) for r in rsd.simple_roots],
        "positive_roots": [list(r) for r in rsd.positive_roots],
        "coroots": [[_frac(c) for c in r] for r in rsd.coroots],
        "rho": [_frac(c) for c in rsd.rho],
        "exponents": list(rsd.exponents),
        "invariant_pairing": [[_frac(c) for c in r] for r in rsd.invariant_pairing],
    }


def root_system_from_dict(data: dict) -> RootSystemData:
    """Rebuild from the type label and check the stored fields agree."""
    rsd = build_root_system(data["type_label"])
    if root_system_to_dict(rsd) != {k: data[k] for k in root_system_to_dict(rsd)}:
        raise ValueError("stored root data disagree with the rebuilt root system")
    return rsd


def module_to_dict(mod: IrreducibleModule) -> dict:
    n = mod.n
    return {
        "algebra": mod.algebra,
        "highest_weight": [_frac(c) for c in mod.highest_weight],
        "dimension": mod.dimension,
        "highest_vector_index": mod.highest_vector_index,
        "gl_weights": [list(w) for w in mod.gl_weights],
        "gl_matrices": [[encode_exact(mod.gl_matrices[a][b]) for b in range(n)] for a in range(n)],
        "hermitian_gram": encode_exact(mod.hermitian_gram),
    }


def module_from_dict(data: dict) -> IrreducibleModule:
    n = len(data["gl_matrices"])
    mats = tuple(tuple(decode_exact(data["gl_matrices"][a][b]).convert_to(QQ) for b in range(n)) for a in range(n))
    mod = IrreducibleModule(
        algebra=data["algebra"],
        highest_weight=Weight(Fraction(c) for c in data["highest_weight"]),
        dimension=int(data["dimension"]),
        gl_matrices=mats,
        gl_weights=tuple(tuple(w) for w in data["gl_weights"]),
        hermitian_gram=decode_exact(data["hermitian_gram"]).convert_to(QQ),
        highest_vector_index=int(data["highest_vector_index"]),
    )
    mod.check_invariants()
    return mod


def _param(v):
    if v is None or isinstance(v, (bool, int, str)):
        return v
    if isinstance(v, float):
        return v
    if isinstance(v, complex):
        return encode_complex(v)
    if isinstance(v, (list, tuple)):
        return [_param(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _param(x) for k, x in v.items()}
    if isinstance(v, DomainMatrix):
        return encode_exact(v)
    if hasattr(v, "tolist"):
        return [[str(x) for x in row] for row in v.tolist()]
    return str(v)


def family_to_dict(fam: OperatorFamily) -> dict:
    ops = [encode_exact(o) if fam.exact else encode_complex(o) for o in fam.operators]
    return {
        "name": fam.name,
        "labels": list(fam.labels),
        "exact": fam.exact,
        "dimension": fam.dimension,
        "parameters": _param(fam.parameters),
        "operators": ops,
    }


def spectrum_to_dict(spec: JointSpectrum, digits: int = 12) -> dict:
    """Eigenvalue tuples rounded to ``digits`` so reruns are byte-identical."""

    def rnd(x):
        c = complex(x)
        return [round(c.real, digits) + 0.0, round(c.imag, digits) + 0.0]

    return {
        "labels": list(spec.labels),
        "eigenvalue_tuples": [[rnd(v) for v in row] for row in spec.eigenvalue_tuples],
        "multiplicities": list(spec.multiplicities),
        "min_gap": round(float(spec.min_gap), digits),
        "ambiguous": bool(spec.ambiguous),
        "diagonalizable": bool(spec.diagonalizable),
    }


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(path: Path | str, obj) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(dumps(obj))
    return p


def write_csv(path: Path | str, header: list[str], rows: list[list]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with p.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow(r)
    return p
