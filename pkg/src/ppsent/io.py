"""JSON/CSV emitters. Floats are written with 12 significant digits."""

from __future__ import annotations

import csv
import io
import json
from typing import Sequence

import numpy as np

from .correlation import DensityMatrix
from .galois import FieldElement, PpsParams, PpsSet
from .states import GeneralState

SIG_DIGITS = 12


def fmt(x: float) -> str:
    return f"{x:.{SIG_DIGITS}g}"


def rounded(x: float) -> float:
    """Round to 12 significant digits; -0.0 becomes 0.0 so output bytes are stable."""
    v = float(fmt(float(x)))
    return 0.0 if v == 0 else v


def _round_tree(obj):
    if isinstance(obj, float):
        return rounded(obj)
    if isinstance(obj, dict):
        return {k: _round_tree(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_tree(v) for v in obj]
    if isinstance(obj, np.generic):
        return _round_tree(obj.item())
    return obj


def dumps(obj) -> str:
    return json.dumps(_round_tree(obj), sort_keys=True, indent=2) + "\n"


def pps_set_to_dict(pps: PpsSet) -> dict:
    labels = sorted(pps.labels, key=lambda lab: lab.coeffs)
    return {
        "p": pps.p,
        "s": pps.params.s,
        "poly": list(pps.params.poly),
        "sequences": [{"label": list(lab.coeffs), "symbols": pps.symbols[lab.index()].tolist()}
                      for lab in labels],
    }


def pps_set_from_dict(d: dict) -> PpsSet:
    params = PpsParams(d["p"], d["s"], tuple(d["poly"]))
    table = np.zeros((params.L, params.L), dtype=np.int64)
    seen = set()
    for entry in d["sequences"]:
        idx = FieldElement(tuple(entry["label"]), params.p).index()
        seen.add(idx)
        table[idx] = entry["symbols"]
    if len(seen) != params.L:
        raise ValueError(f"expected {params.L} sequences, got {len(seen)} distinct labels")
    return PpsSet(params, table)


def general_state_to_dict(state: GeneralState) -> dict:
    return {
        "F": state.F,
        "global_label": list(state.global_label.coeffs),
        "terms": [{"bits": "".join(map(str, bits)), "label": list(lab.coeffs),
                   "re": c.real, "im": c.imag}
                  for (bits, lab), c in state.entries()],
    }


def general_state_from_dict(d: dict, pps: PpsSet) -> GeneralState:
    coeffs = {}
    for t in d["terms"]:
        key = (tuple(int(b) for b in t["bits"]), FieldElement(tuple(t["label"]), pps.p))
        coeffs[key] = complex(t["re"], t["im"])
    return GeneralState(d["F"], FieldElement(tuple(d["global_label"]), pps.p), coeffs, pps)


def density_to_dict(rho: DensityMatrix) -> dict:
    return {"dim": rho.dim, "re": rho.entries.real.tolist(), "im": rho.entries.imag.tolist()}


def density_from_dict(d: dict) -> DensityMatrix:
    return DensityMatrix(np.array(d["re"]) + 1j * np.array(d["im"]))


def correlation_csv(rows: Sequence[Sequence[float | None]], F: int) -> str:
    """Rows are (theta_1..theta_F, E_time, E_trace, E_formula); a missing formula is left blank."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"theta_{j + 1}" for j in range(F)] + ["E_time", "E_trace", "E_formula"])
    for row in rows:
        w.writerow(["" if x is None else fmt(rounded(x)) for x in row])
    return buf.getvalue()
