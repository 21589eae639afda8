"""Command-line front end.

Examples::

    ppsent gen --p 2 --s 3
    ppsent verify --p 3 --s 3
    ppsent bell --p 3 --s 3 --variant psi- --grid 16 --output bell.csv
    ppsent chsh --p 3 --s 3 --angles=pi/4,-pi/4,0,pi/2
    ppsent ghz --parties 3 --p 3 --s 2 --angles pi/3,pi/3,pi/3
    ppsent density --p 3 --s 3 --variant psi+
    ppsent not-demo --p 3 --s 2
    ppsent resources --parties 8 --p 3 --s 2

Exit status: 0 when every asserted tolerance holds, 1 on a tolerance failure
(the first failing check is named on stderr), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
import warnings
from dataclasses import dataclass

import numpy as np

from . import io as ppio
from .correlation import chsh, correlation_time_average, mean_reduced_density
from .galois import (DEFAULT_TOL, InvalidParameterError, PpsParams, build_pps_set,
                     verify_properties)
from .protocols import (BellKind, CapacityError, ghz_admissible, not_gate_demo, bell_closed_form,
                        prepare_bell, prepare_ghz, resource_report)
from .states import inner_product, make_field_state

OUTPUT_DIR_ENV = "PPSENT_OUTPUT_DIR"
COMMANDS = ("gen", "verify", "bell", "ghz", "chsh", "density", "not-demo", "resources")
MAX_GRID_POINTS = 100_000


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    p: int = 3
    s: int = 3
    poly: tuple[int, ...] | None = None
    variant: str = "psi+"
    parties: int | None = None
    angles: tuple[float, ...] | None = None
    grid: int = 16
    output: str | None = None
    format: str | None = None
    tolerance: float = DEFAULT_TOL

    def params(self) -> PpsParams:
        if self.poly is None:
            return PpsParams.default(self.p, self.s)
        return PpsParams(self.p, self.s, self.poly)


_PI_RE = re.compile(r"^([+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\*?pi(?:/(\d+(?:\.\d*)?))?$")


def parse_angle(text: str) -> float:
    """Radians as a float, or a multiple/fraction of pi such as ``-pi/4`` or ``3pi/2``."""
    t = text.strip().replace(" ", "").lower()
    m = _PI_RE.match(t)
    if m:
        mult, den = m.groups()
        k = {"": 1.0, "+": 1.0, "-": -1.0}.get(mult)
        if k is None:
            k = float(mult)
        return k * math.pi / (float(den) if den else 1.0)
    try:
        return float(t)
    except ValueError:
        raise UsageError(f"cannot parse angle {text!r}") from None


def parse_angles(text) -> tuple[float, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(parse_angle(str(x)) for x in text)
    return tuple(parse_angle(x) for x in str(text).split(",") if x.strip())


def _parse_poly(text) -> tuple[int, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(int(x) for x in text)
    return tuple(int(x) for x in str(text).split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ppsent",
                                     description="Entanglement simulation with pseudorandom phase sequences.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON file with RunConfig keys; flags override it")
        sp.add_argument("--p", type=int, help="prime modulus (default 3)")
        sp.add_argument("--s", type=int, help="polynomial degree (default 3)")
        sp.add_argument("--poly", help="comma-separated monic coefficients, leading first")
        sp.add_argument("--output", "-o", help="output file (default: stdout or $%s)" % OUTPUT_DIR_ENV)
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--tolerance", type=float)
        if name in ("bell", "chsh", "density"):
            sp.add_argument("--variant", help="psi+, psi-, phi+ or phi- (default psi+)")
        if name in ("ghz", "density", "resources"):
            sp.add_argument("--parties", type=int, help="number of fields")
        if name in ("ghz", "chsh"):
            sp.add_argument("--angles", help="comma-separated radians or pi fractions")
        if name in ("bell", "ghz"):
            sp.add_argument("--grid", type=int, help="points per angle in [0, 2pi) (default 16)")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if ns.config:
        try:
            with open(ns.config) as fh:
                values.update(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {ns.config}: {exc}") from None
    for key, val in vars(ns).items():
        if key != "config" and val is not None:
            values[key] = val
    values["command"] = ns.command
    unknown = set(values) - set(RunConfig.__dataclass_fields__)
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    cfg = RunConfig(**values)
    if cfg.poly is not None:
        cfg.poly = _parse_poly(cfg.poly)
    if cfg.angles is not None:
        cfg.angles = parse_angles(cfg.angles)
    if cfg.grid < 1:
        raise UsageError("--grid must be positive")
    if cfg.tolerance <= 0:
        raise UsageError("--tolerance must be positive")
    return cfg


class Checks:
    """Collects named tolerance checks; the first failure decides the exit message."""

    def __init__(self):
        self.items: list[tuple[str, bool, str]] = []

    def add(self, name: str, ok: bool, detail: str = ""):
        self.items.append((name, bool(ok), detail))

    @property
    def first_failure(self):
        return next((it for it in self.items if not it[1]), None)

    def as_list(self):
        return [{"check": n, "ok": ok, "detail": d} for n, ok, d in self.items]


def _grid(n: int) -> np.ndarray:
    return 2 * np.pi * np.arange(n) / n


def _cmd_gen(cfg: RunConfig, checks: Checks):
    params = cfg.params()
    pps = build_pps_set(params)
    report = verify_properties(pps)
    _report_checks(report, pps.L, cfg.tolerance, checks)
    return "json", {"set": ppio.pps_set_to_dict(pps), "report": report.as_dict()}


def _report_checks(report, L, tol, checks: Checks):
    checks.add("primitive", report.primitive_ok)
    checks.add("closure", report.closure_ok)
    checks.add("symbol-census", report.census_ok)
    checks.add("balance", report.balance_max_dev <= tol * L, f"{report.balance_max_dev:.3e}")
    checks.add("orthogonality", report.orthogonality_max_dev <= tol,
               f"{report.orthogonality_max_dev:.3e}")


def _cmd_verify(cfg: RunConfig, checks: Checks):
    params = cfg.params()
    pps = build_pps_set(params)
    report = verify_properties(pps)
    _report_checks(report, pps.L, cfg.tolerance, checks)
    basis = [make_field_state(1 / math.sqrt(2), 1 / math.sqrt(2), lab, pps) for lab in pps.labels]
    gram = np.array([[inner_product(x, y) for y in basis] for x in basis])
    gram_dev = float(np.max(np.abs(gram - np.eye(pps.L))))
    checks.add("inner-product-gram", gram_dev <= cfg.tolerance, f"{gram_dev:.3e}")
    out = {"params": {"p": params.p, "s": params.s, "poly": list(params.poly)},
           "report": report.as_dict(), "inner_product_gram_max_dev": gram_dev}
    if pps.L - 1 >= 2:
        fields = prepare_bell(BellKind.PSI_PLUS, pps)
        worst = 0.0
        for ta in _grid(4):
            for tb in _grid(4):
                r = correlation_time_average(fields, (ta, tb))
                worst = max(worst, abs(r.E_time - r.E_trace), abs(r.E_time - r.E_formula))
        checks.add("bell-path-equivalence", worst <= cfg.tolerance, f"{worst:.3e}")
        out["bell_path_max_dev"] = worst
    out["checks"] = checks.as_list()
    return "json", out


def _correlation_rows(fields, grid_pts, checks: Checks, tol, closed=None):
    rows = []
    worst_paths = worst_closed = 0.0
    for angles in grid_pts:
        r = correlation_time_average(fields, tuple(angles))
        rows.append(list(angles) + [r.E_time, r.E_trace, r.E_formula])
        worst_paths = max(worst_paths, abs(r.E_time - r.E_trace))
        if r.E_formula is not None:
            worst_paths = max(worst_paths, abs(r.E_time - r.E_formula))
        if closed is not None:
            worst_closed = max(worst_closed, abs(r.E_time - closed(angles)))
    checks.add("path-equivalence", worst_paths <= tol, f"{worst_paths:.3e}")
    if closed is not None:
        checks.add("closed-form", worst_closed <= tol, f"{worst_closed:.3e}")
    return rows


def _table(cfg: RunConfig, rows, F):
    if (cfg.format or "csv") == "csv":
        return "csv", ppio.correlation_csv(rows, F)
    names = [f"theta_{j + 1}" for j in range(F)] + ["E_time", "E_trace", "E_formula"]
    return "json", {"rows": [dict(zip(names, r)) for r in rows]}


def _cmd_bell(cfg: RunConfig, checks: Checks):
    pps = build_pps_set(cfg.params())
    kind = BellKind.parse(cfg.variant)
    fields = prepare_bell(kind, pps)
    g = _grid(cfg.grid)
    pts = [(a, b) for a in g for b in g]
    closed = (lambda t: bell_closed_form(kind, *t)) if pps.p >= 3 else None
    rows = _correlation_rows(fields, pts, checks, cfg.tolerance, closed)
    return _table(cfg, rows, 2)


def _cmd_ghz(cfg: RunConfig, checks: Checks):
    F = cfg.parties or 3
    pps = build_pps_set(cfg.params())
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        fields = prepare_ghz(F, pps)
    labels = [f.own_label for f in fields]
    checks.add("ghz-label-admissibility", ghz_admissible(pps, labels) or pps.p < 3,
               "some signed sum of relative labels vanishes")
    if cfg.angles is not None:
        if len(cfg.angles) != F:
            raise UsageError(f"--angles needs {F} values, got {len(cfg.angles)}")
        pts = [cfg.angles]
    else:
        if cfg.grid ** F > MAX_GRID_POINTS:
            raise UsageError(f"grid of {cfg.grid}^{F} points is too large; pass --angles or a smaller --grid")
        g = _grid(cfg.grid)
        pts = [tuple(t) for t in np.array(np.meshgrid(*([g] * F), indexing="ij")).reshape(F, -1).T]
    closed = (lambda t: math.cos(sum(t))) if pps.p >= 3 else None
    rows = _correlation_rows(fields, pts, checks, cfg.tolerance, closed)
    return _table(cfg, rows, F)


def _cmd_chsh(cfg: RunConfig, checks: Checks):
    pps = build_pps_set(cfg.params())
    fields = prepare_bell(BellKind.parse(cfg.variant), pps)
    angles = cfg.angles if cfg.angles is not None else (math.pi / 4, -math.pi / 4, 0.0, math.pi / 2)
    if len(angles) != 4:
        raise UsageError("chsh needs four angles: theta_a, theta_a', theta_b, theta_b'")
    res = chsh(fields, *angles)
    ta, tap, tb, tbp = angles
    worst = 0.0
    for pair in ((ta, tb), (ta, tbp), (tap, tbp), (tap, tb)):
        r = correlation_time_average(fields, pair)
        worst = max(worst, abs(r.E_time - r.E_trace), abs(r.E_time - r.E_formula))
    checks.add("path-equivalence", worst <= cfg.tolerance, f"{worst:.3e}")
    out = res.as_dict()
    out["angles"] = list(angles)
    return "json", out


def _cmd_density(cfg: RunConfig, checks: Checks):
    pps = build_pps_set(cfg.params())
    if cfg.parties is not None and cfg.parties >= 3:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            fields = prepare_ghz(cfg.parties, pps)
    else:
        fields = prepare_bell(BellKind.parse(cfg.variant), pps)
    rho = mean_reduced_density(fields)
    checks.add("density-valid", rho.is_valid(cfg.tolerance))
    return "json", ppio.density_to_dict(rho)


def _cmd_not_demo(cfg: RunConfig, checks: Checks):
    rep = not_gate_demo(build_pps_set(cfg.params()))
    checks.add("slot-vs-coefficient", rep.slot_path_dev <= 1e-12, f"{rep.slot_path_dev:.3e}")
    checks.add("expected-form", rep.expected_dev <= 1e-12, f"{rep.expected_dev:.3e}")
    return "json", rep.as_dict()


def _cmd_resources(cfg: RunConfig, checks: Checks):
    rep = resource_report(cfg.parties or 3, cfg.params())
    checks.add("sequences-used", rep.sequences_used == rep.field_count)
    return "json", rep.as_dict()


_HANDLERS = {
    "gen": _cmd_gen, "verify": _cmd_verify, "bell": _cmd_bell, "ghz": _cmd_ghz,
    "chsh": _cmd_chsh, "density": _cmd_density, "not-demo": _cmd_not_demo,
    "resources": _cmd_resources,
}


def _emit(cfg: RunConfig, kind: str, payload, stdout):
    text = payload if kind == "csv" else ppio.dumps(payload)
    path = cfg.output
    if path is None and os.environ.get(OUTPUT_DIR_ENV):
        ext = "csv" if kind == "csv" else "json"
        path = os.path.join(os.environ[OUTPUT_DIR_ENV], f"{cfg.command}.{ext}")
    if path is None:
        stdout.write(text)
    else:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return path


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    checks = Checks()
    try:
        kind, payload = _HANDLERS[cfg.command](cfg, checks)
    except (UsageError, InvalidParameterError, CapacityError, ValueError) as exc:
        stderr.write(f"usage error: {exc}\n")
        return 2
    failed = checks.first_failure
    if failed is not None:
        # no partial output on failure
        name, _, detail = failed
        stderr.write(f"FAIL: {name}" + (f" ({detail})" if detail else "") + "\n")
        return 1
    _emit(cfg, kind, payload, stdout)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except (UsageError, TypeError) as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    try:
        return run(cfg)
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0


if __name__ == "__main__":
    sys.exit(main())
