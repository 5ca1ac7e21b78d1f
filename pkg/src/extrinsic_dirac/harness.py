"""Command-line harness: run bound checks on catalog cases, sweeps and reports.

Exit codes: 0 when every asserted check passes, 2 when an asserted check
fails, 3 on a configuration error. Reported-only rows never change the
exit code.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import bounds as B
from . import killing as K
from . import spectra as S
from .clifford import direct_sum_rep, irreducible_rep, swap_module, verify_clifford
from .errors import ConfigError, ExtrinsicDiracError, GeometryError
from .geometry import build_grid, catalog, CATALOG_NAMES

CASE_SCHEMA = "extrinsic-dirac/case-v1"
SWEEP_SCHEMA = "extrinsic-dirac/sweep-v1"
FORMATS = ("json", "csv", "md")
MIN_GRID = {1: 16, 2: 32}
SWEEP_FAMILIES = {
    "ellipsoid-of-revolution": ("a", (0.5, 2.0)),
    "torus-of-revolution": ("q", (1.05, 3.0)),
    "fourier-curve": ("eps", (0.0, 0.3)),
    "geodesic-sphere-hyperbolic": ("r", (0.01, 2.0)),
}
DEFAULT_REPORT_CASES = (
    ("circle", {}),
    ("ellipse", {"a": 2.0, "b": 1.0}),
    ("sphere", {"rho": 1.0}),
    ("ellipsoid-of-revolution", {"a": 1.2, "c": 1.0}),
    ("torus-of-revolution", {"R": 2.0, "r": 1.0}),
    ("equatorial-sphere", {}),
    ("small-sphere-in-sphere", {"a": math.pi / 3}),
    ("geodesic-sphere-hyperbolic", {"r": 1.0}),
    ("flat-subtorus", {}),
    ("clifford-torus", {}),
)
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 2, 3


@dataclass
class RunConfig:
    case: str = "circle"
    params: dict = field(default_factory=dict)
    grid: int | None = None
    modes: int | None = None
    tol: float | None = None
    fmt: str = "json"
    seed: int = 0
    out: str | None = None
    window: float | None = None
    vary: str | None = None
    lo: float | None = None
    hi: float | None = None
    steps: int = 31
    trials: int = 200
    max_dim: int = 8

    def validate(self, n=None):
        if self.fmt not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError("tolerance must be positive")
        if self.window is not None and not self.window > 0:
            raise ConfigError("window must be positive")
        if self.grid is not None and n is not None and self.grid < MIN_GRID[n]:
            raise ConfigError(f"grid must be at least {MIN_GRID[n]} for n={n}")
        if self.modes is not None and self.modes < 0:
            raise ConfigError("modes must be nonnegative")
        if self.steps < 1 or self.trials < 1:
            raise ConfigError("steps and trials must be positive")
        return self


# ------------------------------------------------------------------ helpers


def _clean(x):
    """JSON-safe copy: numpy scalars to Python, tuples to lists, complex to [re, im]."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def _alpha_for(kind):
    return {"euclidean": 0.0, "sphere": 0.5, "hyperbolic": 0.5j}[kind]


def _primary_bound(summary, alpha):
    if complex(alpha).imag:
        return B.bound_imag(summary.n, alpha, summary)
    return B.bound_real(summary.n, alpha, summary)


def _dirac_with(imm, window, count, cfg):
    """Dirac spectrum complete to at least ``window`` holding at least ``count`` values."""
    w = window
    for _ in range(8):
        spec = S.dirac_spectrum(imm, w, N=cfg.grid, mode_max=cfg.modes)
        if len(spec) >= count:
            return spec
        w *= 1.5
    return spec


def _laplace_with(imm, count, cfg):
    w = 4.0
    for _ in range(10):
        lap = S.laplace_spectrum(imm, w, N=cfg.grid or 400)
        if len(lap) >= count:
            return lap
        w *= 2.0
    return lap


def _row(check, asserted, verdict, window, /, **kw):
    out = {"check": check, "asserted": bool(asserted), "verdict": verdict, "window": window}
    out.update({k: v for k, v in kw.items() if k not in out})
    return out


def _failed(row):
    return row["asserted"] and row["verdict"] == "fail"


# ----------------------------------------------------------------- run_case


def run_case(cfg):
    """All applicable checks for one catalog case, as a JSON-ready bundle."""
    try:
        imm = catalog(cfg.case, **cfg.params)
    except GeometryError as exc:
        raise ConfigError(str(exc)) from None
    cfg.validate(imm.n)
    grid = build_grid(imm)
    summary = B.summary_from_geometry(imm, grid)
    alpha = _alpha_for(imm.ambient.kind)
    spec = _primary_bound(summary, alpha)
    real_alpha = complex(alpha).imag == 0
    pair_need = math.sqrt(2 * spec.bound) if real_alpha else 0.0
    thresholds = [spec.threshold]
    if not real_alpha and summary.rad is not None:
        thresholds.append(B.bound_imag_radius(summary.n, alpha, summary).threshold)
    window = cfg.window or max(2.0, 1.25 * max(thresholds), 1.1 * pair_need)
    count = max(11, 6 * spec.mu) if real_alpha else 11
    dirac = _dirac_with(imm, window, count, cfg)
    win = dirac.window
    rows = []

    rep = B.check_spectrum(dirac, spec, cfg.tol)
    rows.append(_row(spec.theorem, True, rep.verdict, win, **rep.to_dict()))
    if not real_alpha:
        if summary.rad is not None:
            rspec = B.bound_imag_radius(summary.n, alpha, summary)
            rr = B.check_spectrum(dirac, rspec, cfg.tol)
            rows.append(_row(rspec.theorem, True, rr.verdict, win, **rr.to_dict(), h3_form=rspec.extra["h3_form"]))

    # Rayleigh quotients of the restricted Killing spinors against the formula
    fields = K.killing_basis(imm.ambient, alpha)
    qs = [K.rayleigh_dtilde(f, imm, grid) for f in fields]
    if real_alpha:
        err = max(abs(q - spec.bound) for q in qs)
        ok = err <= 1e-12 * max(1.0, spec.bound)
        rows.append(_row("rayleigh-formula", True, "pass" if ok else "fail", win, values=qs,
                         bound=spec.bound, max_deviation=err))
    else:
        cap = spec.bound**2
        ok = all(q <= cap * (1 + 1e-12) for q in qs)
        rows.append(_row("rayleigh-imaginary", True, "pass" if ok else "fail", win, values=qs, bound_sq=cap))
        cross = [K.imaginary_cross_term_bound(f, imm, grid) for f in fields]
        ok = all(c.lhs <= c.rhs_optimal * (1 + 1e-12) + 1e-14 for c in cross)
        rows.append(_row("cross-term", True, "pass" if ok else "fail", win,
                         lhs=[c.lhs for c in cross], rhs=[c.rhs_optimal for c in cross]))

    if real_alpha:
        pr = B.pairing_bound_hypersurface(dirac, spec.bound, spec.mu, cfg.tol, bounding=imm.bounding)
        rows.append(_row("pairing", imm.bounding, pr["verdict"], win, **pr))

    if real_alpha and imm.n in (1, 2):
        lap = _laplace_with(imm, 6, cfg)
        for k in range(6):
            hb = B.higher_bound(summary.n, alpha, summary, lap, k, dirac=dirac, mu=spec.mu)
            asserted = hb["status"] == "asserted"
            verdict = "pass" if hb.get("holds") else ("fail" if hb.get("holds") is False else "inapplicable")
            if not asserted and verdict == "fail":
                verdict = "exceeds (reported-only)"
            rows.append(_row("higher", asserted, verdict, win, **hb))

    comp = B.comparison_bounds(summary, dirac if len(dirac) >= 11 else None)
    for r in comp:
        for g in r.get("gaps", []):
            rows.append(_row("gap", True, "pass" if g["holds"] else "fail", win, **g))

    lows = B.lower_bounds(summary)
    lam1 = float(dirac.squares()[0]) if len(dirac) else None
    tol = cfg.tol or B.default_tolerance(dirac)
    for name, lb in lows.items():
        if lb.get("applicable") and lam1 is not None:
            ok = lam1 >= lb["value"] - tol * max(1.0, abs(lb["value"]))
            rows.append(_row(f"lower:{name}", True, "pass" if ok else "fail", win, value=lb["value"], lambda_sq=lam1))

    for w in B.willmore_inequalities(summary):
        asserted = w["kind"] == "theorem"
        holds = w["margin"] >= -1e-6 * w["rhs"]
        verdict = "pass" if holds else ("fail" if asserted else "below (reported-only)")
        rows.append(_row(f"willmore:{w['name']}", asserted, verdict, win, **w))

    label = S.induced_spin_structure(imm)
    failed = [r["check"] for r in rows if _failed(r)]
    bundle = {
        "schema": CASE_SCHEMA,
        "case": cfg.case,
        "params": dict(sorted(cfg.params.items())),
        "config": {"grid": cfg.grid, "modes": cfg.modes, "tol": cfg.tol, "seed": cfg.seed, "window": win},
        "summary": summary.to_dict(),
        "spin_structure": list(label.flags),
        "bound": {"theorem": spec.theorem, "value": spec.bound, "mode": spec.mode, "mu": spec.mu, "nu": spec.nu},
        "spectrum": dirac.to_dict(),
        "checks": rows,
        "comparison": comp,
        "status": "fail" if failed else "pass",
        "failed": failed,
    }
    return _clean(bundle)


# -------------------------------------------------------------------- sweep


def _sweep_immersion(family, value, base):
    if family == "ellipsoid-of-revolution":
        return catalog(family, a=value, c=base.get("c", 1.0))
    if family == "torus-of-revolution":
        r = base.get("r", 1.0)
        return catalog(family, R=value * r, r=r)
    if family == "fourier-curve":
        return catalog(family, r0=1.0, cos=(0.0, value))
    return catalog(family, r=value, n=2)


def sweep(cfg):
    """One row per parameter value: volume, Willmore, bound, smallest lambda^2, margin."""
    if cfg.case not in SWEEP_FAMILIES:
        raise ConfigError(f"sweep family must be one of {', '.join(SWEEP_FAMILIES)}")
    name, (lo, hi) = SWEEP_FAMILIES[cfg.case]
    lo = lo if cfg.lo is None else cfg.lo
    hi = hi if cfg.hi is None else cfg.hi
    cfg.validate()
    values = np.linspace(lo, hi, cfg.steps) if cfg.steps > 1 else np.array([lo])
    rows = []
    for v in values:
        v = float(v)
        try:
            imm = _sweep_immersion(cfg.case, v, cfg.params)
        except GeometryError as exc:
            rows.append({name: v, "note": f"skipped: {exc}"})
            continue
        summary = B.summary_from_geometry(imm, radius=False)
        alpha = _alpha_for(imm.ambient.kind)
        spec = _primary_bound(summary, alpha)
        window = cfg.window or max(1.0, 1.25 * spec.threshold)
        dirac = S.dirac_spectrum(imm, window, N=cfg.grid, mode_max=cfg.modes)
        rep = B.check_spectrum(dirac, spec, cfg.tol)
        lam = abs(dirac.values()[0]) if len(dirac) else math.nan
        row = {name: v, "vol": summary.vol, "willmore": summary.willmore, "bound": spec.bound,
               "mode": spec.mode, "lambda1_sq": lam * lam, "margin": rep.margins[-1] if rep.margins else None,
               "verdict": rep.verdict, "window": dirac.window}
        if cfg.case == "geodesic-sphere-hyperbolic":
            row["ratio"] = lam / spec.bound
            row["ratio_closed"] = (1 / math.sinh(v)) / (1 + 1 / math.tanh(v))
        if cfg.case == "torus-of-revolution":
            R, r = v * imm.params["r"], imm.params["r"]
            row["willmore_exact"] = math.pi**2 * R * R / (r * math.sqrt(R * R - r * r))
        rows.append(row)
    failed = [r for r in rows if r.get("verdict") == "fail"]
    return _clean({"schema": SWEEP_SCHEMA, "family": cfg.case, "parameter": name, "rows": rows,
                   "status": "fail" if failed else "pass"})


# ------------------------------------------------------- algebra and min-max


def verify_clifford_all(max_dim=8, tol=1e-12):
    rows = []
    for total in range(2, max_dim + 1):
        for n in range(1, total):
            m = total - n
            for jE in ((0, 1) if n % 2 else (0,)):
                for jF in ((0, 1) if m % 2 else (0,)):
                    dec = direct_sum_rep(irreducible_rep(n, jE), irreducible_rep(m, jF))
                    rep = verify_clifford(dec, tol)
                    rows.append({"n": n, "m": m, "jE": jE, "jF": jF, "case": dec.case,
                                 "max_residual": rep["max_residual"], "passed": rep["passed"]})
    ok = all(r["passed"] for r in rows)
    return _clean({"schema": "extrinsic-dirac/clifford-v1", "rows": rows, "status": "pass" if ok else "fail"})


def minmax_demo(seed=0, trials=200):
    e = np.eye(4)
    A = np.diag([1.0, 2.0, 3.0, 4.0])
    H1 = np.column_stack([e[1] + e[2], e[0] + e[3]])
    H2 = np.column_stack([e[1] - e[2], -e[0] + e[3]])
    ex = B.pairing_verify(A, H1, H2, 2.5, extra_pairs=[(2, 4)])
    example_ok = ex["hypotheses_hold"] and all(p["equality"] for p in ex["pairs"]) and not ex["extra"][0]["holds"]
    rng = np.random.default_rng(seed)
    violations = 0
    hyp_fail = 0
    for t in range(trials):
        dim = int(rng.integers(4, 12))
        nu = int(rng.integers(1, dim // 2 + 1))
        rep = B.pairing_verify(*B.random_pairing_instance(rng, dim, nu))
        if not rep["hypotheses_hold"]:
            hyp_fail += 1
        else:
            violations += rep["conclusion_violations"]
    ok = example_ok and violations == 0 and hyp_fail == 0
    return _clean({"schema": "extrinsic-dirac/minmax-v1", "example": ex, "example_ok": example_ok,
                   "trials": trials, "seed": seed, "conclusion_violations": violations,
                   "hypothesis_failures": hyp_fail, "status": "pass" if ok else "fail"})


# ------------------------------------------------------------------ render


def _fmt(x):
    if isinstance(x, bool) or x is None:
        return str(x)
    if isinstance(x, float):
        return f"{x:.12g}"
    if isinstance(x, list):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    return str(x)


def _table(rows, cols):
    lines = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
    for r in rows:
        lines.append("| " + " | ".join(_fmt(r.get(c)) for c in cols) + " |")
    return "\n".join(lines)


def _csv(rows, cols):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in cols])
    return buf.getvalue()


CHECK_COLS = ["check", "asserted", "verdict", "window", "bound", "C_k", "margins", "margin", "value", "lambda_sq"]


def render(doc, fmt):
    """Render a bundle (case, sweep, clifford, minmax or report) in json, csv or md."""
    if fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    schema = doc.get("schema")
    if schema == CASE_SCHEMA:
        if fmt == "csv":
            return _csv(doc["checks"], CHECK_COLS)
        head = f"## {doc['case']} {_fmt(doc['params'])}\n\nstatus: {doc['status']}\n\n"
        return head + _table(doc["checks"], CHECK_COLS) + "\n"
    if schema == SWEEP_SCHEMA:
        cols = list(dict.fromkeys(k for r in doc["rows"] for k in r))
        return _csv(doc["rows"], cols) if fmt == "csv" else _table(doc["rows"], cols) + "\n"
    if schema == "extrinsic-dirac/clifford-v1":
        cols = ["n", "m", "jE", "jF", "case", "max_residual", "passed"]
        return _csv(doc["rows"], cols) if fmt == "csv" else _table(doc["rows"], cols) + "\n"
    if schema == "extrinsic-dirac/minmax-v1":
        rows = [dict(p, pair=_fmt(p["pair"])) for p in doc["example"]["pairs"] + doc["example"]["extra"]]
        cols = ["pair", "average", "margin", "holds"]
        body = _csv(rows, cols) if fmt == "csv" else _table(rows, cols) + "\n"
        tail = f"trials={doc['trials']} seed={doc['seed']} violations={doc['conclusion_violations']}\n"
        return body + tail
    if schema == "extrinsic-dirac/report-v1":
        return _render_report(doc, fmt)
    raise ConfigError(f"cannot render schema {schema!r}")


# ------------------------------------------------------------------ report


def _report_tables(cases):
    overview, comp, higher, will = [], [], [], []
    for c in cases:
        head = c["checks"][0]
        overview.append({"case": c["case"], "bound": c["bound"]["value"], "mode": c["bound"]["mode"],
                         "mu": c["bound"]["mu"], "lambda1": abs(head["eigenvalues"][0]) if head["eigenvalues"] else None,
                         "verdict": head["verdict"], "window": head["window"], "status": c["status"]})
        row = {"case": c["case"], "window": head["window"]}
        for r in c["comparison"]:
            row[r["name"]] = r.get("value")
        comp.append(row)
        for r in c["checks"]:
            if r["check"] == "higher":
                higher.append({"case": c["case"], "k": r["k"], "C_k": r["C_k"], "index": r.get("index"),
                               "lambda_sq": r.get("lambda_sq"), "status": r["status"], "verdict": r["verdict"],
                               "window": r["window"]})
            if r["check"].startswith("willmore:"):
                will.append({"case": c["case"], "inequality": r["name"], "lhs": r["lhs"], "rhs": r["rhs"],
                             "margin": r["margin"], "verdict": r["verdict"], "window": r["window"]})
    return {"overview": overview, "comparison": comp, "higher": higher, "willmore": will}


COMP_COLS = ["case", "extrinsic (ours)", "Baum", "Bunke", "Anghel (kernel case)", "window"]
TABLE_COLS = {
    "overview": ["case", "bound", "mode", "mu", "lambda1", "verdict", "window", "status"],
    "comparison": COMP_COLS,
    "higher": ["case", "k", "C_k", "index", "lambda_sq", "status", "verdict", "window"],
    "willmore": ["case", "inequality", "lhs", "rhs", "margin", "verdict", "window"],
}
TITLES = {
    "overview": "Extrinsic bounds against computed spectra",
    "comparison": "Upper bounds on lambda^2 (Bunke with the Frobenius norm of II)",
    "higher": "Higher eigenvalues via Laplace spectra (k >= 1 reported only)",
    "willmore": "Willmore-type inequalities (torus row is a monitor)",
}


def build_report(inputs=None, cfg=None):
    """Assemble report tables from case bundles (default: run the standard catalog)."""
    cfg = cfg or RunConfig()
    if inputs is None:
        cfgs = [replace(cfg, case=name, params=dict(p)) for name, p in DEFAULT_REPORT_CASES]
        with ThreadPoolExecutor() as pool:
            inputs = list(pool.map(run_case, cfgs))
    schemas = {d.get("schema") for d in inputs}
    if len(schemas) != 1 or not schemas <= {CASE_SCHEMA, SWEEP_SCHEMA}:
        raise ConfigError(f"report inputs must share one schema (case or sweep), got {sorted(map(str, schemas))}")
    if schemas == {SWEEP_SCHEMA}:
        failed = [d["family"] for d in inputs if d["status"] == "fail"]
        return _clean({"schema": "extrinsic-dirac/report-v1", "sweeps": inputs,
                       "status": "fail" if failed else "pass", "failed": failed})
    tables = _report_tables(inputs)
    failed = [c["case"] for c in inputs if c["status"] == "fail"]
    return _clean({"schema": "extrinsic-dirac/report-v1", "tables": tables, "cases": [c["case"] for c in inputs],
                   "status": "fail" if failed else "pass", "failed": failed})


def _render_report(doc, fmt):
    if "sweeps" in doc:
        return "\n".join((f"# {d['family']}\n" if fmt == "csv" else f"## Sweep: {d['family']}\n\n") + render(d, fmt)
                         for d in doc["sweeps"])
    parts = []
    for key, cols in TABLE_COLS.items():
        rows = doc["tables"][key]
        if fmt == "csv":
            parts.append(f"# {key}\n" + _csv(rows, cols))
        else:
            parts.append(f"## {TITLES[key]}\n\n" + _table(rows, cols) + "\n")
    return "\n".join(parts)


# --------------------------------------------------------------------- CLI


def read_config_file(path):
    """key=value lines; blank lines and # comments ignored."""
    out = {}
    try:
        with open(path) as fh:
            for num, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{num}: expected key=value")
                k, v = line.split("=", 1)
                out[k.strip()] = v.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    return out


_CASE_FLAGS = ("r", "rho", "R", "a", "b", "c", "n")
_FIELD_TYPES = {"case": str, "grid": int, "modes": int, "tol": float, "format": str, "seed": int, "out": str,
                "window": float, "vary": str, "lo": float, "hi": float, "steps": int, "trials": int,
                "max_dim": int}


def _number(v):
    try:
        return int(v)
    except ValueError:
        try:
            return float(v)
        except ValueError:
            raise ConfigError(f"parameter value {v!r} is not a number") from None


def _parser():
    p = argparse.ArgumentParser(prog="extrinsic-dirac", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="file of key=value lines overriding defaults")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--tol", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--grid", type=int, help="grid size N along the profile or curve")
    common.add_argument("--modes", type=int, help="largest Fourier mode index around the axis")
    common.add_argument("--window", type=float, help="completeness window for Dirac spectra")
    common.add_argument("--case")
    for f in _CASE_FLAGS:
        common.add_argument(f"--{f}", dest=f"p_{f}", type=float)
    common.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    sub.add_parser("check", parents=[common], help="run all checks on one catalog case")
    sw = sub.add_parser("sweep", parents=[common], help="sweep a one-parameter family")
    sw.add_argument("--lo", type=float)
    sw.add_argument("--hi", type=float)
    sw.add_argument("--steps", type=int)
    vc = sub.add_parser("verify-clifford", parents=[common], help="verify all direct-sum modules")
    vc.add_argument("--max-dim", dest="max_dim", type=int)
    mm = sub.add_parser("minmax-demo", parents=[common], help="paired min-max example and random suite")
    mm.add_argument("--trials", type=int)
    rp = sub.add_parser("report", parents=[common], help="tables over the default catalog or given bundles")
    rp.add_argument("--input", action="append", default=[], help="case bundle JSON (repeatable)")
    return p


def config_from_args(args):
    values = {}
    if args.config:
        values.update(read_config_file(args.config))
    cli = {
        "case": args.case, "grid": args.grid, "modes": args.modes, "tol": args.tol, "format": args.format,
        "seed": args.seed, "out": args.out, "window": args.window,
        "lo": getattr(args, "lo", None), "hi": getattr(args, "hi", None), "steps": getattr(args, "steps", None),
        "trials": getattr(args, "trials", None), "max_dim": getattr(args, "max_dim", None),
    }
    values.update({k: v for k, v in cli.items() if v is not None})
    params = {}
    kw = {}
    for k, v in values.items():
        if k in _FIELD_TYPES:
            try:
                kw["fmt" if k == "format" else k] = _FIELD_TYPES[k](v)
            except ValueError:
                raise ConfigError(f"bad value for {k}: {v!r}") from None
        else:
            params[k] = _number(v)
    for f in _CASE_FLAGS:
        v = getattr(args, f"p_{f}")
        if v is not None:
            params[f] = int(v) if f == "n" else v
    for item in args.param:
        if "=" not in item:
            raise ConfigError(f"--param expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        params[k.strip()] = _number(v.strip())
    if "case" in kw and kw["case"] not in CATALOG_NAMES:
        raise ConfigError(f"unknown case {kw['case']!r}")
    return RunConfig(params=params, **kw).validate()


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = config_from_args(args)
        if args.command == "check":
            doc = run_case(cfg)
        elif args.command == "sweep":
            doc = sweep(cfg)
        elif args.command == "verify-clifford":
            doc = verify_clifford_all(cfg.max_dim)
        elif args.command == "minmax-demo":
            doc = minmax_demo(cfg.seed, cfg.trials)
        else:
            inputs = None
            if args.input:
                inputs = []
                for path in args.input:
                    try:
                        with open(path) as fh:
                            inputs.append(json.load(fh))
                    except (OSError, json.JSONDecodeError) as exc:
                        raise ConfigError(f"cannot read {path}: {exc}") from None
            doc = build_report(inputs, cfg)
        _emit(render(doc, cfg.fmt), cfg.out)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ExtrinsicDiracError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_FAIL if doc.get("status") == "fail" else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
