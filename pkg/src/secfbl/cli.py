"""Command-line front end: ``secfbl eval|figure|sweep|validate``.

Configuration files hold ``key = value`` lines (``#`` starts a comment).
Any key may also be given as a ``--key value`` flag, which takes precedence.
Keys are the :class:`~secfbl.params.SystemParams` fields plus ``G_b_dB`` /
``G_e_dB`` (converted to linear gains) and the run settings ``methods``,
``samples``, ``seed``, ``estimator``, ``correlation_mode`` and
``window_radius_factor``.

Exit codes: 0 success, 1 validation failure, 2 invalid configuration,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytic import closed_form as cf
from .analytic.metrics import ANALYTIC_METHODS, METHODS, MetricBundle, evaluate
from .analytic.quadrature import eps_b_quadrature, eps_e_quadrature
from .montecarlo import McConfig, estimate
from .params import DerivedConstants, ParameterError, SystemParams, derive_constants

__all__ = ["main", "CSV_HEADER", "SweepSpec", "ConfigError", "figure_specs", "run_sweep"]

CSV_HEADER = ("axis", "axis_value", "method", "eps_b", "eps_e", "p_sec", "p_out", "t_sec",
              "ci_half_width", "notes")

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

_PARAM_KEYS = SystemParams.field_names()
_DB_KEYS = {"G_b_dB": "G_b", "G_e_dB": "G_e"}
_RUN_DEFAULTS = {
    "methods": ",".join(METHODS),
    "samples": "100000",
    "seed": "0",
    "estimator": "auto",
    "correlation_mode": "independent",
    "window_radius_factor": "5",
}


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


# configuration -----------------------------------------------------------------

def read_config(path: str) -> dict[str, str]:
    """Parse ``key = value`` lines; blank lines and ``#`` comments are ignored."""
    out: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path!r}: {exc.strerror}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError("config", f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        _merge(out, key.strip(), value.strip())
    return out


def parse_overrides(tokens: list[str]) -> dict[str, str]:
    """Turn ``--key value`` / ``--key=value`` tokens into a dict."""
    out: dict[str, str] = {}
    it = iter(tokens)
    for tok in it:
        if not tok.startswith("--") or len(tok) == 2:
            raise ConfigError(tok, "expected a --key value override")
        key, sep, value = tok[2:].partition("=")
        if not sep:
            try:
                value = next(it)
            except StopIteration:
                raise ConfigError(key, "missing value") from None
        _merge(out, key, value)
    return out


def _merge(dst: dict[str, str], key: str, value: str):
    allowed = set(_PARAM_KEYS) | set(_DB_KEYS) | set(_RUN_DEFAULTS)
    if key not in allowed:
        raise ConfigError(key, "unknown key")
    # a gain given in one unit replaces the same gain given in the other
    for db, lin in _DB_KEYS.items():
        if key == db:
            dst.pop(lin, None)
        elif key == lin:
            dst.pop(db, None)
    dst[key] = value


def _number(key: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(key, f"not a number: {text!r}") from None


@dataclass(frozen=True)
class RunSettings:
    params: SystemParams
    methods: tuple[str, ...]
    mc: McConfig


def resolve(raw: dict[str, str]) -> RunSettings:
    """Validate merged key/value strings into parameters and run settings."""
    values = {}
    for key, text in raw.items():
        if key in _DB_KEYS:
            values[_DB_KEYS[key]] = 10.0 ** (_number(key, text) / 10.0)
        elif key in _PARAM_KEYS:
            values[key] = _number(key, text)
    try:
        params = SystemParams(**values)
    except ParameterError as exc:
        name = exc.field
        if name in ("G_b", "G_e") and f"{name}_dB" in raw:
            name = f"{name}_dB"
        raise ConfigError(name, str(exc).split(": ", 1)[-1]) from None

    run = {**_RUN_DEFAULTS, **{k: v for k, v in raw.items() if k in _RUN_DEFAULTS}}
    methods = tuple(m.strip() for m in run["methods"].split(",") if m.strip())
    if not methods:
        raise ConfigError("methods", "empty method list")
    for m in methods:
        if m not in METHODS:
            raise ConfigError("methods", f"unknown method {m!r}; choose from {', '.join(METHODS)}")
    if params.eta != 4.0:
        bad = [m for m in methods if m in ANALYTIC_METHODS]
        if bad:
            raise ConfigError("methods", f"{', '.join(bad)} need eta = 4; only monte_carlo "
                                         f"(spatial) supports eta = {params.eta:g}")
    samples = _number("samples", run["samples"])
    seed = _number("seed", run["seed"])
    if not samples.is_integer() or not seed.is_integer():
        raise ConfigError("samples" if not samples.is_integer() else "seed", "must be an integer")
    estimator = run["estimator"]
    if estimator == "auto":
        estimator = "distributional" if params.eta == 4.0 else "spatial"
    if estimator == "distributional" and params.eta != 4.0:
        raise ConfigError("estimator", "the distributional estimator needs eta = 4")
    try:
        mc = McConfig(n_samples=int(samples), estimator=estimator, master_seed=int(seed),
                      correlation_mode=run["correlation_mode"],
                      window_radius_factor=_number("window_radius_factor",
                                                   run["window_radius_factor"]))
    except ValueError as exc:
        raise ConfigError("mc", str(exc)) from None
    return RunSettings(params, methods, mc)


# evaluation and CSV ------------------------------------------------------------

def _fmt(x: float) -> str:
    return "" if x is None or (isinstance(x, float) and math.isnan(x)) else format(float(x), ".17g")


@dataclass(frozen=True)
class Row:
    axis: str
    axis_value: object
    bundle: MetricBundle
    notes: str = ""

    def cells(self):
        b = self.bundle
        av = self.axis_value
        av = _fmt(av) if isinstance(av, float) else ("" if av is None else str(av))
        return [self.axis, av, b.method, _fmt(b.eps_b), _fmt(b.eps_e), _fmt(b.p_sec),
                _fmt(b.p_out), _fmt(b.t_sec), _fmt(b.ci_half_width), self.notes]


def write_rows(rows, out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.cells())


def _notes(*parts) -> str:
    return ";".join(p for p in parts if p)


def evaluate_method(params: SystemParams, method: str, mc: McConfig,
                    dc: DerivedConstants | None = None) -> tuple[MetricBundle, str]:
    """One method at one point; returns the bundle and a notes string."""
    if method == "monte_carlo":
        res = estimate(params, mc, dc, warn=False)
        notes = _notes(f"estimator={mc.estimator}", f"n={mc.n_samples}", f"seed={mc.master_seed}",
                       f"hw_eps_b={_fmt(res.eps_b.half_width_95)}",
                       f"hw_eps_e={_fmt(res.eps_e.half_width_95)}",
                       "ci=p_sec")
        for w in res.warnings:
            print(f"secfbl: warning: {w}", file=sys.stderr)
        return res.metrics, notes
    bundle = evaluate(params, method, dc)
    notes = ""
    if bundle.fallback_reason:
        notes = f"fallback=closed_form->{bundle.method}"
        print(f"secfbl: warning: closed form not applicable ({bundle.fallback_reason}); "
              f"using {bundle.method}", file=sys.stderr)
    return bundle, notes


@dataclass(frozen=True)
class SweepSpec:
    """One curve: ``axis`` swept over ``values`` with everything else in ``fixed``."""

    axis: str
    values: tuple[float, ...]
    fixed: SystemParams
    methods: tuple[str, ...]
    mc: McConfig | None = None
    label: str = ""
    spot_checks: int = 0

    def __post_init__(self):
        if self.axis not in _PARAM_KEYS and self.axis not in _DB_KEYS:
            raise ConfigError("axis", f"{self.axis!r} is not a parameter")
        if not self.values:
            raise ConfigError("values", "empty sweep")
        for v in self.values:
            self.point(v)

    def point(self, value: float) -> SystemParams:
        try:
            if self.axis in _DB_KEYS:
                return self.fixed.replace(**{_DB_KEYS[self.axis]: 10.0 ** (value / 10.0)})
            return self.fixed.replace(**{self.axis: value})
        except ParameterError as exc:
            raise ConfigError(self.axis, str(exc).split(": ", 1)[-1]) from None


def _spot_indices(n: int, k: int) -> list[int]:
    if k <= 0:
        return []
    return sorted(set(int(round(i)) for i in np.linspace(0, n - 1, min(k, n))))


def run_sweep(specs: list[SweepSpec], threads: int | None = None) -> list[Row]:
    """Evaluate every (curve, point, method); rows come back in axis order."""
    jobs = []
    for spec in specs:
        spots = set(_spot_indices(len(spec.values), spec.spot_checks))
        for i, v in enumerate(spec.values):
            methods = list(spec.methods)
            if i in spots and "monte_carlo" not in methods:
                methods.append("monte_carlo")
            for m in methods:
                jobs.append((spec, v, m))

    def run(job):
        spec, v, m = job
        params = spec.point(v)
        bundle, notes = evaluate_method(params, m, spec.mc or McConfig())
        return Row(spec.axis, float(v), bundle, _notes(spec.label, notes))

    cap = threads if threads is not None else int(os.environ.get("SECFBL_THREADS", "0") or 0)
    workers = max(1, min(cap or (os.cpu_count() or 1), len(jobs)))
    if workers == 1:
        return [run(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, jobs))


# figure recipes ----------------------------------------------------------------

FIGURE_GRIDS = {
    # range of lambda_u is not tabulated; log grid over three decades
    "fig2": ("lambda_u", tuple(np.logspace(-5, -2, 13))),
    "fig3": ("G_b_dB", tuple(np.linspace(0.0, 40.0, 17))),
    "fig4": ("p", tuple(np.logspace(-4, 0, 17))),
}


def _label(**kw) -> str:
    return ";".join(f"{k}={format(v, 'g')}" for k, v in kw.items())


def figure_specs(fig: str, methods=("quadrature_normal",), mc: McConfig | None = None,
                 spot_checks: int = 3, base: SystemParams | None = None) -> list[SweepSpec]:
    """Parameter grids of the three result figures, one spec per curve."""
    if fig not in FIGURE_GRIDS:
        raise ConfigError("figure", f"unknown figure {fig!r}; choose from {', '.join(FIGURE_GRIDS)}")
    base = SystemParams(G_b=31.6, G_e=1.0) if base is None else base
    axis, values = FIGURE_GRIDS[fig]
    mc = mc or McConfig()
    specs = []

    def add(label, **fixed):
        specs.append(SweepSpec(axis, values, base.replace(**fixed), tuple(methods), mc,
                               _label(**label), spot_checks))

    if fig == "fig2":
        for R in (1 / 8, 1 / 4):
            for D in (20.0, 50.0, 100.0):
                add({"R": R, "D": D}, R=R, D=D, n=128, m=1, lambda_b=1e-4, p=1e-3)
    elif fig == "fig3":
        for lb in (1e-6, 1e-5, 1e-4):
            for p in (5e-2, 1e-2):
                add({"lambda_b": lb, "p": p}, lambda_b=lb, p=p, R=0.25, D=100.0,
                    lambda_u=1e-3, n=128, m=4)
    else:
        for lb in (1e-6, 1e-5, 1e-4, 1e-3):
            add({"lambda_b": lb}, lambda_b=lb, n=512, R=1 / 8, D=150.0, lambda_u=1e-3, m=2)
    return specs


# validation ----------------------------------------------------------------------

@dataclass
class Check:
    name: str
    left: str
    right: str
    value_left: float
    value_right: float
    deviation: float
    tolerance: float | None
    passed: bool | None  # None: informational

    @property
    def status(self) -> str:
        return "info" if self.passed is None else ("pass" if self.passed else "FAIL")


def _rel(a, b):
    return abs(a - b) / abs(b) if b != 0 else abs(a - b)


def corrupt_constants(dc: DerivedConstants, spec: str) -> DerivedConstants:
    """Multiply one constant, e.g. ``bob.z1=1.01`` or ``t=2``; test hook."""
    name, sep, factor = spec.partition("=")
    if not sep:
        raise ConfigError("corrupt-constant", f"expected NAME=FACTOR, got {spec!r}")
    f = _number("corrupt-constant", factor)
    group, dot, attr = name.partition(".")
    if not dot:
        if group not in ("t",):
            raise ConfigError("corrupt-constant", f"unknown constant {name!r}")
        return dc.replace(t=dc.t * f)
    if group not in ("bob", "eve") or not hasattr(getattr(dc, group), attr):
        raise ConfigError("corrupt-constant", f"unknown constant {name!r}")
    sub = getattr(dc, group)
    return dc.replace(**{group: dataclasses.replace(sub, **{attr: getattr(sub, attr) * f})})


def validation_checks(params: SystemParams, mc: McConfig, corrupt: str | None = None) -> list[Check]:
    """The cross-path matrix at one parameter point."""
    checks: list[Check] = []

    def rel_check(name, left, right, a, b, tol):
        d = _rel(a, b)
        checks.append(Check(name, left, right, a, b, d, tol, d <= tol))

    spatial = estimate(params, mc.replace(estimator="spatial", correlation_mode="independent"),
                       warn=False)
    shared = estimate(params, mc.replace(estimator="spatial", correlation_mode="shared_field"),
                      warn=False)
    for name, est in (("eps_b", spatial.eps_b), ("eps_e", spatial.eps_e), ("p_sec", spatial.p_sec)):
        checks.append(Check(f"{name} in [0,1]", "monte_carlo_spatial", "range", est.mean, math.nan,
                            math.nan, None, 0.0 <= est.mean <= 1.0))
    checks.append(Check("p_sec shared_field - independent", "mc_spatial_shared",
                        "mc_spatial_independent", shared.p_sec.mean, spatial.p_sec.mean,
                        shared.p_sec.mean - spatial.p_sec.mean, None, None))
    if params.eta != 4.0:
        # no analytic reference: split-seed agreement of the spatial estimator
        other = estimate(params, mc.replace(estimator="spatial", correlation_mode="independent",
                                            master_seed=mc.master_seed + 1), warn=False)
        for name in ("eps_b", "eps_e", "p_sec"):
            a, b = getattr(spatial, name), getattr(other, name)
            d = abs(a.mean - b.mean)
            tol = a.half_width_95 + b.half_width_95
            checks.append(Check(f"{name} CI overlap", "monte_carlo_spatial",
                                "monte_carlo_spatial_seed+1", a.mean, b.mean, d, tol, d <= tol))
        for row in ("closed_form", "appendix_sum", "quadrature_linearized", "quadrature_normal",
                    "monte_carlo_distributional"):
            checks.append(Check("n/a (eta != 4)", row, "", math.nan, math.nan, math.nan, None, None))
        return checks

    dc = derive_constants(params)
    dc_cf = corrupt_constants(dc, corrupt) if corrupt else dc
    qb_lin = eps_b_quadrature(params, dc, "linearized")
    qe_lin = eps_e_quadrature(params, dc, "linearized")
    qb_nor = eps_b_quadrature(params, dc, "normal")
    qe_nor = eps_e_quadrature(params, dc, "normal")

    if dc.closed_form_valid:
        cb = cf.eps_b_closed_form(dc_cf, params)
        ce = cf.eps_e_closed_form(dc_cf, params)
        ap = cf.appendix_sum(dc_cf, params)
        rel_check("eps_b", "closed_form", "quadrature_linearized", cb, qb_lin, 1e-3)
        rel_check("eps_e", "closed_form", "quadrature_linearized", ce, qe_lin, 1e-3)
        rel_check("eps_e", "closed_form", "appendix_sum", ce, ap, 1e-9)
        rel_check("eps_e", "appendix_sum", "quadrature_linearized", ap, qe_lin, 1e-3)
        lit_b = cf.printed_eps_b(dc, params)
        checks.append(Check("eps_b printed form", "printed", "quadrature_linearized",
                            lit_b, qb_lin, _rel(lit_b, qb_lin), None, None))
        lit_e = cf.printed_eps_e(dc, params, moment_spec=cf.eve_moment_spec)
        checks.append(Check("eps_e printed prefactors", "printed", "quadrature_linearized",
                            lit_e, qe_lin, _rel(lit_e, qe_lin), None, None))
    else:
        for row in ("closed_form", "appendix_sum"):
            checks.append(Check(f"n/a ({dc.closed_form_reason})", row, "", math.nan, math.nan,
                                math.nan, None, None))

    for name, lin, nor in (("eps_b", qb_lin, qb_nor), ("eps_e", qe_lin, qe_nor)):
        d = abs(lin - nor)
        checks.append(Check(name, "quadrature_linearized", "quadrature_normal", lin, nor, d, 0.06,
                            d <= 0.06))

    dist = estimate(params, mc.replace(estimator="distributional"), dc)
    for name, est, ref in (("eps_b", dist.eps_b, qb_nor), ("eps_e", dist.eps_e, qe_nor)):
        d = abs(est.mean - ref)
        tol = 3.0 * est.half_width_95
        checks.append(Check(name, "monte_carlo_distributional", "quadrature_normal", est.mean, ref,
                            d, tol, d <= tol))
    for name in ("eps_b", "eps_e", "p_sec"):
        a, b = getattr(spatial, name), getattr(dist, name)
        d = abs(a.mean - b.mean)
        tol = a.half_width_95 + b.half_width_95
        checks.append(Check(f"{name} CI overlap", "monte_carlo_spatial",
                            "monte_carlo_distributional", a.mean, b.mean, d, tol, d <= tol))
    return checks


def write_checks(checks: list[Check], out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["check", "left", "right", "value_left", "value_right", "deviation", "tolerance",
                "status"])
    for c in checks:
        w.writerow([c.name, c.left, c.right, _fmt(c.value_left), _fmt(c.value_right),
                    _fmt(c.deviation), _fmt(c.tolerance), c.status])


# argument handling -----------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--config", metavar="PATH", help="key = value configuration file")
    common.add_argument("--out", metavar="PATH", help="write CSV here instead of standard output")
    common.add_argument("--threads", type=int, default=None,
                        help="worker cap for sweeps (default: SECFBL_THREADS or CPU count)")

    ap = argparse.ArgumentParser(prog="secfbl", allow_abbrev=False,
                                 description="Finite-blocklength secrecy metrics for uplink IoT "
                                             "networks. Any model key may be passed as --key value.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("eval", parents=[common], allow_abbrev=False,
                   help="evaluate one parameter point with each requested method")
    fig = sub.add_parser("figure", parents=[common], allow_abbrev=False,
                         help="emit the parameter grid of a result figure")
    fig.add_argument("figure_id", metavar="FIGURE", help="fig2, fig3 or fig4")
    fig.add_argument("--spot-checks", type=int, default=3,
                     help="Monte Carlo points per curve (default 3, 0 disables)")
    sw = sub.add_parser("sweep", parents=[common], allow_abbrev=False,
                        help="sweep one parameter with the others fixed")
    sw.add_argument("--axis", required=True, help="parameter to sweep (a model key or G_b_dB/G_e_dB)")
    grid = sw.add_mutually_exclusive_group(required=True)
    grid.add_argument("--values", help="comma-separated axis values")
    grid.add_argument("--grid", help="lin:START:STOP:N or log:START:STOP:N")
    val = sub.add_parser("validate", parents=[common], allow_abbrev=False,
                         help="cross-check every evaluation path against the others")
    val.add_argument("--corrupt-constant", metavar="NAME=FACTOR",
                     help="test hook: scale one derived constant fed to the closed forms")
    return ap


def _axis_values(args) -> tuple[float, ...]:
    if args.values is not None:
        return tuple(_number("values", v) for v in args.values.split(",") if v.strip())
    kind, *rest = args.grid.split(":")
    if kind not in ("lin", "log") or len(rest) != 3:
        raise ConfigError("grid", f"expected lin:START:STOP:N or log:START:STOP:N, got {args.grid!r}")
    start, stop, n = (_number("grid", r) for r in rest)
    if not n.is_integer() or n < 1:
        raise ConfigError("grid", "N must be a positive integer")
    if kind == "log":
        if start <= 0 or stop <= 0:
            raise ConfigError("grid", "log grid bounds must be positive")
        return tuple(np.logspace(math.log10(start), math.log10(stop), int(n)))
    return tuple(np.linspace(start, stop, int(n)))


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run(argv) -> int:
    args, rest = _parser().parse_known_args(argv)
    raw = read_config(args.config) if args.config else {}
    for k, v in parse_overrides(rest).items():
        _merge(raw, k, v)

    if args.command == "figure":
        explicit_methods = "methods" in raw
        settings = resolve(raw)
        if args.figure_id not in FIGURE_GRIDS:
            raise ConfigError("figure", f"unknown figure {args.figure_id!r}; "
                                        f"choose from {', '.join(FIGURE_GRIDS)}")
        methods = settings.methods if explicit_methods else ("quadrature_normal",)
        mc = settings.mc
        if "monte_carlo" in methods:
            spots = 0
        else:
            spots = args.spot_checks
        specs = figure_specs(args.figure_id, tuple(methods), mc, spots)
        rows = run_sweep(specs, args.threads)
    elif args.command == "sweep":
        settings = resolve(raw)
        specs = [SweepSpec(args.axis, _axis_values(args), settings.params, settings.methods,
                           settings.mc)]
        rows = run_sweep(specs, args.threads)
    elif args.command == "eval":
        settings = resolve(raw)
        rows = []
        dc = derive_constants(settings.params)
        for m in settings.methods:
            bundle, notes = evaluate_method(settings.params, m, settings.mc, dc)
            rows.append(Row("", None, bundle, notes))
    else:
        settings = resolve({**raw, "methods": "monte_carlo"})
        checks = validation_checks(settings.params, settings.mc, args.corrupt_constant)
        buf = io.StringIO()
        write_checks(checks, buf)
        _emit(buf.getvalue(), args.out)
        failed = [c for c in checks if c.passed is False]
        gated = [c for c in checks if c.passed is not None]
        print(f"secfbl validate: {len(gated) - len(failed)}/{len(gated)} checks passed",
              file=sys.stderr)
        for c in failed:
            print(f"  FAIL {c.name}: {c.left} vs {c.right} deviation {c.deviation:.3g} "
                  f"> tolerance {c.tolerance:.3g}", file=sys.stderr)
        return EXIT_VALIDATION if failed else EXIT_OK

    buf = io.StringIO()
    write_rows(rows, buf)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        return _run(sys.argv[1:] if argv is None else argv)
    except (ConfigError, ParameterError) as exc:
        print(f"secfbl: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ArithmeticError as exc:
        print(f"secfbl: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
