"""Command-line interface: ``ridgeboost {simulate,estimate,audit,check-equivalence,profile}``.

Configuration is a flat ``key = value`` file with ``#`` comments. Every run
writes the fully resolved configuration to ``<out>/resolved.cfg``; feeding
that file back reproduces the outputs byte for byte.

Exit codes: 0 success, 1 failed equivalence check, 2 configuration error,
3 data error, 4 numerical failure.
"""

import argparse
import csv
import logging
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .audit import audit as audit_model
from .boost import RESULT_COLUMNS, RidgeBooster
from .exceptions import (
    ConfigError,
    DegenerateData,
    DimensionMismatch,
    EmptyData,
    EvaluationFailure,
    FileError,
    InvalidParameter,
    NoConvergence,
    NotFactorizable,
    RidgeBoostError,
    SchemaError,
)
from .features import RandomFourierFeatures
from .functionals import (
    DiffSpec,
    average_derivative_functional,
    counterfactual_mean_functional,
    functional_on_features,
    missing_mean_functional,
)
from .riesz import check_equivalence
from .sim import CSV_COLUMNS, SimSettings, run_monte_carlo

log = logging.getLogger(__name__)

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3, 4

# -- configuration ------------------------------------------------------------


def _int(key, value, minimum=None):
    try:
        out = int(value)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {value!r}") from None
    if minimum is not None and out < minimum:
        raise ConfigError(f"{key}: must be >= {minimum}, got {out}")
    return out


def _float(key, value):
    try:
        out = float(value)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {value!r}") from None
    if not math.isfinite(out):
        raise ConfigError(f"{key}: must be finite")
    return out


def _positive_or_auto(key, value, auto="auto"):
    if value == auto:
        return value
    out = _float(key, value)
    if not out > 0:
        raise ConfigError(f"{key}: must be > 0, got {value}")
    return out


def _choice(*options):
    def parse(key, value):
        if value not in options:
            raise ConfigError(f"{key}: expected one of {', '.join(options)}, got {value!r}")
        return value

    return parse


def _bool(key, value):
    low = value.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected true or false, got {value!r}")


def _float_list(key, value):
    items = [v.strip() for v in value.split(",") if v.strip()]
    if not items:
        raise ConfigError(f"{key}: empty list")
    return [_float(key, v) for v in items]


def _int_list(key, value):
    items = [v.strip() for v in value.split(",") if v.strip()]
    if not items:
        raise ConfigError(f"{key}: empty list")
    return [_int(key, v, minimum=2) for v in items]


def _text(key, value):
    return value


def _auto_int(key, value):
    return value if value == "auto" else _int(key, value, minimum=2)


# key -> (default, parser, commands using it)
_ALL = ("simulate", "estimate", "audit", "check-equivalence", "profile")
_MODEL = ("simulate", "estimate", "audit", "profile")
_DATA = ("estimate", "profile")
CONFIG_KEYS = {
    "seed": ("0", lambda k, v: _int(k, v, minimum=0), _ALL),
    "lambda": ("auto", _positive_or_auto, _MODEL),
    "init": ("krr", _choice("krr", "zero"), _MODEL),
    "features": ("rff", _choice("rff", "identity", "polynomial"), _MODEL),
    "kernel": ("none", _choice("none", "rbf", "linear", "polynomial"), _MODEL),
    "n_components": ("200", lambda k, v: _int(k, v, minimum=1), _MODEL),
    "degree": ("2", lambda k, v: _int(k, v, minimum=1), _MODEL),
    "bandwidth": ("median", lambda k, v: _positive_or_auto(k, v, auto="median"), _MODEL),
    "standardize": ("true", _bool, _MODEL),
    "residuals": ("loo", _choice("loo", "boosted", "init"), _MODEL),
    "n_grid": ("100,300,500", _int_list, ("simulate",)),
    "mu_grid": ("-1,0,1", _float_list, ("simulate",)),
    "replications": ("500", lambda k, v: _int(k, v, minimum=1), ("simulate",)),
    "n_target": ("auto", _auto_int, ("simulate",)),
    "step": ("auto", _positive_or_auto, ("simulate",)),
    "source_mu": ("0", _float, ("simulate",)),
    "n_jobs": ("1", lambda k, v: _int(k, v, minimum=1), ("simulate",)),
    "source": ("", _text, ("estimate", "audit", "profile")),
    "target": ("", _text, _DATA),
    "holdout": ("", _text, ("audit",)),
    "outcome": ("y", _text, ("estimate", "audit", "profile")),
    "functional": ("missing_mean", _text, _DATA),
    "method": ("boosted", _choice("boosted", "naive"), _DATA),
    "checks": ("100", lambda k, v: _int(k, v, minimum=1), ("check-equivalence",)),
}


def read_config_text(text, origin="<config>"):
    """Parse ``key = value`` lines; later keys override earlier ones."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{lineno}: expected key = value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{origin}:{lineno}: unknown key {key!r}")
        raw[key] = value
    return raw


def resolve_config(command, raw, seed=None):
    """Fill defaults and parse values for ``command``.

    Returns ``(resolved_text, parsed)`` where ``resolved_text`` lists every
    key the command uses in a fixed order.
    """
    raw = dict(raw)
    if seed is not None:
        raw["seed"] = str(seed)
    text, parsed = {}, {}
    for key, (default, parser, commands) in CONFIG_KEYS.items():
        if command not in commands:
            continue
        value = raw.get(key, default)
        text[key] = value
        parsed[key] = parser(key, value)
    return text, parsed


def write_resolved(out_dir, command, text):
    lines = [f"# resolved configuration for `ridgeboost {command}` (ridgeboost {__version__})"]
    lines += [f"{k} = {v}" for k, v in text.items()]
    (out_dir / "resolved.cfg").write_text("\n".join(lines) + "\n")


# -- tabular I/O -------------------------------------------------------------


def fmt(value):
    """Round-trip text for CSV cells: 17 significant digits for floats."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path, columns, rows, footer=None):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt(row[c]) for c in columns])
        if footer:
            fh.write(f"# {footer}\n")


def read_table(path):
    """Read a rectangular numeric CSV with a header row.

    Returns
    -------
    header : list of str
    data : ndarray of shape (n_rows, n_columns)
    """
    path = Path(path)
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise FileError(f"cannot open {path}: {exc.strerror}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError(f"{path}: empty file, header row required") from None
        if not header or any(not h for h in header):
            raise SchemaError(f"{path}: line 1: blank column name in header")
        if len(set(header)) != len(header):
            raise SchemaError(f"{path}: line 1: duplicate column names")
        rows = []
        for fields in reader:
            lineno = reader.line_num
            if not fields or (len(fields) == 1 and not fields[0].strip()):
                continue
            if len(fields) != len(header):
                raise SchemaError(f"{path}: line {lineno}: expected {len(header)} fields, found {len(fields)}")
            row = []
            for name, cell in zip(header, fields):
                cell = cell.strip()
                if not cell:
                    raise SchemaError(f"{path}: line {lineno}: missing value in column {name!r}")
                try:
                    row.append(float(cell))
                except ValueError:
                    raise SchemaError(f"{path}: line {lineno}: non-numeric value {cell!r} in column {name!r}") from None
            rows.append(row)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return header, np.asarray(rows, dtype=float)


def _split_outcome(path, header, data, outcome, required):
    if outcome in header:
        j = header.index(outcome)
        cov = [h for h in header if h != outcome]
        return cov, np.delete(data, j, axis=1), data[:, j]
    if required:
        raise SchemaError(f"{path}: outcome column {outcome!r} not found")
    return header, data, None


def load_labeled(path, outcome):
    header, data = read_table(path)
    cov, X, y = _split_outcome(path, header, data, outcome, required=True)
    if not cov:
        raise SchemaError(f"{path}: no covariate columns besides {outcome!r}")
    return cov, X, y


def load_covariates(path, outcome, expected):
    header, data = read_table(path)
    cov, X, _ = _split_outcome(path, header, data, outcome, required=False)
    if cov != expected:
        raise SchemaError(f"{path}: covariate columns {cov} do not match source columns {expected}")
    return X


# -- functional specs ----------------------------------------------------------

_SPEC = re.compile(r"^\s*([a-z_]+)\s*(?:\((.*)\))?\s*$")
_RANGE = re.compile(r"^(-?\d+)\s*\.\.\s*(-?\d+)$")


def _spec_args(spec, body):
    pos, kw = [], {}
    if body is None or not body.strip():
        return pos, kw
    for part in body.split(","):
        part = part.strip()
        if "=" in part:
            k, v = (s.strip() for s in part.split("=", 1))
            kw[k] = v
        elif kw:
            raise ConfigError(f"functional: positional argument after keyword in {spec!r}")
        else:
            pos.append(part)
    return pos, kw


def _column(spec, token, columns):
    if token in columns:
        return columns.index(token)
    try:
        j = int(token)
    except ValueError:
        raise ConfigError(f"functional: unknown column {token!r} in {spec!r}") from None
    if not 0 <= j < len(columns):
        raise ConfigError(f"functional: column index {j} out of range in {spec!r}")
    return j


def _values(spec, token):
    m = _RANGE.match(token)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if hi < lo:
            raise ConfigError(f"functional: empty range {token!r} in {spec!r}")
        return [float(a) for a in range(lo, hi + 1)]
    try:
        return [float(token)]
    except ValueError:
        raise ConfigError(f"functional: bad value {token!r} in {spec!r}") from None


def _pick(spec, names, pos, kw):
    """Bind positional and keyword arguments to ``names`` (all optional)."""
    if len(pos) > len(names):
        raise ConfigError(f"functional: too many arguments in {spec!r}")
    bound = dict(zip(names, pos))
    for k, v in kw.items():
        if k not in names or k in bound:
            raise ConfigError(f"functional: unexpected argument {k!r} in {spec!r}")
        bound[k] = v
    return bound


def parse_functionals(text, columns, X_eval):
    """Build the functionals named in ``text`` (``;``-separated) on ``X_eval``.

    Grammar: ``missing_mean``, ``avg_derivative(j[, h])`` and
    ``counterfactual(j, a)`` where ``j`` is a column name or index and ``a``
    is a number or an inclusive integer range ``lo..hi``.
    """
    out = []
    for spec in (s.strip() for s in text.split(";")):
        if not spec:
            continue
        m = _SPEC.match(spec)
        if not m:
            raise ConfigError(f"functional: cannot parse {spec!r}")
        name, body = m.group(1), m.group(2)
        pos, kw = _spec_args(spec, body)
        if name == "missing_mean":
            if pos or kw:
                raise ConfigError(f"functional: missing_mean takes no arguments, got {spec!r}")
            out.append(missing_mean_functional(X_eval))
        elif name == "avg_derivative":
            args = _pick(spec, ("j", "h"), pos, kw)
            if "j" not in args:
                raise ConfigError(f"functional: avg_derivative needs a coordinate in {spec!r}")
            j = _column(spec, args["j"], columns)
            label = f"avg_derivative({columns[j]})"
            if "h" in args:
                h = _float("functional", args["h"])
                if not h > 0:
                    raise ConfigError(f"functional: step must be > 0 in {spec!r}")
                out.append(average_derivative_functional(X_eval, DiffSpec(j, h), label=label))
            else:
                out.append(average_derivative_functional(X_eval, j, label=label))
        elif name == "counterfactual":
            args = _pick(spec, ("j", "a"), pos, kw)
            if "j" not in args or "a" not in args:
                raise ConfigError(f"functional: counterfactual needs j and a in {spec!r}")
            j = _column(spec, args["j"], columns)
            for a in _values(spec, args["a"]):
                label = f"counterfactual({columns[j]}={a:g})"
                out.append(counterfactual_mean_functional(X_eval, j, a, label=label))
        else:
            raise ConfigError(f"functional: unknown functional {name!r}")
    if not out:
        raise ConfigError("functional: no functional given")
    return out


# -- model construction --------------------------------------------------------


def make_booster(cfg):
    return RidgeBooster(**_booster_params(cfg))


def _booster_params(cfg):
    return dict(
        init=cfg["init"],
        features=cfg["features"],
        kernel=None if cfg["kernel"] == "none" else cfg["kernel"],
        n_components=cfg["n_components"],
        degree=cfg["degree"],
        bandwidth=cfg["bandwidth"],
        lam=cfg["lambda"],
        standardize=cfg["standardize"],
        residuals=cfg["residuals"],
        random_state=cfg["seed"],
    )


# -- commands --------------------------------------------------------------


def cmd_simulate(cfg, out_dir):
    params = _booster_params(cfg)
    settings = SimSettings(
        n_components=cfg["n_components"],
        lam=cfg["lambda"],
        residuals=cfg["residuals"],
        standardize=cfg["standardize"],
        n_target=None if cfg["n_target"] == "auto" else cfg["n_target"],
        step=None if cfg["step"] == "auto" else cfg["step"],
        source_mu=cfg["source_mu"],
        booster_params={k: params[k] for k in ("init", "features", "kernel", "degree", "bandwidth")},
    )
    rows = run_monte_carlo(
        cfg["n_grid"], cfg["mu_grid"], cfg["replications"], base_seed=cfg["seed"], settings=settings, n_jobs=cfg["n_jobs"]
    )
    failed = sum(r.failed for r in rows)
    write_csv(out_dir / "coverage.csv", CSV_COLUMNS, [vars(r) for r in rows], footer=f"failed_estimates={failed}")
    (out_dir / "figure1.svg").write_text(coverage_svg(rows))
    print(f"wrote {len(rows)} coverage rows to {out_dir / 'coverage.csv'} ({failed} failed estimates)")
    return EXIT_OK


def _fit_source(cfg):
    if not cfg["source"]:
        raise ConfigError("source: a source CSV path is required")
    columns, X, y = load_labeled(cfg["source"], cfg["outcome"])
    model = make_booster(cfg).fit(X, y)
    return columns, X, model


def _family(cfg, columns, X_source):
    X_eval = load_covariates(cfg["target"], cfg["outcome"], columns) if cfg["target"] else X_source
    return parse_functionals(cfg["functional"], columns, X_eval)


def cmd_estimate(cfg, out_dir):
    columns, X, model = _fit_source(cfg)
    rows = []
    for theta in _family(cfg, columns, X):
        try:
            est = model.estimate(theta, method=cfg["method"])
        except RidgeBoostError as exc:
            raise type(exc)(f"functional {theta.label!r}: {exc}") from exc
        rows.append(est.as_dict())
    write_csv(out_dir / "estimates.csv", RESULT_COLUMNS, rows)
    print(f"wrote {len(rows)} estimates to {out_dir / 'estimates.csv'}")
    return EXIT_OK


def cmd_profile(cfg, out_dir):
    columns, X, model = _fit_source(cfg)
    results = model.profile(_family(cfg, columns, X), method=cfg["method"])
    write_csv(out_dir / "profile.csv", RESULT_COLUMNS + ("status",), [r.as_dict() for r in results])
    bad = sum(r.status != "ok" for r in results)
    print(f"wrote {len(results)} estimates to {out_dir / 'profile.csv'} ({bad} failed)")
    return EXIT_OK


AUDIT_COLUMNS = ("mae_init", "mae_boosted", "contraction_factor", "holdout_mae_init", "holdout_mae", "lambda", "n_eigenvalues", "status")


def cmd_audit(cfg, out_dir):
    columns, _, model = _fit_source(cfg)
    if cfg["holdout"]:
        hold_cols, Xh, yh = load_labeled(cfg["holdout"], cfg["outcome"])
        if hold_cols != columns:
            raise SchemaError(f"{cfg['holdout']}: covariate columns {hold_cols} do not match source columns {columns}")
        report = audit_model(model, Xh, yh)
    else:
        report = audit_model(model)
    nan = math.nan
    row = dict(
        mae_init=report.mae_init,
        mae_boosted=report.mae_boosted,
        contraction_factor=report.contraction_factor,
        holdout_mae_init=nan if report.holdout_mae_init is None else report.holdout_mae_init,
        holdout_mae=nan if report.holdout_mae is None else report.holdout_mae,
        n_eigenvalues=len(report.eigenvalues),
        status="PASS" if report.passed else "FAIL",
    )
    row["lambda"] = model.lam_
    write_csv(out_dir / "audit.csv", AUDIT_COLUMNS, [row])
    write_csv(out_dir / "audit_eigenvalues.csv", ("eigenvalue",), [{"eigenvalue": v} for v in report.eigenvalues])
    print(f"{row['status']}: mae {report.mae_init:.6g} -> {report.mae_boosted:.6g} (bound factor {report.contraction_factor:.6g})")
    return EXIT_OK


EQUIVALENCE_LAMBDAS = (1e-3, 1e-1, 1.0, 10.0)


def random_equivalence_instance(rng, kind, lam):
    """One random ``(Phi, z, theta(Phi))`` instance with ``n <= 80`` and ``D <= 12``."""
    n = int(rng.integers(5, 81))
    d = int(rng.integers(1, 5))
    D = int(rng.integers(1, 13))
    X = rng.normal(size=(n, d))
    z = rng.normal(size=n) * rng.uniform(0.1, 10.0)
    fmap = RandomFourierFeatures(D, bandwidth=float(rng.uniform(0.5, 3.0)), random_state=int(rng.integers(2**31))).fit(X)
    X_eval = rng.normal(size=(int(rng.integers(1, 41)), d))
    j = int(rng.integers(d))
    if kind == "missing_mean":
        theta = missing_mean_functional(X_eval)
    elif kind == "avg_derivative":
        theta = average_derivative_functional(X_eval, DiffSpec(j, float(rng.uniform(0.01, 0.5))))
    else:
        theta = counterfactual_mean_functional(X_eval, j, float(rng.normal()))
    return fmap.transform(X), z, functional_on_features(theta, fmap), lam


def cmd_check_equivalence(cfg, out_dir, beta_perturbation=0.0):
    rng = np.random.default_rng(cfg["seed"])
    kinds = ("missing_mean", "avg_derivative", "counterfactual")
    worst_gap, worst_ratio, failures = 0.0, 0.0, 0
    for i in range(cfg["checks"]):
        lam = EQUIVALENCE_LAMBDAS[(i // len(kinds)) % len(EQUIVALENCE_LAMBDAS)]
        Phi, z, theta_phi, lam = random_equivalence_instance(rng, kinds[i % len(kinds)], lam)
        gap, theta_hat = check_equivalence(Phi, z, theta_phi, lam, beta_perturbation=beta_perturbation)
        tol = 1e-8 * (1.0 + abs(theta_hat))
        worst_gap = max(worst_gap, gap)
        worst_ratio = max(worst_ratio, gap / tol)
        failures += gap > tol
    print(f"checks={cfg['checks']} max_discrepancy={worst_gap:.3e} max_discrepancy/tolerance={worst_ratio:.3e} failures={failures}")
    return EXIT_OK if failures == 0 else EXIT_MISMATCH


COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "audit": cmd_audit,
    "check-equivalence": cmd_check_equivalence,
    "profile": cmd_profile,
}

# -- figure ----------------------------------------------------------------


def coverage_svg(rows, width=260, height=220):
    """Coverage against ``n``: one panel per target ``mu``, dashed rule at 0.95."""
    mus = sorted({r.mu_target for r in rows})
    ns = sorted({r.n for r in rows})
    colors = {"naive": "#d95f02", "boosted": "#1b9e77"}
    left, right, top, bottom = 44, 12, 28, 36
    pw, ph = width - left - right, height - top - bottom
    total_w = width * len(mus)

    def x_of(n):
        if len(ns) == 1:
            return left + pw / 2
        return left + pw * (n - ns[0]) / (ns[-1] - ns[0])

    def y_of(c):
        return top + ph * (1.0 - c)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{height + 24}" '
        f'viewBox="0 0 {total_w} {height + 24}" font-family="sans-serif" font-size="11">',
        "<!-- data: n,mu_target,method,coverage,replications",
    ]
    out += [f"{r.n},{fmt(r.mu_target)},{r.method},{fmt(r.coverage)},{r.replications}" for r in rows]
    out.append("-->")
    out.append(f'<rect width="{total_w}" height="{height + 24}" fill="white"/>')
    for k, mu in enumerate(mus):
        ox = k * width
        out.append(f'<g transform="translate({ox},0)">')
        out.append(f'<text x="{left + pw / 2:.1f}" y="16" text-anchor="middle">target mu = {mu:g}</text>')
        out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>')
        for c in (0.0, 0.5, 1.0):
            out.append(f'<text x="{left - 4}" y="{y_of(c) + 4:.1f}" text-anchor="end">{c:g}</text>')
        for n in ns:
            out.append(f'<text x="{x_of(n):.1f}" y="{top + ph + 14}" text-anchor="middle">{n}</text>')
        out.append(f'<text x="{left + pw / 2:.1f}" y="{top + ph + 30}" text-anchor="middle">n</text>')
        y95 = y_of(0.95)
        out.append(
            f'<line x1="{left}" y1="{y95:.1f}" x2="{left + pw}" y2="{y95:.1f}" stroke="#000" stroke-dasharray="4 3"/>'
        )
        for method, color in colors.items():
            pts = [(x_of(r.n), y_of(r.coverage)) for r in rows if r.mu_target == mu and r.method == method and not math.isnan(r.coverage)]
            if not pts:
                continue
            if len(pts) > 1:
                path = " ".join(f"{x:.1f},{y:.1f}" for x, y in pts)
                out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
            out += [f'<circle cx="{x:.1f}" cy="{y:.1f}" r="2.5" fill="{color}"/>' for x, y in pts]
        out.append("</g>")
    for i, (method, color) in enumerate(colors.items()):
        x = 10 + 90 * i
        out.append(f'<rect x="{x}" y="{height + 8}" width="10" height="10" fill="{color}"/>')
        out.append(f'<text x="{x + 14}" y="{height + 17}">{method}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# -- entry point -------------------------------------------------------------


def _exit_code(exc):
    if isinstance(exc, (ConfigError, InvalidParameter)):
        return EXIT_CONFIG
    if isinstance(exc, (NotFactorizable, NoConvergence)):
        return EXIT_NUMERIC
    if isinstance(exc, (SchemaError, FileError, DimensionMismatch, EmptyData, DegenerateData, EvaluationFailure)):
        return EXIT_DATA
    return EXIT_NUMERIC


def build_parser():
    parser = argparse.ArgumentParser(prog="ridgeboost", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ridgeboost {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="flat key = value configuration file")
        p.add_argument("--seed", type=int, help="overrides the seed in the configuration")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory (created if missing)")
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "check-equivalence":
            # negative control for the checker itself
            p.add_argument("--force-mismatch", action="store_true", help=argparse.SUPPRESS)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        raw = {}
        if args.config is not None:
            try:
                text = args.config.read_text()
            except OSError as exc:
                raise ConfigError(f"cannot read config {args.config}: {exc.strerror}") from exc
            raw = read_config_text(text, str(args.config))
        resolved_text, cfg = resolve_config(args.command, raw, seed=args.seed)
        out_dir = args.out
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise FileError(f"cannot create output directory {out_dir}: {exc.strerror}") from exc
        write_resolved(out_dir, args.command, resolved_text)
        if args.command == "check-equivalence":
            return cmd_check_equivalence(cfg, out_dir, beta_perturbation=1e-3 if args.force_mismatch else 0.0)
        return COMMANDS[args.command](cfg, out_dir)
    except RidgeBoostError as exc:
        code = _exit_code(exc)
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return code
    except np.linalg.LinAlgError as exc:
        print(f"error (numerical): {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
