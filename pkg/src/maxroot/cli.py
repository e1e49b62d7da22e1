"""Command-line frontend.

Commands
--------
tw         evaluate the Tracy-Widom table (cdf/pdf/quantile/vonmises/table)
critval    critical value and constants for a test configuration
test       run a batch test on data files (cov | manova)
simulate   Monte Carlo experiments (maxtw | cov-power | manova-power)

Exit codes: 0 success, 1 usage/domain, 2 data/ingestion, 3 numerical.
All outputs are deterministic: rerunning a simulate command with the same
seed produces byte-identical files for any worker count.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, battest, painleve, simlab
from .centering import BetaDims, centering_scaling, validate_regime
from .errors import DataError, DomainError, MaxrootError, NumericalError
from .extremes import norm_constants_exact
from .matvar import RngStream


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors (argparse default is 2)
        self.print_usage(sys.stderr)
        print(f"error[usage]: {message}", file=sys.stderr)
        sys.exit(1)


def _fmt(v: float) -> str:
    return repr(float(v))


def _emit(obj, as_json: bool) -> None:
    if as_json:
        print(json.dumps(obj, indent=2, sort_keys=True))
    else:
        for k, v in obj.items():
            print(f"{k}: {v}")


def _load_table(args) -> painleve.TracyWidomTable:
    if getattr(args, "table", None):
        return painleve.TracyWidomTable(solution=painleve.load_table(args.table))
    return painleve.default_table()


def _parse_gamma_grid(text: str) -> list[float]:
    """``start:stop:step`` inclusive of both endpoints, or a single value."""
    parts = text.split(":")
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) != 3:
        raise DomainError(f"gamma grid {text!r} must be 'start:stop:step' or a single value")
    start, stop, step = (float(v) for v in parts)
    if step <= 0 or stop < start:
        raise DomainError(f"bad gamma grid {text!r}")
    n = int(round((stop - start) / step))
    grid = [start + k * step for k in range(n + 1)]
    if grid[-1] > stop + 1e-9 * max(1.0, abs(stop)):
        grid.pop()
    return grid


# ---------------------------------------------------------------------------
# data ingestion
# ---------------------------------------------------------------------------

def _read_matrix_csv(path: str) -> np.ndarray:
    """Strict numeric CSV: equal-width rows of floats, no header."""
    rows = []
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror or exc}") from exc
    with fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if row[0].lstrip().startswith("#"):
                continue
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: non-numeric cell ({exc})") from exc
            if len(rows[-1]) != len(rows[0]):
                raise DataError(
                    f"{path}:{lineno}: ragged row ({len(rows[-1])} cells, expected {len(rows[0])})"
                )
    if not rows:
        raise DataError(f"{path}: no data rows")
    return np.asarray(rows)


def _read_grouped_csv(path: str, group_col: str) -> np.ndarray:
    """CSV with a header; returns observations shaped (r, n, p), balanced."""
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror or exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if group_col not in header:
            raise DataError(f"{path}: no column named {group_col!r} in header {header}")
        g_idx = header.index(group_col)
        groups: dict[str, list[list[float]]] = {}
        order: list[str] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{lineno}: ragged row")
            key = row[g_idx].strip()
            try:
                vec = [float(v) for i, v in enumerate(row) if i != g_idx]
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: non-numeric cell ({exc})") from exc
            if key not in groups:
                groups[key] = []
                order.append(key)
            groups[key].append(vec)
    sizes = {len(groups[k]) for k in order}
    if len(sizes) != 1:
        raise DataError(f"{path}: unbalanced groups (sizes {sorted(len(groups[k]) for k in order)})")
    return np.asarray([groups[k] for k in order])


def _read_cov_manifest(path: str) -> list[tuple[str, str]]:
    base = Path(path).parent
    pairs = []
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror or exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise DataError(f"{path}:{lineno}: expected 'file1,file2', got {line!r}")
        pairs.append((str(base / parts[0]), str(base / parts[1])))
    if not pairs:
        raise DataError(f"{path}: empty manifest")
    return pairs


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_tw(args) -> int:
    if args.tw_command == "table":
        sol = painleve.solve_hastings_mcleod(args.x_left, args.x_right, args.tol)
        painleve.save_table(sol, args.out)
        print(f"wrote {args.out} ({len(sol.grid)} grid points)")
        return 0
    table = _load_table(args)
    if args.tw_command == "cdf":
        f = painleve.tw2_cdf if args.which == 2 else painleve.tw1_cdf
        print(_fmt(f(table, args.x)))
    elif args.tw_command == "pdf":
        print(_fmt(painleve.tw1_pdf(table, args.x)))
    elif args.tw_command == "quantile":
        print(_fmt(painleve.tw1_quantile(table, args.u)))
    elif args.tw_command == "vonmises":
        print(_fmt(painleve.von_mises_ratio(table, args.x)))
    return 0


def cmd_critval(args) -> int:
    table = _load_table(args)
    dims = BetaDims(args.p, args.n1, args.n2)
    cs = centering_scaling(dims)
    consts = norm_constants_exact(table, args.m)
    c = battest.critical_value(args.alpha, cs, consts)
    diag = validate_regime(dims, args.m)
    out = {
        "alpha": args.alpha,
        "p": args.p,
        "n1": args.n1,
        "n2": args.n2,
        "m": args.m,
        "c_alpha": c,
        "logit_c_alpha": float(np.log(c / (1.0 - c))),
        "mu": cs.mu,
        "sigma": cs.sigma,
        "a_m": consts.a_m,
        "b_m": consts.b_m,
        "regime_flags": list(diag.flags),
    }
    _emit(out, args.json)
    return 0


def _batch_result_json(result: battest.BatchTestResult, diag) -> dict:
    return {
        "alpha": result.alpha,
        "m": len(result.thetas),
        "dims": {
            "p": result.cs.dims.p,
            "n1": result.cs.dims.n1,
            "n2": result.cs.dims.n2,
        },
        "mu": result.cs.mu,
        "sigma": result.cs.sigma,
        "a_m": result.consts.a_m,
        "b_m": result.consts.b_m,
        "thetas": [float(v) for v in result.thetas],
        "theta_max": result.theta_max,
        "z_score": result.z_score,
        "p_value": result.p_value,
        "c_alpha": result.c_alpha,
        "reject": result.reject,
        "regime_flags": list(diag.flags),
    }


def _print_test_summary(result: battest.BatchTestResult, diag) -> None:
    print(f"m = {len(result.thetas)} sub-hypotheses, alpha = {result.alpha}")
    print(f"theta_max = {result.theta_max:.6f}  c_alpha = {result.c_alpha:.6f}")
    print(f"z_score = {result.z_score:.6f}  p_value = {result.p_value:.6g}")
    for flag in diag.flags:
        print(f"warning: {flag}")
    print("decision: " + ("REJECT the global null" if result.reject else "do not reject"))


def cmd_test(args) -> int:
    table = _load_table(args)
    if args.test_command == "cov":
        if args.manifest:
            pairs = _read_cov_manifest(args.manifest)
        else:
            pairs = [(a, b) for a, b in args.pair]
        mats = [(_read_matrix_csv(f1), _read_matrix_csv(f2)) for f1, f2 in pairs]
        shapes = {(x1.shape, x2.shape) for x1, x2 in mats}
        if len(shapes) != 1:
            raise DataError(
                f"heterogeneous pair shapes across the batch: {sorted(shapes)}; "
                "all m sub-hypotheses must share (n1, n2, p)"
            )
        (n1_rows, p), (n2_rows, p2) = next(iter(shapes))
        if p != p2:
            raise DataError(f"pair dimension mismatch: p={p} vs p={p2}")
        thetas = []
        if args.assume_zero_mean:
            df1, df2 = n1_rows, n2_rows
        else:
            df1, df2 = n1_rows - 1, n2_rows - 1
            if df1 < 1 or df2 < 1:
                raise DataError("need at least 2 rows per sample to center; "
                                "use --assume-zero-mean for 1-row cross products")
        for x1, x2 in mats:
            if not args.assume_zero_mean:
                x1 = x1 - x1.mean(axis=0)
                x2 = x2 - x2.mean(axis=0)
            pair = battest.CovPairSample(
                s1=(x1.T @ x1) / df1, s2=(x2.T @ x2) / df2, n1=df1, n2=df2
            )
            thetas.append(battest.cov_equality_statistic(pair))
        dims = BetaDims(p, df1, df2)
    else:  # manova
        batches = [battest.ManovaBatch(_read_grouped_csv(f, args.group_col)) for f in args.files]
        shapes = {b.observations.shape for b in batches}
        if len(shapes) != 1:
            raise DataError(f"heterogeneous batch shapes: {sorted(shapes)}; all batches must share (r, n, p)")
        thetas = []
        for b in batches:
            a_mat, b_mat = battest.manova_matrices(b)
            from .matvar import greatest_root

            thetas.append(greatest_root(a_mat, b_mat))
        b0 = batches[0]
        dims = BetaDims(b0.p, b0.r - 1, b0.r * (b0.n - 1))

    cs = centering_scaling(dims)
    consts = norm_constants_exact(table, len(thetas))
    result = battest.batch_test(thetas, cs, consts, args.alpha)
    diag = validate_regime(dims, len(thetas))
    payload = _batch_result_json(result, diag)
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"wrote {args.out}")
    _print_test_summary(result, diag)
    return 0


def _write_csv(path: Path, config: dict, header: list[str], rows) -> None:
    lines = [f"# {k}={json.dumps(config[k], sort_keys=True)}" for k in sorted(config)]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _write_manifest(path: Path, config: dict, outputs: dict, extra: dict | None = None) -> None:
    doc = {"package": "maxroot", "version": __version__, "config": config, "outputs": outputs}
    if extra:
        doc.update(extra)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def cmd_simulate(args) -> int:
    table = _load_table(args)
    rng = RngStream(args.seed)
    prefix = Path(args.out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)

    if args.sim_command == "maxtw":
        samples, report, qq = simlab.max_tw_experiment(args.m, args.reps, rng, table)
        config = {"experiment": "maxtw", "m": args.m, "reps": args.reps, "seed": args.seed}
        qq_path = prefix.with_suffix(".csv")
        _write_csv(qq_path, config, ["theoretical", "empirical"], qq)
        _write_manifest(
            prefix.with_suffix(".json"),
            config,
            {"qq_csv": qq_path.name},
            {"ks": {"statistic": report.statistic, "p_value": report.p_value, "n": report.n}},
        )
        print(f"KS statistic {report.statistic:.6f}, p-value {report.p_value:.4f}")
    else:
        gammas = _parse_gamma_grid(args.gamma)
        if args.sim_command == "cov-power":
            if args.paper_scale:
                args.p, args.m, args.reps = 100, 500, 8000
            curve = simlab.power_curve_cov(
                gammas, args.p, args.m, args.reps, args.alpha, rng, table, workers=args.workers
            )
        else:
            if args.paper_scale:
                args.p, args.r, args.m, args.reps = 100, 200, 500, 8000
            curve = simlab.power_curve_manova(
                gammas, args.p, args.r, args.n, args.m, args.reps, args.alpha, rng, table,
                workers=args.workers,
            )
        csv_path = prefix.with_suffix(".csv")
        rows = zip(curve.gamma_grid, curve.power, curve.mc_se)
        _write_csv(csv_path, curve.config, ["gamma", "power", "mc_se"], rows)
        _write_manifest(prefix.with_suffix(".json"), curve.config, {"power_csv": csv_path.name})
        for g, pw, se in zip(curve.gamma_grid, curve.power, curve.mc_se):
            print(f"gamma={g:g} power={pw:.4f} mc_se={se:.4f}")
    print(f"wrote {prefix.with_suffix('.csv')} and {prefix.with_suffix('.json')}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_table_arg(p) -> None:
    p.add_argument("--table", help="path to a saved twtable file (default: cached table)")


def build_parser() -> _Parser:
    parser = _Parser(prog="maxroot", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"maxroot {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    tw = sub.add_parser("tw", help="Tracy-Widom distribution values")
    tw_sub = tw.add_subparsers(dest="tw_command", required=True)
    p = tw_sub.add_parser("cdf", help="F1 (or F2) at a point")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--which", type=int, choices=(1, 2), default=1)
    _add_table_arg(p)
    p = tw_sub.add_parser("pdf", help="F1 density at a point")
    p.add_argument("--x", type=float, required=True)
    _add_table_arg(p)
    p = tw_sub.add_parser("quantile", help="F1 quantile")
    p.add_argument("--u", type=float, required=True)
    _add_table_arg(p)
    p = tw_sub.add_parser("vonmises", help="Von Mises ratio L(x)")
    p.add_argument("--x", type=float, required=True)
    _add_table_arg(p)
    p = tw_sub.add_parser("table", help="build and save a table")
    p.add_argument("--out", required=True)
    p.add_argument("--x-left", type=float, default=painleve.DEFAULT_X_LEFT)
    p.add_argument("--x-right", type=float, default=painleve.DEFAULT_X_RIGHT)
    p.add_argument("--tol", type=float, default=painleve.DEFAULT_TOL)

    p = sub.add_parser("critval", help="critical value for a configuration")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n1", type=int, required=True)
    p.add_argument("--n2", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    _add_table_arg(p)

    test = sub.add_parser("test", help="run a batch test on data files")
    test_sub = test.add_subparsers(dest="test_command", required=True)
    p = test_sub.add_parser("cov", help="batch covariance-equality test")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--manifest", help="text file with one 'file1,file2' pair per line")
    src.add_argument("--pair", nargs=2, action="append", metavar=("FILE1", "FILE2"))
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--assume-zero-mean", action="store_true",
                   help="use raw cross-products (df = rows) instead of centering (df = rows - 1)")
    p.add_argument("--out", help="write the full result as JSON")
    _add_table_arg(p)
    p = test_sub.add_parser("manova", help="batch MANOVA greatest-root test")
    p.add_argument("files", nargs="+", help="one grouped CSV per batch")
    p.add_argument("--group-col", default="group")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--out", help="write the full result as JSON")
    _add_table_arg(p)

    sim = sub.add_parser("simulate", help="Monte Carlo experiments")
    sim_sub = sim.add_subparsers(dest="sim_command", required=True)
    p = sim_sub.add_parser("maxtw", help="maxima of TW variates vs Gumbel")
    p.add_argument("--m", type=int, default=500)
    p.add_argument("--reps", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--workers", type=int, default=1, help="accepted for symmetry; maxtw runs serially")
    _add_table_arg(p)
    p = sim_sub.add_parser("cov-power", help="covariance-equality power curve")
    p.add_argument("--p", type=int, default=50)
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--reps", type=int, default=500)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--gamma", default="1:2.5:0.25", help="grid as start:stop:step (inclusive)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--paper-scale", action="store_true",
                   help="published scale (p=100, m=500, reps=8000); hours, not minutes")
    p.add_argument("--out-prefix", required=True)
    _add_table_arg(p)
    p = sim_sub.add_parser("manova-power", help="batch MANOVA power curve")
    p.add_argument("--p", type=int, default=30)
    p.add_argument("--r", type=int, default=60)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--m", type=int, default=50)
    p.add_argument("--reps", type=int, default=300)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--gamma", default="0:1:0.1", help="grid as start:stop:step (inclusive)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--paper-scale", action="store_true",
                   help="published scale (p=100, r=200, m=500, reps=8000)")
    p.add_argument("--out-prefix", required=True)
    _add_table_arg(p)

    return parser


_DISPATCH = {"tw": cmd_tw, "critval": cmd_critval, "test": cmd_test, "simulate": cmd_simulate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except DataError as exc:
        print(f"error[data]: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error[numerical]: {exc}", file=sys.stderr)
        return 3
    except (DomainError, MaxrootError) as exc:
        print(f"error[usage]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
