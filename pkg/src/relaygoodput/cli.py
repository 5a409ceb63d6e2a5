"""Command-line front end.

Subcommands ``point``, ``sweep``, ``optimize``, ``simulate`` and ``validate``
write one table (CSV or JSON) whose rows echo every input, so a file can be
reproduced without the command line that made it.

Exit status: 0 success, 1 usage or domain error, 2 validation hard failure.
"""

import argparse
import csv
import io
import itertools
import json
import math
import sys

import numpy as np

from . import analytic, montecarlo, optimizer
from .analytic import Mode
from .channel import DEFAULT_ALPHA, ChannelParams, db_to_linear
from .special import DomainError

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION = 0, 1, 2
Z_PASS, Z_HARD_FAIL = 3.0, 4.0
MIN_VALIDATE_TRIALS = 10_000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- argument parsing -------------------------------------------------------

def parse_values(text, name):
    """Scalar ``x``, range ``start:stop:count`` or list ``a,b,c`` -> list of floats."""
    text = str(text).strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise UsageError(f"--{name}: range must be start:stop:count, got {text!r}")
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 2:
                raise UsageError(f"--{name}: range count must be >= 2")
            if not start < stop:
                raise UsageError(f"--{name}: range needs start < stop, got {text!r}")
            return [float(v) for v in np.linspace(start, stop, count)]
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"--{name}: cannot parse {text!r}") from None


def _modes(mode, allow_single=True):
    if mode == "both":
        return [Mode.AF, Mode.DF]
    m = Mode(mode)
    if m is Mode.SINGLE and not allow_single:
        raise UsageError(f"mode {mode!r} is not supported by this command")
    return [m]


def _read_config(path):
    tokens = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            tokens += ["--" + key.replace("_", "-"), value]
    return tokens


def _expand_config(argv):
    # Config-file options go first so explicit flags, parsed later, win.
    argv = list(argv)
    for i, tok in enumerate(argv):
        if tok == "--config" or tok.startswith("--config="):
            if "=" in tok:
                path, drop = tok.split("=", 1)[1], 1
            elif i + 1 < len(argv):
                path, drop = argv[i + 1], 2
            else:
                raise UsageError("--config needs a path")
            rest = argv[:i] + argv[i + drop:]
            if not rest:
                raise UsageError("a command is required before --config options")
            return rest[:1] + _read_config(path) + rest[1:]
    return argv


def build_parser():
    parser = _Parser(prog="relaygoodput", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, modes=("single", "af", "df", "both"), default="both"):
        p.add_argument("--mode", choices=modes, default=default)
        p.add_argument("--snr-db", default="10", help="transmit SNR in dB (scalar, range or list)")
        p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="path-loss exponent")
        p.add_argument("--k", default=None, help="relay location in (0,1): x, start:stop:count or a,b")
        p.add_argument("--rate", default=None, help="rate in bits per channel use: x, start:stop:count or a,b")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--config", default=None, help="key=value file; flags override it")

    def sim(p):
        p.add_argument("--trials", type=int, default=100_000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--max-slots", type=int, default=None,
                       help="slot cap per codeword (default: automatic)")
        p.add_argument("--workers", type=int, default=1, help="threads; does not change results")

    common(sub.add_parser("point", help="evaluate one operating point"))
    common(sub.add_parser("sweep", help="goodput over a 1-D or 2-D grid"))
    common(sub.add_parser("optimize", help="optimal relay location and/or rate"))
    p = sub.add_parser("simulate", help="Monte Carlo estimate at one operating point")
    common(p, modes=("af", "df", "both"))
    sim(p)
    p.add_argument("--eps", default=None,
                   help="fixed outage probabilities, comma separated, instead of sampled fading")
    p = sub.add_parser("validate", help="analytic vs simulated delivery time, with z-scores")
    common(p, modes=("af", "df", "both"))
    sim(p)
    p.add_argument("--eps-grid", default=None,
                   help="fixed-outage grid values, e.g. 0.1,0.5,0.9 (all combinations)")
    return parser


# -- output -----------------------------------------------------------------

def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def render(spec, columns, rows, fmt):
    """Serialize a table as CSV (17 significant digits) or JSON."""
    if fmt == "json":
        doc = {"spec": spec, "rows": [{c: row.get(c) for c in columns} for row in rows]}
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def _emit(args, spec, columns, rows, stdout):
    text = render(spec, columns, rows, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _spec_echo(args, **extra):
    echo = {
        "command": args.command,
        "mode": args.mode,
        "snr_db": args.snr_db,
        "alpha": args.alpha,
        "k": args.k,
        "rate": args.rate,
    }
    echo.update(extra)
    return echo


# -- commands ---------------------------------------------------------------

def _scalar(args, name):
    value = getattr(args, name)
    flag = name.replace("_", "-")
    if value is None:
        raise UsageError(f"--{flag} is required")
    values = parse_values(value, flag)
    if len(values) != 1 or ":" in str(value):
        raise UsageError(f"--{flag} must be a single value for this command")
    return values[0]


def _point_row(mode, snr_db, alpha, k, rate):
    gamma = db_to_linear(snr_db)
    row = {"mode": mode.value, "snr_db": snr_db, "gamma": gamma, "alpha": alpha, "rate": rate}
    if mode is Mode.SINGLE:
        res = analytic.goodput_single(gamma, rate)
        row["eps_1"] = res.outages.eps_sd
    else:
        res = analytic.goodput(mode, ChannelParams(gamma, alpha, k), rate)
        row["k"] = k
        for i, e in enumerate(res.outages.as_tuple()):
            row[f"eps_{i + 1}"] = e
        for i, p in enumerate(res.states.probs):
            row[f"p_{i + 1}"] = p
    row["expected_time"] = res.expected_time
    row["goodput"] = res.goodput
    return row


POINT_COLUMNS = ["mode", "snr_db", "gamma", "alpha", "k", "rate", "eps_1", "eps_2", "eps_3",
                 "p_1", "p_2", "p_3", "p_4", "expected_time", "goodput"]


def cmd_point(args, stdout):
    snr_db = _scalar(args, "snr_db")
    rate = _scalar(args, "rate")
    modes = _modes(args.mode)
    k = _scalar(args, "k") if any(m is not Mode.SINGLE for m in modes) else None
    rows = [_point_row(m, snr_db, args.alpha, k, rate) for m in modes]
    _emit(args, _spec_echo(args), POINT_COLUMNS, rows, stdout)
    return EXIT_OK


def cmd_sweep(args, stdout):
    modes = _modes(args.mode)
    needs_k = any(m is not Mode.SINGLE for m in modes)
    if args.rate is None:
        raise UsageError("--rate is required")
    if needs_k and args.k is None:
        raise UsageError("--k is required for relay modes")
    raw = {"snr_db": args.snr_db, "k": args.k if needs_k else None, "rate": args.rate}
    axes = {name: parse_values(v, name.replace("_", "-")) for name, v in raw.items() if v is not None}
    swept = [name for name, v in axes.items() if len(v) > 1]
    if not swept:
        raise UsageError("sweep needs at least one range or list (start:stop:count or a,b,...)")
    if len(swept) > 2:
        raise UsageError("at most two swept dimensions per invocation")

    columns = ["snr_db", "gamma", "alpha", "k", "rate", "eps_sd"]
    if Mode.AF in modes:
        columns += ["eps_srd_af"]
    if Mode.DF in modes:
        columns += ["eps_sr_df", "eps_rd_df"]
    columns += [f"eta_{m.value}" for m in modes]

    rows = []
    names = list(axes)
    for combo in itertools.product(*(axes[n] for n in names)):
        point = dict(zip(names, combo))
        gamma = db_to_linear(point["snr_db"])
        k, rate = point.get("k"), point["rate"]
        row = {"snr_db": point["snr_db"], "gamma": gamma, "alpha": args.alpha, "k": k, "rate": rate}
        for m in modes:
            if m is Mode.SINGLE:
                res = analytic.goodput_single(gamma, rate)
            else:
                res = analytic.goodput(m, ChannelParams(gamma, args.alpha, k), rate)
            row["eps_sd"] = res.outages.eps_sd
            if m is Mode.AF:
                row["eps_srd_af"] = res.outages.eps_path2
            elif m is Mode.DF:
                row["eps_sr_df"], row["eps_rd_df"] = res.outages.eps_path2, res.outages.eps_rd
            row[f"eta_{m.value}"] = res.goodput
        rows.append(row)
    _emit(args, _spec_echo(args, swept=swept), columns, rows, stdout)
    return EXIT_OK


def cmd_optimize(args, stdout):
    if args.k is not None and args.rate is not None:
        raise UsageError("give --rate (optimize k), --k (optimize rate), or neither (joint)")
    snr_db = _scalar(args, "snr_db")
    gamma = db_to_linear(snr_db)
    if args.rate is not None:
        search, points = "k", parse_values(args.rate, "rate")
        modes = _modes(args.mode, allow_single=False)
    elif args.k is not None:
        search, points = "rate", parse_values(args.k, "k")
        modes = _modes(args.mode)
    else:
        search, points = "joint", [None]
        modes = _modes(args.mode, allow_single=False)

    columns = ["search", "snr_db", "gamma", "alpha", "k", "rate"]
    for m in modes:
        columns += [f"k_star_{m.value}", f"rate_star_{m.value}", f"eta_star_{m.value}",
                    f"boundary_{m.value}"]
    rows = []
    for value in points:
        row = {"search": search, "snr_db": snr_db, "gamma": gamma, "alpha": args.alpha,
               "k": value if search == "rate" else None, "rate": value if search == "k" else None}
        for m in modes:
            tag = m.value
            if search == "k":
                res = optimizer.optimize_k(m, gamma, args.alpha, value)
                k_star, r_star, eta = res.k, value, res.goodput
                grid = optimizer.k_grid()
                boundary = k_star <= grid[1] or k_star >= grid[-2]
            elif search == "rate":
                res = optimizer.optimize_rate(m, gamma, args.alpha, value)
                k_star = None if m is Mode.SINGLE else value
                r_star, eta, boundary = res.rate, res.goodput, not res.interior
            else:
                res = optimizer.optimize_joint(m, gamma, args.alpha)
                k_star, r_star, eta, boundary = res.best_k, res.best_rate, res.best_goodput, not res.interior
            row.update({f"k_star_{tag}": k_star, f"rate_star_{tag}": r_star,
                        f"eta_star_{tag}": eta, f"boundary_{tag}": bool(boundary)})
            if boundary:
                print(f"warning: {tag} optimum on the search boundary (row {len(rows)})", file=sys.stderr)
        rows.append(row)
    _emit(args, _spec_echo(args, search=search), columns, rows, stdout)
    return EXIT_OK


SIM_COLUMNS = ["mode", "source", "snr_db", "gamma", "alpha", "k", "rate", "eps_1", "eps_2", "eps_3",
               "trials", "seed", "max_slots", "analytic_time", "mean_slots", "std_error", "z",
               "empirical_goodput", "trials_used", "truncated_trials",
               "state_1", "state_2", "state_3", "state_4"]


def _simulate_row(mode, snr_db, alpha, k, rate, eps, args):
    if eps is not None:
        source = montecarlo.FixedEps(eps)
        params = None
        gamma = None
        expected = (analytic.expected_time_af(*eps) if mode is Mode.AF
                    else analytic.expected_time_df(*eps))
    else:
        source = montecarlo.SAMPLED_FADING
        gamma = db_to_linear(snr_db)
        params = ChannelParams(gamma, alpha, k)
        res = analytic.goodput(mode, params, rate)
        expected = res.expected_time
        eps = res.outages.as_tuple()
    cap = args.max_slots if args.max_slots is not None else montecarlo.safe_slot_cap(expected)
    config = montecarlo.SimConfig(mode, params, rate, args.trials, args.seed, cap, source)
    rep = montecarlo.run_batch(config, workers=args.workers)
    z = rep.z_score(expected) if rep.trials_used > 1 else None
    row = {"mode": mode.value, "source": "fixed_eps" if params is None else "sampled_fading",
           "snr_db": None if params is None else snr_db, "gamma": gamma,
           "alpha": None if params is None else alpha, "k": None if params is None else k,
           "rate": rate, "trials": args.trials, "seed": args.seed, "max_slots": cap,
           "analytic_time": expected, "mean_slots": rep.mean_slots, "std_error": rep.std_error,
           "z": z, "empirical_goodput": rep.empirical_goodput, "trials_used": rep.trials_used,
           "truncated_trials": rep.truncated_trials}
    for i, e in enumerate(eps):
        row[f"eps_{i + 1}"] = e
    for s, count in rep.per_state_counts.items():
        row[f"state_{s}"] = count
    return row


def _sim_points(args, eps=None, eps_grid=None):
    modes = _modes(args.mode, allow_single=False)
    if eps is not None or eps_grid is not None:
        rate = _scalar(args, "rate") if args.rate is not None else 1.0
        for m in modes:
            n = 2 if m is Mode.AF else 3
            if eps is not None:
                if len(eps) != n:
                    raise UsageError(f"--eps needs {n} values for {m.value}")
                combos = [tuple(eps)]
            else:
                combos = itertools.product(eps_grid, repeat=n)
            for combo in combos:
                yield m, None, None, None, rate, combo
        return
    if args.rate is None or args.k is None:
        raise UsageError("--rate and --k are required for sampled fading")
    snrs = parse_values(args.snr_db, "snr-db")
    ks = parse_values(args.k, "k")
    rates = parse_values(args.rate, "rate")
    for m in modes:
        for snr_db, k, rate in itertools.product(snrs, ks, rates):
            yield m, snr_db, args.alpha, k, rate, None


def cmd_simulate(args, stdout):
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    eps = parse_values(args.eps, "eps") if args.eps is not None else None
    if args.mode == "both" and eps is not None:
        raise UsageError("--eps needs a single mode")
    rows = [_simulate_row(*pt, args) for pt in _sim_points(args, eps=eps)]
    _emit(args, _spec_echo(args, trials=args.trials, seed=args.seed, eps=args.eps,
                           max_slots=args.max_slots), SIM_COLUMNS, rows, stdout)
    return EXIT_OK


def cmd_validate(args, stdout, stderr):
    if args.trials < MIN_VALIDATE_TRIALS:
        raise UsageError(f"validate needs --trials >= {MIN_VALIDATE_TRIALS}")
    grid = parse_values(args.eps_grid, "eps-grid") if args.eps_grid is not None else None
    rows = [_simulate_row(*pt, args) for pt in _sim_points(args, eps_grid=grid)]
    zs = [abs(r["z"]) for r in rows if r["z"] is not None]
    truncated = sum(r["truncated_trials"] for r in rows)
    for r in rows:
        r["pass"] = r["z"] is not None and abs(r["z"]) <= Z_PASS
    _emit(args, _spec_echo(args, trials=args.trials, seed=args.seed, eps_grid=args.eps_grid,
                           max_slots=args.max_slots), SIM_COLUMNS + ["pass"], rows, stdout)
    max_z = max(zs) if zs else math.inf
    verdict = "PASS" if len(zs) == len(rows) and max_z <= Z_PASS else "FAIL"
    print(f"validate: {len(rows)} points, max |z| = {max_z:.3f}, truncated trials = {truncated}: "
          f"{verdict}", file=stderr)
    if len(zs) < len(rows) or max_z > Z_HARD_FAIL:
        return EXIT_VALIDATION
    return EXIT_OK


def main(argv=None, stdout=None, stderr=None):
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    try:
        args = parser.parse_args(_expand_config(argv))
        if getattr(args, "workers", 1) < 1:
            raise UsageError("--workers must be >= 1")
        if args.command == "validate":
            return cmd_validate(args, stdout, stderr)
        return {"point": cmd_point, "sweep": cmd_sweep, "optimize": cmd_optimize,
                "simulate": cmd_simulate}[args.command](args, stdout)
    except UsageError as exc:
        print(parser.format_usage().rstrip(), file=stderr)
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except (DomainError, OSError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
