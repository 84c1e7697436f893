"""Command-line entry point.

Subcommands: ``population`` (oracle functionals as JSON), ``analyze``
(plug-in report for one data file), ``simulate`` (sup-distance / bias /
empirical-expansion studies) and ``diagnose`` (remainder-rate tables).

Exit codes: 0 success, 1 runtime failure, 2 usage/validation error,
3 degenerate data.  Every randomized command requires an explicit --seed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import edgeworth, estimators, montecarlo, ustat
from .distributions import InvalidParamsError, UnknownFamilyError, make_model
from .estimators import DegenerateSampleError
from .population import SmoothnessError, TrimSpec, bias_term, compute_functionals
from .rng import RngStream, replicate_stream_index

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_DEGENERATE = 3


class UsageError(ValueError):
    pass


def read_sample_file(path) -> np.ndarray:
    """One real per line; '#' starts a comment; decimal point only."""
    values = []
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        try:
            values.append(float(body))
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: not a number: {body!r}") from exc
    if len(values) < 4:
        raise UsageError(f"{path}: need at least 4 finite values")
    arr = np.asarray(values, float)
    if not np.all(np.isfinite(arr)):
        raise UsageError(f"{path}: sample contains non-finite values")
    return arr


def write_sample_file(path, values) -> None:
    with open(path, "w") as fh:
        fh.write("# trimedge sample dump\n")
        for v in values:
            fh.write(f"{v:.17g}\n")


def _dump_json(obj, path=None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path is None:
        print(text)
    else:
        Path(path).write_text(text + "\n")


def _trim_spec(args, n=None) -> TrimSpec:
    try:
        return TrimSpec(args.alpha, args.beta, n)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _model(args):
    try:
        return make_model(args.family, args.params)
    except (UnknownFamilyError, InvalidParamsError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_population(args) -> int:
    model = _model(args)
    spec = _trim_spec(args, args.n)
    pop = compute_functionals(model, spec)
    doc = {
        "family": args.family,
        "params": list(args.params),
        "alpha": args.alpha,
        "beta": args.beta,
        "xi_alpha": pop.xi_alpha,
        "xi_beta": pop.xi_beta,
        "f_alpha": pop.f_alpha,
        "f_beta": pop.f_beta,
        "mu_trim": pop.mu_trim,
        "mu_W": pop.mu_W,
        "sigma2_W": pop.sigma2_W,
        "gamma3_W": pop.gamma3_W,
        "delta2_W": pop.delta2_W,
        "lambda1": pop.lambda1,
        "lambda2": pop.lambda2,
    }
    if args.n is not None:
        doc["n"] = args.n
        doc["beta_n"] = bias_term(pop, spec)
    _dump_json(doc)
    return EXIT_OK


def cmd_analyze(args) -> int:
    values = read_sample_file(args.sample_file)
    n = len(values)
    spec = _trim_spec(args, n)
    sample = estimators.ingest(values)
    est = estimators.plugin_estimates(sample, spec, printed_variant=args.printed_bias_variant)
    report = {
        "input": {"path": str(args.sample_file), "n": n},
        "spec": {"alpha": args.alpha, "beta": args.beta, "k": spec.k, "m": spec.m},
        "estimates": {
            "t_n": est.t_n,
            "mu_hat_W": est.mu_hat_W,
            "s2_n": est.s2_n,
            "f_hat_alpha": est.f_hat_alpha,
            "f_hat_beta": est.f_hat_beta,
            "lambda1_hat": est.lambda1_hat,
            "lambda2_hat": est.lambda2_hat,
            "beta_n_hat": est.beta_n_hat,
            "delta": est.delta,
        },
        "warnings": list(est.warnings),
    }
    for kind in ("normalized", "studentized"):
        coeffs = edgeworth.empirical_expansion(est, spec, kind)
        report[f"expansion_{kind}"] = {
            "lambda1": coeffs.lambda1,
            "lambda2": coeffs.lambda2,
            "bias_over_sigma": coeffs.bias_over_sigma,
            "n": coeffs.n,
        }
    if args.level is not None:
        if not 0.5 < args.level < 1.0:
            raise UsageError("confidence level must lie in (0.5, 1)")
        gamma = 1.0 - args.level
        coeffs = edgeworth.empirical_expansion(est, spec, "studentized")
        x_lo = edgeworth.invert_expansion(coeffs, gamma / 2.0)
        x_hi = edgeworth.invert_expansion(coeffs, 1.0 - gamma / 2.0)
        scale = math.sqrt(est.s2_n) / ((args.beta - args.alpha) * math.sqrt(n))
        # Lower statistic quantile gives the upper interval endpoint.
        report["confidence_interval"] = {
            "level": args.level,
            "lower": est.t_n - scale * x_hi,
            "upper": est.t_n - scale * x_lo,
        }
    _dump_json(report, args.out)
    return EXIT_OK


def _load_simulate_config(args) -> montecarlo.SimulationConfig:
    fields = {
        "family": args.family,
        "params": args.params,
        "alpha": args.alpha,
        "beta": args.beta,
        "n_list": args.n_list,
        "reps": args.reps,
        "base_seed": args.seed,
        "kind": args.kind,
        "workers": args.workers,
    }
    if args.targets is not None:
        fields["targets"] = tuple(args.targets)
    if args.config is not None:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"bad config file: {exc}") from exc
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a JSON object")
        alias = {"seed": "base_seed"}
        for key, val in loaded.items():
            key = alias.get(key, key)
            if key == "targets":
                fields["targets"] = tuple(val)
            elif key in fields:
                fields[key] = val
            else:
                raise UsageError(f"unknown config key {key!r}")
    missing = [k for k, v in fields.items() if v is None and k not in ("targets",)]
    if missing:
        raise UsageError(f"missing required settings: {', '.join(sorted(missing))}")
    fields["params"] = tuple(float(p) for p in fields["params"])
    fields["n_list"] = tuple(int(n) for n in fields["n_list"])
    fields.setdefault("targets", ("normal", "population_expansion"))
    try:
        return montecarlo.SimulationConfig(**fields)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_simulate(args) -> int:
    config = _load_simulate_config(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    study_targets = [t for t in config.targets if t != "empirical_expansion"]
    summary = {
        "config": {
            "family": config.family,
            "params": list(config.params),
            "alpha": config.alpha,
            "beta": config.beta,
            "n_list": list(config.n_list),
            "reps": config.reps,
            "base_seed": config.base_seed,
            "kind": config.kind,
            "targets": list(config.targets),
        }
    }
    if study_targets:
        report = montecarlo.rate_study(
            montecarlo.SimulationConfig(
                **{
                    **config.__dict__,
                    "targets": tuple(study_targets),
                }
            )
        )
        csv_path = out_dir / "sup_distances.csv"
        report.write_csv(csv_path)
        summary["sup_distances"] = [row.__dict__ for row in report.rows]
        print(f"sup_distances: {len(report.rows)} rows -> {csv_path}")
    if "empirical_expansion" in config.targets:
        reports = montecarlo.empirical_expansion_study(config)
        summary["empirical_expansion"] = reports
        emp_path = out_dir / "empirical_expansion.csv"
        cols = (
            "n,reps,inner_reps,kind,median_sup,mean_sup,p95_sup,"
            "population_sup,degenerate_fraction"
        )
        with open(emp_path, "w") as fh:
            fh.write(cols + "\n")
            for rep in reports:
                fh.write(
                    f"{rep['n']},{rep['reps']},{rep['inner_reps']},{rep['kind']},"
                    f"{rep['median_sup']:.17g},{rep['mean_sup']:.17g},"
                    f"{rep['p95_sup']:.17g},{rep['population_sup']:.17g},"
                    f"{rep['degenerate_fraction']:.17g}\n"
                )
        print(f"empirical_expansion: {len(reports)} rows -> {emp_path}")
    if args.dump_sample:
        for n in config.n_list:
            stream = RngStream(config.base_seed, replicate_stream_index(int(n), 0))
            model = make_model(config.family, config.params)
            sample = np.sort(
                np.asarray(model.quantile(stream.generator().random(int(n))), float)
            )
            path = out_dir / f"sample_n{n}_r0.txt"
            write_sample_file(path, sample)
            spec = TrimSpec(config.alpha, config.beta, int(n))
            est = estimators.plugin_estimates(sample, spec)
            # Record the file name only so reruns into different directories
            # stay byte-identical.
            summary.setdefault("dumped_samples", {})[str(n)] = {
                "path": path.name,
                "t_n": est.t_n,
                "mu_hat_W": est.mu_hat_W,
                "s2_n": est.s2_n,
                "lambda1_hat": est.lambda1_hat,
                "lambda2_hat": est.lambda2_hat,
                "beta_n_hat": est.beta_n_hat,
            }
            print(f"dumped sample n={n} -> {path}")
    # Round runtime fields out of the summary so reruns are byte-identical.
    for row in summary.get("sup_distances", []):
        row.pop("runtime_s", None)
    for rep in summary.get("empirical_expansion", []):
        rep.pop("runtime_s", None)
    _dump_json(summary, out_dir / "summary.json")
    print(f"summary -> {out_dir / 'summary.json'}")
    return EXIT_OK


def cmd_diagnose(args) -> int:
    if args.lemma not in ustat.DIAGNOSTICS and args.lemma != "moments":
        raise UsageError(
            f"--lemma must be one of {ustat.DIAGNOSTICS + ('moments',)}"
        )
    if args.reps < 100:
        raise UsageError("diagnose needs --reps >= 100")
    model = _model(args)
    spec0 = _trim_spec(args)
    pop = compute_functionals(model, spec0)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.lemma == "moments":
        rows = []
        for n in args.n_list:
            stream = RngStream(args.seed, replicate_stream_index(int(n), 0))
            rows.append(
                ustat.third_moment_check(model, pop, spec0, int(n), args.reps, stream)
            )
        path = out_dir / "moment_checks.csv"
        with open(path, "w") as fh:
            fh.write(
                "n,reps,var,var_se,var_target,third_moment,third_moment_se,"
                "third_moment_target\n"
            )
            for r in rows:
                fh.write(
                    f"{r['n']},{r['reps']},{r['var']:.17g},{r['var_se']:.17g},"
                    f"{r['var_target']:.17g},{r['third_moment']:.17g},"
                    f"{r['third_moment_se']:.17g},{r['third_moment_target']:.17g}\n"
                )
        print(f"moment_checks: {len(rows)} rows -> {path}")
        return EXIT_OK
    quantiles = (0.5, 0.9, 0.99)
    path = out_dir / f"remainder_{args.lemma}.csv"
    with open(path, "w") as fh:
        fh.write("n,reps,q50_abs_scaled,q90_abs_scaled,q99_abs_scaled,median_abs_raw\n")
        for n in args.n_list:
            n = int(n)
            spec = spec0.with_n(n)
            scaled = np.empty(args.reps)
            raw = np.empty(args.reps)
            for r in range(args.reps):
                stream = RngStream(args.seed, replicate_stream_index(n, r))
                sample = model.sample(n, stream)
                rem = ustat.bahadur_remainder(sample, pop, spec, args.lemma)
                scaled[r] = abs(rem.scaled_remainder)
                raw[r] = abs(rem.raw_remainder)
            qs = [float(np.quantile(scaled, q)) for q in quantiles]
            fh.write(
                f"{n},{args.reps},{qs[0]:.17g},{qs[1]:.17g},{qs[2]:.17g},"
                f"{float(np.median(raw)):.17g}\n"
            )
    print(f"remainder_{args.lemma}: {len(args.n_list)} rows -> {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trimedge",
        description="Trimmed means, Edgeworth expansions and Monte Carlo checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_trim(p):
        p.add_argument("--alpha", type=float, required=True)
        p.add_argument("--beta", type=float, required=True)

    def add_family(p, required=True):
        p.add_argument("--family", required=required)
        p.add_argument("--params", type=float, nargs="+", default=None)

    p = sub.add_parser("population", help="print population functionals as JSON")
    add_family(p)
    add_trim(p)
    p.add_argument("--n", type=int, default=None, help="sample size for beta_N")
    p.set_defaults(func=cmd_population)

    p = sub.add_parser("analyze", help="plug-in report for a sample file")
    p.add_argument("sample_file")
    add_trim(p)
    p.add_argument("--level", type=float, default=None, help="confidence level")
    p.add_argument("--printed-bias-variant", action="store_true")
    p.add_argument("--out", default=None, help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="sup-distance and expansion studies")
    p.add_argument("--config", default=None, help="JSON config file")
    add_family(p, required=False)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--n-list", type=int, nargs="+", default=None)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--kind", choices=montecarlo.KINDS, default="studentized")
    p.add_argument("--targets", nargs="+", default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--dump-sample", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("diagnose", help="remainder-rate and moment diagnostics")
    add_family(p)
    add_trim(p)
    p.add_argument("--lemma", required=True)
    p.add_argument("--n-list", type=int, nargs="+", required=True)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_diagnose)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "params", None) is None and hasattr(args, "params"):
        args.params = []
    try:
        if args.command == "simulate" and args.config is None and args.seed is None:
            raise UsageError("randomized commands require an explicit --seed")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegenerateSampleError as exc:
        print(f"error: degenerate data: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (SmoothnessError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # pragma: no cover - defensive
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
