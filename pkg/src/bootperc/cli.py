"""Command-line front end.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure,
4 oracle-check failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import analytics as an
from .config import ConfigError, config_from_mapping, tomllib
from .engine import ActivationRule, InitialSpec, run_percolation
from .graph import InvalidParameter, sample_gnp, write_edgelist
from .harness import (dump_json, run_ensemble, run_seeds, summary_json, sweep_transition,
                      write_sweep_csv)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_ORACLE = 0, 2, 3, 4


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True, default=str))


def _p_of(args) -> float:
    if args.p is not None and args.c is not None:
        raise ConfigError("--p and --c are mutually exclusive")
    if args.p is not None:
        return args.p
    if args.c is not None:
        return args.c / args.n
    raise ConfigError("one of --p / --c is required")


def _rule_of(args) -> ActivationRule:
    if args.rule == "proportional":
        if args.alpha is None:
            raise ConfigError("--alpha is required for the proportional rule")
        return ActivationRule.proportional(args.alpha, args.strict)
    if args.rule == "classical":
        if args.r is None:
            raise ConfigError("--r is required for the classical rule")
        return ActivationRule.classical(args.r)
    return ActivationRule.majority(args.strict)


def _add_graph_flags(sp, required_n=True):
    sp.add_argument("--n", type=int, required=required_n)
    sp.add_argument("--p", type=float)
    sp.add_argument("--c", type=float, help="mean degree; p = c/n")


def _add_rule_flags(sp):
    sp.add_argument("--rule", choices=("majority", "proportional", "classical"), default=None)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--r", type=int)
    sp.add_argument("--strict", action="store_true", default=None,
                    help="strict degree comparison (marks > alpha*deg)")


def cmd_gen(args) -> int:
    g = sample_gnp(args.n, _p_of(args), args.seed)
    if args.out:
        write_edgelist(g, args.out)
        _emit({"n": g.n, "edges": g.edge_count, "seed": args.seed, "out": args.out})
    else:
        e = g.edges()
        sys.stdout.write(f"{g.n} {len(e)}\n" + "".join(f"{u} {v}\n" for u, v in e.tolist()))
    return EXIT_OK


def cmd_run(args) -> int:
    n, p = args.n, _p_of(args)
    gseed, iseed = run_seeds_for(args.seed)
    picked = [x for x in ("a0", "theta", "q") if getattr(args, x) is not None]
    if len(picked) != 1:
        raise ConfigError("exactly one of --a0 / --theta / --q is required")
    if args.q is not None:
        init = InitialSpec.bernoulli(args.q, iseed)
    else:
        a0 = args.a0 if args.a0 is not None else round(args.theta * n)
        init = InitialSpec.fixed_size(a0, iseed)
    args.rule = args.rule or "majority"
    args.strict = bool(args.strict)
    rule = _rule_of(args)
    g = sample_gnp(n, p, gseed)
    tr = run_percolation(g, init, rule)
    if args.traj:
        tr.to_csv(args.traj)
    _emit({"n": n, "p": p, "seed": args.seed, "graph_seed": gseed, "init_seed": iseed,
           "edges": g.edge_count, "rule": rule.describe(), "A0": tr.A0, "T": tr.T,
           "A_star": tr.A_star, "A_star_frac": tr.A_star / n})
    return EXIT_OK


def run_seeds_for(seed: int) -> tuple[int, int]:
    """`run --seed s` replays member 0 of an ensemble with base_seed s."""
    from .harness import ExperimentConfig
    return run_seeds(ExperimentConfig(n=1, p=0.0, runs=1, a0=0, base_seed=seed), 0)


def _load_doc(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such file") from None
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path}: {e}") from None


def _merged_config(args, need_sweep=False):
    doc = _load_doc(args.config)
    over = {
        ("graph", "n"): args.n, ("graph", "p"): args.p, ("graph", "c"): args.c,
        ("init", "a0"): args.a0, ("init", "theta"): args.theta, ("init", "q"): args.q,
        ("rule", "variant"): args.rule, ("rule", "alpha"): args.alpha, ("rule", "r"): args.r,
        ("rule", "strict"): args.strict,
        ("ensemble", "runs"): args.runs, ("ensemble", "base_seed"): args.base_seed,
        ("ensemble", "almost"): args.almost, ("ensemble", "eps"): args.eps,
        ("ensemble", "budget"): args.budget,
    }
    for (sec, key), val in over.items():
        if val is None:
            continue
        tbl = doc.setdefault(sec, {})
        if sec == "graph" and key in ("p", "c"):
            tbl.pop("p", None)
            tbl.pop("c", None)
        if sec == "init":
            for k in ("a0", "theta", "q"):
                if k != key and getattr(args, k) is None:
                    tbl.pop(k, None)
        tbl[key] = val
    return config_from_mapping(doc, need_sweep)


def _add_ensemble_flags(sp):
    sp.add_argument("--config")
    _add_graph_flags(sp, required_n=False)
    sp.add_argument("--a0", type=int)
    sp.add_argument("--theta", type=float)
    sp.add_argument("--q", type=float)
    _add_rule_flags(sp)
    sp.add_argument("--runs", type=int)
    sp.add_argument("--base-seed", type=int)
    sp.add_argument("--almost", type=float)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--budget", type=int)
    sp.add_argument("--out", help="output prefix for <prefix>.csv and <prefix>.json")


def cmd_ensemble(args) -> int:
    cfg = _merged_config(args)
    s = run_ensemble(cfg)
    doc = summary_json(cfg, [s])
    if args.out:
        write_sweep_csv([s], args.out + ".csv")
        dump_json(doc, args.out + ".json")
    _emit(doc)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _merged_config(args, need_sweep=True)
    res = sweep_transition(cfg)
    doc = summary_json(cfg, res.points, res.crossing)
    doc["crossing_status"] = res.status
    if args.out:
        write_sweep_csv(res.points, args.out + ".csv")
        dump_json(doc, args.out + ".json")
    _emit(doc)
    return EXIT_OK


def _fmt(v) -> str:
    return "none" if v is None else f"{v:.12g}"


def _write_grid(path, header, rows):
    import csv
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        w.writerows(rows)


def cmd_analytic(args) -> int:
    fn = args.function
    if fn == "g":
        if args.c is None:
            raise ConfigError("--c is required")
        print(_fmt(an.g_of_c(args.c)))
        return EXIT_OK
    if args.n is None:
        raise ConfigError("--n is required")
    n = args.n
    if fn in ("pi-exact", "pi-poisson"):
        p = _p_of(args)
        f = an.pi_plus_exact if fn == "pi-exact" else an.pi_plus_poisson
        if args.csv:
            step = args.t_step or max(1, n // 100)
            _write_grid(args.csv, ["t", "value"], [(t, f(n, t, p)) for t in range(0, n, step)])
        if args.t is None:
            if not args.csv:
                raise ConfigError("--t is required")
            return EXIT_OK
        print(_fmt(f(n, args.t, p)))
        return EXIT_OK
    theta = args.theta if args.theta is not None else 0.0
    if fn in ("f", "x0"):
        params = an.AnalyticParams(n, _p_of(args), theta)
        if fn == "f":
            if args.csv:
                step = args.grid_step or 1e-3
                k = int(round(1 / step))
                _write_grid(args.csv, ["x", "value"],
                            [(i / k, an.f_c_theta(i / k, params, args.limit)) for i in range(k + 1)])
            if args.x is None:
                if not args.csv:
                    raise ConfigError("--x is required")
                return EXIT_OK
            print(_fmt(an.f_c_theta(args.x, params, args.limit)))
            return EXIT_OK
        r = an.find_x0(params, args.grid_step or 1e-3, args.tol or 1e-9, args.limit)
        _emit({"x0": r.x0, "bracket": r.bracket, "sign_change": r.sign_change,
               "double_root_suspected": r.double_root_suspected})
        return EXIT_OK
    p = _p_of(args)
    a0 = args.a0 if args.a0 is not None else round(theta * n)
    if fn == "bounds":
        out = {"c": n * p, "g": an.g_of_c(n * p), "subcritical_bound": an.subcritical_bound(a0, n * p),
               "margin": an.supercritical_margin(n, p, a0),
               "expected_R_bound": an.expected_R_bound(n, p, a0)}
        if args.t is not None:
            out["pi_upper_first_mark"] = an.pi_upper_first_mark(n, args.t, p)
            if args.t > n / 2:
                out["delta_upper_bound"] = an.delta_upper_bound(n, p, args.t)
        _emit(out)
        return EXIT_OK
    if fn == "classify":
        reg = an.classify_regime(an.AnalyticParams(n, p, a0 / n), a0)
        _emit({"tag": reg.tag, "prediction": reg.prediction, "bound": reg.bound,
               "bound_name": reg.bound_name})
        return EXIT_OK
    raise ConfigError(f"unknown analytic function {fn!r}")


def cmd_oracle_check(args) -> int:
    from .oracle import MAX_EXHAUSTIVE_N
    from .verify import exhaustive_equivalence, pi_plus_grid_check

    if not 1 <= args.max_n <= MAX_EXHAUSTIVE_N:
        raise ConfigError(f"--max-n must lie in [1, {MAX_EXHAUSTIVE_N}]")
    reports = [exhaustive_equivalence(n).to_dict() for n in range(1, args.max_n + 1)]
    pi = pi_plus_grid_check()
    ok = all(r["passed"] for r in reports) and pi["passed"]
    doc = {"passed": ok, "equivalence": reports, "pi_plus": pi}
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(doc, fh, indent=2)
    _emit(doc)
    return EXIT_OK if ok else EXIT_ORACLE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bootperc", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gen", help="sample G(n,p) as an edge list")
    _add_graph_flags(sp)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("run", help="one exploration run")
    _add_graph_flags(sp)
    sp.add_argument("--a0", type=int)
    sp.add_argument("--theta", type=float)
    sp.add_argument("--q", type=float)
    sp.add_argument("--seed", type=int, required=True)
    _add_rule_flags(sp)
    sp.add_argument("--traj", help="write t,A_t CSV here")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("ensemble", help="seeded Monte Carlo ensemble")
    _add_ensemble_flags(sp)
    sp.set_defaults(func=cmd_ensemble)

    sp = sub.add_parser("sweep", help="ensemble per grid value; locates the 0.5 crossing")
    _add_ensemble_flags(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("analytic", help="closed-form quantities")
    sp.add_argument("function", choices=("pi-exact", "pi-poisson", "f", "x0", "g", "bounds",
                                         "classify"))
    _add_graph_flags(sp, required_n=False)
    sp.add_argument("--t", type=int)
    sp.add_argument("--theta", type=float)
    sp.add_argument("--a0", type=int)
    sp.add_argument("--x", type=float)
    sp.add_argument("--grid-step", type=float)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--t-step", type=int)
    sp.add_argument("--limit", action="store_true", help="n -> infinity form of f")
    sp.add_argument("--csv", help="write the function on a grid to this CSV")
    sp.set_defaults(func=cmd_analytic)

    sp = sub.add_parser("oracle-check", help="engine vs brute-force oracles")
    sp.add_argument("--max-n", type=int, default=6)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_oracle_check)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (ConfigError, InvalidParameter) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (an.InconsistentParameters, ArithmeticError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
