"""Command-line front end.

Exit codes: 0 identity holds, 1 identity violated, 2 input error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from . import config as config_mod
from .bracket import FROM_G, FROM_H, poisson_matrices
from .dynamics import IntegrationError, IntegratorConfig, integrate, vector_field, write_trajectory_csv
from .expr import ParseError, SpaceError, parse, random_polynomial
from .identity import check_poisson_condition, fi_residual, jacobi_residual
from .models import build_model, model_summary, verify_model

EXIT_OK, EXIT_VIOLATED, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class InputError(Exception):
    pass


def _load(args) -> config_mod.SystemConfig:
    try:
        if args.config:
            return config_mod.load(args.config)
        return config_mod.model_config()
    except config_mod.ConfigError as exc:
        raise InputError(str(exc)) from None


def _observables(texts, system):
    out = []
    for t in texts:
        try:
            out.append(parse(t, system.space, {"H": system.H, "G": system.G}))
        except ParseError as exc:
            raise InputError(f"cannot parse {t!r}: {exc}") from None
    return out


def _random_batches(system, count, arity, seed):
    rng = random.Random(seed)
    names = system.space.variable_names
    for _ in range(count):
        yield [random_polynomial(rng, names, max_degree=3, n_terms=3) for _ in range(arity)]


def _print_report(record, extra_lines=()):
    print(f"identity: {record['identity_kind']}")
    for label, text in zip("ABCDE", record["inputs"]):
        print(f"  {label} = {text}")
    print(f"residual: {record['residual']}")
    print(f"holds: {'yes' if record['is_zero'] else 'no'}")
    if record["witness"] is not None:
        print("witness: " + ", ".join(f"{k}={v}" for k, v in record["witness"].items()))
    for line in extra_lines:
        print(line)


def _emit(args, record, extra_lines=()):
    if args.json:
        print(json.dumps(record))
    else:
        _print_report(record, extra_lines)


def cmd_check_fi(args) -> int:
    system = _load(args).build_system()
    if args.random:
        batches = list(_random_batches(system, args.random, 5, args.seed))
    else:
        if len(args.observables) != 5:
            raise InputError("check-fi needs five expressions A B C D E")
        batches = [_observables(args.observables, system)]
    violated = 0
    for polys in batches:
        report = fi_residual(*polys, system.space)
        violated += not report.is_zero
        if not args.random or args.json or not report.is_zero:
            _emit(args, report.to_record("fundamental", polys))
    if args.random and not args.json:
        print(f"{len(batches) - violated}/{len(batches)} random instances satisfy the identity")
    return EXIT_VIOLATED if violated else EXIT_OK


def cmd_check_jacobi(args) -> int:
    system = _load(args).build_system()
    pms = poisson_matrices(system, args.source)
    condition = check_poisson_condition(pms)
    if args.random:
        batches = list(_random_batches(system, args.random, 3, args.seed))
    else:
        if len(args.observables) != 3:
            raise InputError("check-jacobi needs three expressions A B C")
        batches = [_observables(args.observables, system)]
    cond_line = f"condition (no cross-DOF dependence of Poisson matrices): {'satisfied' if condition else 'violated'}"
    violated = 0
    for polys in batches:
        report = jacobi_residual(*polys, pms)
        violated += not report.is_zero
        record = report.to_record("jacobi", polys)
        record["source"] = args.source
        record["poisson_condition"] = condition
        if not args.random or args.json or not report.is_zero:
            _emit(args, record, [f"source: {args.source}", cond_line])
    if args.random and not args.json:
        print(f"{len(batches) - violated}/{len(batches)} random instances satisfy the identity")
        print(cond_line)
    return EXIT_VIOLATED if violated else EXIT_OK


def _override_params(cfg, overrides):
    for item in overrides or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"--param expects NAME=VALUE, got {item!r}")
        if name not in cfg.parameters:
            raise InputError(f"unknown parameter {name!r}")
        try:
            cfg.parameters[name] = Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise InputError(f"bad value for {name}: {value!r}") from None


def cmd_simulate(args) -> int:
    cfg = _load(args)
    _override_params(cfg, args.param)
    system = cfg.build_system()
    try:
        params = cfg.numeric_parameters()
        x0 = cfg.initial_state()
    except config_mod.ConfigError as exc:
        raise InputError(str(exc)) from None
    dt = args.dt if args.dt is not None else cfg.dt
    steps = args.steps if args.steps is not None else cfg.steps
    if dt is None or steps is None:
        raise InputError("integrator needs dt and steps (config [integrator] or --dt/--steps)")
    try:
        icfg = IntegratorConfig(dt, steps)
    except ValueError as exc:
        raise InputError(str(exc)) from None

    try:
        traj = integrate(vector_field(system), x0, icfg, params)
    except IntegrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if args.json:
            print(json.dumps({"status": "numerical_failure", "step": exc.step}))
        return EXIT_NUMERIC

    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_trajectory_csv(traj, fh)
        summary_stream = sys.stdout
    else:
        write_trajectory_csv(traj, sys.stdout)
        summary_stream = sys.stderr

    drift = {k: float(abs(v).max()) for k, v in traj.diagnostics.items() if k.endswith("_drift")}
    fluct = {k: float(abs(v - v[0]).max()) for k, v in traj.diagnostics.items() if k.startswith("fluct_")}
    if args.json:
        print(json.dumps({"status": "ok", "steps": steps, "dt": dt, "max_drift": drift,
                          "max_fluctuation_change": fluct, "out": args.out}), file=summary_stream)
    else:
        print(f"steps={steps} dt={dt!r} max|H_drift|={drift['H_drift']:.3e} "
              f"max|G_drift|={drift['G_drift']:.3e} "
              + " ".join(f"max|d{k}|={v:.3e}" for k, v in fluct.items()), file=summary_stream)
    return EXIT_OK


def _matrix_lines(pms):
    lines = []
    for a, J in enumerate(pms.matrices, start=1):
        lines.append(f"  J^{a} =")
        cells = [[str(e) for e in row] for row in J]
        width = max(len(c) for row in cells for c in row)
        for row in cells:
            lines.append("    [ " + "  ".join(c.rjust(width) for c in row) + " ]")
    return lines


def cmd_model_info(args) -> int:
    if args.emit_config:
        sys.stdout.write(config_mod.model_config().to_text())
        return EXIT_OK
    model = build_model()
    system = model.system
    facts = verify_model(model)
    summary = model_summary(model)
    if args.json:
        print(json.dumps({"kind": "model", "variables": list(model.space.variable_names),
                          "parameters": list(model.space.parameter_names),
                          "H": str(system.H), "G": str(system.G),
                          "G_decoupled": summary["G_decoupled"], "H_decoupled": summary["H_decoupled"],
                          "divergence": str(summary["divergence"])}))
        for fact in facts:
            print(json.dumps({"kind": "fact", "name": fact.name, "passed": fact.passed, "detail": fact.detail}))
    else:
        print("variables: " + ", ".join(model.space.variable_names))
        print("parameters: " + ", ".join(model.space.parameter_names))
        print(f"H = {system.H}")
        print(f"G = {system.G}")
        print(f"G: {'decoupled' if summary['G_decoupled'] else 'coupled'}")
        print(f"H: {'decoupled' if summary['H_decoupled'] else 'coupled'}")
        for src in (FROM_G, FROM_H):
            pms = poisson_matrices(system, src)
            cond = "satisfied" if check_poisson_condition(pms) else "violated"
            print(f"Poisson matrices ({src}), cross-DOF condition {cond}:")
            for line in _matrix_lines(pms):
                print(line)
        print(f"divergence of the vector field: {summary['divergence']}")
        for fact in facts:
            print(f"{'PASS' if fact.passed else 'FAIL'}  {fact.name}: {fact.detail}")
    return EXIT_OK if all(f.passed for f in facts) else EXIT_VIOLATED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nambukit", description="Nambu bracket identities and dynamics")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", metavar="PATH", help="system config file (default: builtin model)")
        p.add_argument("--json", action="store_true", help="emit line-delimited JSON records")

    p = sub.add_parser("check-fi", help="fundamental identity residual for A B C D E")
    common(p)
    p.add_argument("observables", nargs="*", help="five expressions; H and G name the Hamiltonians")
    p.add_argument("--random", type=int, metavar="N", help="check N random quintuples instead")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check_fi)

    p = sub.add_parser("check-jacobi", help="Jacobi identity residual for A B C")
    common(p)
    p.add_argument("observables", nargs="*", help="three expressions; H and G name the Hamiltonians")
    p.add_argument("--source", choices=(FROM_G, FROM_H), default=FROM_G)
    p.add_argument("--random", type=int, metavar="N", help="check N random triples instead")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check_jacobi)

    p = sub.add_parser("simulate", help="integrate the Nambu flow with RK4 and write a CSV trajectory")
    common(p)
    p.add_argument("--dt", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--out", metavar="PATH", help="CSV output path (default: stdout)")
    p.add_argument("--param", action="append", metavar="NAME=VALUE", help="override a parameter value")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("model-info", help="describe and verify the builtin coupled-oscillator model")
    p.add_argument("--json", action="store_true")
    p.add_argument("--emit-config", action="store_true", help="print the model as a config file")
    p.set_defaults(func=cmd_model_info)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, config_mod.ConfigError, SpaceError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
