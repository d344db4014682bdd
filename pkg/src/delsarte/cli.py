"""Command line front end.

Exit codes form the machine-facing contract:

* 0 -- success (and, for ``verify``, a certificate that actually proves its bound)
* 1 -- a referenced file does not exist
* 2 -- malformed input: bad config, bad flag value, or unparseable certificate
* 3 -- the solver detected a strong-duality violation (a kernel bug, never data)
* 4 -- a well-formed certificate that fails verification

Timing is printed to stdout only; files written under ``--out-dir`` are
byte-deterministic so reruns can be diffed.
"""

from __future__ import annotations

import argparse
import json
import os
import time
from fractions import Fraction

from .config import ConfigError, RunConfig, build_instance, epsilon_value, load_config
from .dual import (
    CertificateFormatError,
    certificate_from_text,
    certificate_to_text,
    solve_dual,
    verify_certificate,
)
from .harness import StrongDualityViolation, fuzz_strong_duality, run_instance
from .primal import solve_primal
from .reports import render_epsilon, render_solution, render_sweep, write_csv, write_json
from .serialize import canonical_json, scalar_str, section_hash

EXIT_OK = 0
EXIT_MISSING_FILE = 1
EXIT_BAD_INPUT = 2
EXIT_THEOREM_VIOLATION = 3
EXIT_INVALID_CERTIFICATE = 4

REPORT_SCHEMA = "delsarte-report v1"


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="delsarte",
        description="extremal means of positive definite invariant functions",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, epsilon=True):
        sp.add_argument("--config", required=True, help="TOML run description")
        sp.add_argument("--out-dir", default="out", help="artifact directory")
        sp.add_argument("--arith", choices=("exact", "float"),
                        help="override the arithmetic context")
        sp.add_argument("--truncation", type=int,
                        help="override the spectral truncation")
        if epsilon:
            sp.add_argument("--epsilon",
                            help="constraint relaxation (int, float, or p/q)")

    sp = sub.add_parser("solve", help="solve both sides and emit a report")
    common(sp)
    sp.add_argument("--dump-tableau", action="store_true",
                    help="write the LP trace next to the report")

    sp = sub.add_parser("certify", help="emit and self-check a dual certificate")
    common(sp, epsilon=False)

    sp = sub.add_parser("verify", help="re-check an existing certificate")
    sp.add_argument("--config", required=True)
    sp.add_argument("--certificate", required=True)
    sp.add_argument("--arith", choices=("exact", "float"))
    sp.add_argument("--truncation", type=int)
    sp.add_argument("--verify-grid-multiplier", type=int, default=4,
                    help="spectral recheck length as a multiple of the truncation")

    sp = sub.add_parser("fuzz", help="hammer strong duality on random instances")
    sp.add_argument("--orders", required=True,
                    help="cyclic orders, e.g. '2-8' or '5,7,12'")
    sp.add_argument("--trials", type=int,
                    help="random pairs per order (default: exhaustive)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out-dir", default="out")

    sp = sub.add_parser("sweep", help="run the [sweep] table and tabulate")
    common(sp)
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    handler = {
        "solve": cmd_solve,
        "certify": cmd_certify,
        "verify": cmd_verify,
        "fuzz": cmd_fuzz,
        "sweep": cmd_sweep,
    }[args.command]
    try:
        return handler(args)
    except FileNotFoundError as exc:
        print(f"error: no such file: {exc.filename or exc}")
        return EXIT_MISSING_FILE
    except CertificateFormatError as exc:
        print(f"error: malformed certificate: {exc}")
        return EXIT_BAD_INPUT
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}")
        return EXIT_BAD_INPUT
    except StrongDualityViolation as exc:
        print(f"THEOREM VIOLATION: {exc}")
        return EXIT_THEOREM_VIOLATION


def _prepare(args):
    cfg = load_config(args.config)
    if args.arith == "exact" and cfg.continuous:
        raise ConfigError(f"{cfg.kind} structures support only arith = 'float'")
    structure, region, sigma = build_instance(
        cfg, arith=args.arith, truncation=args.truncation
    )
    os.makedirs(args.out_dir, exist_ok=True)
    return cfg, structure, region, sigma


def _point_label(structure, xi) -> str:
    x = structure.grid[xi]
    if isinstance(x, tuple):
        return str(x[0]) if len(x) == 1 else ":".join(str(c) for c in x)
    return repr(x) if isinstance(x, float) else str(x)


def _write_solution(out_dir, structure, region, phi):
    ctx = structure.ctx
    rows = [
        (_point_label(structure, xi), scalar_str(ctx, v))
        for xi, v in enumerate(phi)
    ]
    write_csv(os.path.join(out_dir, "solution.csv"), ("point", "value"), rows)
    values = [ctx.to_float(v) for v in phi]
    if structure.continuous:
        xs = list(structure.grid)
        boundary = region.plus_angle
    else:
        xs = list(range(len(structure.grid)))
        boundary = None
    render_solution(os.path.join(out_dir, "solution.png"), xs, values,
                    plus_boundary=boundary)


def cmd_solve(args) -> int:
    cfg, structure, region, sigma = _prepare(args)
    ctx = structure.ctx
    eps = epsilon_value(cfg, ctx, args.epsilon)
    trace = [] if args.dump_tableau else None

    started = time.perf_counter()
    if ctx.is_zero(eps):
        rep = run_instance(structure, region, sigma,
                           artifact_dir=args.out_dir, trace=trace)
        report = {"schema": REPORT_SCHEMA, **rep.summary(ctx)}
        cert_text = certificate_to_text(rep.certificate, ctx, cfg.hashes)
        with open(os.path.join(args.out_dir, "certificate.txt"), "w") as fh:
            fh.write(cert_text)
        phi = rep.primal.phi
        lines = [
            f"extremal value   {report['extremal_value']}",
            f"certified bound  {report['certified_bound']}",
            f"duality gap      {report['gap']}",
            f"witness at least {report['witness_lower_bound']}",
            f"certificate      "
            f"{'VALID' if rep.validity.valid else 'NOT PROVEN'}"
            f" ({rep.validity.coverage})",
        ]
    else:
        ps = solve_primal(structure, region, sigma, eps, trace=trace)
        report = {
            "schema": REPORT_SCHEMA,
            "epsilon": scalar_str(ctx, eps),
            "u": scalar_str(ctx, ps.u_value),
            "extremal_value": scalar_str(ctx, ps.a_value),
            "arithmetic": ctx.name,
        }
        phi = ps.phi
        lines = [
            f"relaxation       {report['epsilon']}",
            f"relaxed value    {report['extremal_value']}",
            "certificate      none (relaxed problems are primal-only)",
        ]
    elapsed = time.perf_counter() - started

    report["structure"] = structure.describe()
    report["region"] = region.describe(structure)
    report["hashes"] = dict(cfg.hashes)
    write_json(os.path.join(args.out_dir, "report.json"), report)
    _write_solution(args.out_dir, structure, region, phi)
    if trace is not None:
        with open(os.path.join(args.out_dir, "lp-trace.txt"), "w") as fh:
            fh.write("\n".join(trace) + "\n")

    for line in lines:
        print(line)
    print(f"artifacts in {args.out_dir}")
    print(f"solved in {elapsed:.3f}s")
    return EXIT_OK


def cmd_certify(args) -> int:
    cfg, structure, region, sigma = _prepare(args)
    ctx = structure.ctx
    started = time.perf_counter()
    _, cert = solve_dual(structure, region, sigma)
    validity = verify_certificate(structure, region, sigma, cert)
    elapsed = time.perf_counter() - started

    with open(os.path.join(args.out_dir, "certificate.txt"), "w") as fh:
        fh.write(certificate_to_text(cert, ctx, cfg.hashes))
    print(validity.bound_statement(ctx))
    print(f"artifacts in {args.out_dir}")
    print(f"certified in {elapsed:.3f}s")
    return EXIT_OK if validity.valid else EXIT_INVALID_CERTIFICATE


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    if args.arith == "exact" and cfg.continuous:
        raise ConfigError(f"{cfg.kind} structures support only arith = 'float'")
    structure, region, sigma = build_instance(
        cfg, arith=args.arith, truncation=args.truncation
    )
    ctx = structure.ctx
    with open(args.certificate) as fh:
        text = fh.read()
    cert, hashes = certificate_from_text(text, ctx)

    for part in ("structure", "region", "sigma"):
        if hashes.get(part) != cfg.hashes[part]:
            print(
                f"INVALID: certificate was issued for a different instance "
                f"({part} hash {hashes.get(part)} != {cfg.hashes[part]})"
            )
            return EXIT_INVALID_CERTIFICATE

    validity = verify_certificate(
        structure, region, sigma, cert,
        recheck_multiplier=args.verify_grid_multiplier,
    )
    if validity.valid:
        print(f"VALID: {validity.bound_statement(ctx)}")
        return EXIT_OK
    for reason in validity.reasons:
        print(f"INVALID: {reason}")
    return EXIT_INVALID_CERTIFICATE


def _parse_orders(text: str):
    orders = []
    for token in text.split(","):
        token = token.strip()
        if "-" in token:
            lo, _, hi = token.partition("-")
            orders.extend(range(int(lo), int(hi) + 1))
        elif token:
            orders.append(int(token))
    if not orders or min(orders) < 2:
        raise ConfigError(f"orders must be integers >= 2, got {text!r}")
    return orders


def cmd_fuzz(args) -> int:
    orders = _parse_orders(args.orders)
    os.makedirs(args.out_dir, exist_ok=True)
    started = time.perf_counter()
    summary = fuzz_strong_duality(
        orders, trials=args.trials, seed=args.seed,
        artifact_dir=args.out_dir,
        progress=lambda done: print(f"  ... {done} instances"),
    )
    elapsed = time.perf_counter() - started
    write_json(os.path.join(args.out_dir, "fuzz.json"), summary)
    print(
        f"{summary['instances']} instances ({summary['mode']}), "
        f"all gaps zero: {summary['all_gaps_zero']}"
    )
    print(f"fuzzed in {elapsed:.3f}s")
    return EXIT_OK


def _sweep_override(parameter, value):
    if parameter == "interval_radius":
        k = int(value)
        if k < 0:
            raise ConfigError("interval_radius values must be >= 0")
        return {"omega_plus": list(range(-k, k + 1))}
    if parameter == "arc_plus":
        return {"arc_plus": float(value)}
    if parameter == "cap_plus_degrees":
        return {"cap_plus_degrees": float(value)}
    return None  # epsilon: not a region key


def _sweep_row(cfg: RunConfig, args, parameter, value):
    override = _sweep_override(parameter, value)
    structure, region, sigma = build_instance(
        cfg, arith=args.arith, truncation=args.truncation,
        region_override=override,
    )
    ctx = structure.ctx
    if parameter == "epsilon":
        eps = epsilon_value(cfg, ctx, value)
        ps = solve_primal(structure, region, sigma, eps)
        return {
            parameter: str(value),
            "extremal_value": scalar_str(ctx, ps.a_value),
            "certified_bound": "",
            "gap": "",
            "status": "ok",
            "plot": [_plot_x(value), ctx.to_float(ps.a_value), 0.0],
        }
    rep = run_instance(structure, region, sigma, artifact_dir=args.out_dir)
    return {
        parameter: str(value),
        "extremal_value": scalar_str(ctx, rep.a_value),
        "certified_bound": scalar_str(ctx, rep.alpha),
        "gap": scalar_str(ctx, rep.gap),
        "status": "ok" if rep.validity.valid or structure.continuous
        else "certificate-not-proven",
        "plot": [_plot_x(value), ctx.to_float(rep.a_value),
                 ctx.to_float(rep.gap)],
    }


def _plot_x(value) -> float:
    return float(Fraction(str(value)))


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if not cfg.sweep:
        raise ConfigError("config has no [sweep] table")
    if args.arith == "exact" and cfg.continuous:
        raise ConfigError(f"{cfg.kind} structures support only arith = 'float'")
    parameter = cfg.sweep["parameter"]
    values = cfg.sweep["values"]
    os.makedirs(args.out_dir, exist_ok=True)
    cache_dir = os.environ.get("DELSARTE_CACHE_DIR") or os.path.join(
        args.out_dir, ".sweep-cache"
    )
    os.makedirs(cache_dir, exist_ok=True)

    started = time.perf_counter()
    rows, hits = [], 0
    for value in values:
        key = section_hash({
            "structure": cfg.structure,
            "region": cfg.region,
            "sigma": cfg.sigma,
            "parameter": parameter,
            "value": str(value),
            "arith": args.arith or cfg.arith,
            "truncation": args.truncation,
        })
        cached = os.path.join(cache_dir, f"{key}.json")
        if os.path.exists(cached):
            with open(cached) as fh:
                row = json.load(fh)
            hits += 1
        else:
            try:
                row = _sweep_row(cfg, args, parameter, value)
            except StrongDualityViolation as exc:
                row = {parameter: str(value), "extremal_value": "",
                       "certified_bound": "", "gap": "",
                       "status": f"theorem-violation: {exc}"}
            except (ConfigError, ValueError, RuntimeError) as exc:
                row = {parameter: str(value), "extremal_value": "",
                       "certified_bound": "", "gap": "",
                       "status": f"error: {exc}"}
            if row["status"].startswith(("ok", "certificate")):
                with open(cached, "w") as fh:
                    fh.write(canonical_json(row))
        rows.append(row)
    elapsed = time.perf_counter() - started

    header = (parameter, "extremal_value", "certified_bound", "gap", "status")
    write_csv(os.path.join(args.out_dir, "sweep.csv"), header,
              [[row[h] for h in header] for row in rows])

    good = [row for row in rows if row["extremal_value"]]
    if good:
        xs, ys, gaps = zip(*(row["plot"] for row in good))
        png = os.path.join(args.out_dir, "sweep.png")
        if parameter == "epsilon":
            render_epsilon(png, xs, ys)
        else:
            render_sweep(png, parameter, xs, ys, gaps)

    bad = len(rows) - len(good)
    print(f"{len(rows)} rows ({hits} cached, {bad} failed) -> "
          f"{os.path.join(args.out_dir, 'sweep.csv')}")
    print(f"swept in {elapsed:.3f}s")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
