"""Command-line pipeline: schedule, plan, verify, correlate, spectrum,
simulate, lemma3, report.

Exit codes: 0 on pass, 1 on usage or input errors, 2 on a certificate
violation.  Every run writes a manifest next to its outputs with enough
information (arguments, seed, version) to reproduce it byte-for-byte.
All file writes are atomic.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from importlib import metadata
from pathlib import Path

from .core import LevelFunction, validate_spec
from .correlation import correlation_sequence
from .pairplan import GenericPolicy, PolynomialSpec, check_certificate, plan_pair
from .schedule import generate_schedule, validate_schedule
from .spectral import (
    chaos_exp_coefficients,
    fejer_density,
    summability_report,
    trig_polynomial_density,
)
from .suspension import (
    SimulationConfig,
    gaussian_sample,
    linear_statistic_covariance,
    poisson_sample_and_push,
)
from .walsh import corr_tail_certificate, lemma3_truncate
from . import serialize as ser

EXIT_PASS = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we use 1
        raise UsageError(message)


def _version() -> str:
    try:
        return metadata.version("rankpair")
    except metadata.PackageNotFoundError:
        return "unknown"


def _out_dir(args) -> Path:
    d = Path(args.out_dir or os.environ.get("RANKPAIR_OUT", "."))
    d.mkdir(parents=True, exist_ok=True)
    return d


def _manifest(args, command: str) -> ser.RunManifest:
    arguments = {
        k: (str(v) if isinstance(v, (Path, Fraction)) else v)
        for k, v in vars(args).items()
        if k != "func"
    }
    arguments["version"] = _version()
    return ser.RunManifest.start(command, arguments)


def _emit(out_dir: Path, manifest: ser.RunManifest, name: str, payload) -> Path:
    path = out_dir / name
    if name.endswith(".tsv"):
        ser.atomic_write_text(path, payload)
    else:
        ser.write_json(path, payload)
    manifest.outputs.append(str(path))
    return path


def _finish(out_dir: Path, manifest: ser.RunManifest) -> None:
    manifest.finish(out_dir / f"{manifest.command}_manifest.json")


def _load_spec(path: str):
    spec = ser.spec_from_dict(ser.read_json(path))
    report = validate_spec(spec)
    if not report.ok:
        raise UsageError(f"{path}: {report.issues[0]}")
    return spec


def cmd_schedule(args) -> int:
    out_dir = _out_dir(args)
    manifest = _manifest(args, "schedule")
    sched = generate_schedule(
        growth=Fraction(args.growth),
        horizon=args.horizon,
        seed_lengths=tuple(int(x) for x in args.seed_lengths.split(",")),
    )
    report = validate_schedule(sched)
    _emit(out_dir, manifest, args.out, ser.schedule_to_dict(sched))
    _finish(out_dir, manifest)
    if not report.ok:
        print(f"schedule INVALID: {report.issues[0]}", file=sys.stderr)
        return EXIT_VIOLATION
    print(f"schedule ok: {len(sched.blocks)} blocks, horizon {sched.horizon}")
    return EXIT_PASS


def _policy_from_args(args) -> GenericPolicy:
    if args.poly == "rigidity":
        poly = PolynomialSpec.delta(0)
    else:
        poly = ser.polynomial_from_dict(json.loads(args.poly))
    return GenericPolicy(
        blocking_cuts=args.blocking_cuts,
        generic_cuts=args.generic_cuts,
        generic_poly=poly,
        max_generic_per_block=args.max_generic_per_block,
    )


def cmd_plan(args) -> int:
    out_dir = _out_dir(args)
    manifest = _manifest(args, "plan")
    if args.schedule:
        sched = ser.schedule_from_dict(ser.read_json(args.schedule))
    else:
        sched = generate_schedule(growth=Fraction(args.growth), horizon=args.horizon)
    report = validate_schedule(sched)
    if not report.ok:
        raise UsageError(f"schedule invalid: {report.issues[0]}")
    result = plan_pair(sched, _policy_from_args(args))
    _emit(out_dir, manifest, "spec_s.json", ser.spec_to_dict(result.spec_s))
    _emit(out_dir, manifest, "spec_t.json", ser.spec_to_dict(result.spec_t))
    _emit(out_dir, manifest, "cert_s.json", ser.certificate_to_dict(result.cert_s))
    _emit(out_dir, manifest, "cert_t.json", ser.certificate_to_dict(result.cert_t))
    _emit(out_dir, manifest, "plan.json", {
        "horizon": result.horizon,
        "n_zero_threshold": result.n_zero_threshold,
        "sound": result.pair_sound(),
    })
    _finish(out_dir, manifest)
    if not result.pair_sound():
        print("plan FAILED: certificate violation", file=sys.stderr)
        return EXIT_VIOLATION
    print(
        f"plan ok: horizon {result.horizon}, product correlations vanish "
        f"for n >= {result.n_zero_threshold}"
    )
    return EXIT_PASS


def cmd_verify(args) -> int:
    out_dir = _out_dir(args)
    manifest = _manifest(args, "verify")
    spec = _load_spec(args.spec)
    cert = ser.certificate_from_dict(ser.read_json(args.cert))
    claimed = ser.certificate_to_dict(cert)
    check_certificate(spec, cert)
    recomputed = ser.certificate_to_dict(cert)
    _emit(out_dir, manifest, "verify_report.json", {
        "ok": cert.ok and recomputed == claimed,
        "recomputed": recomputed,
    })
    _finish(out_dir, manifest)
    for z in cert.zero_intervals:
        if z.verdict != "exact-zero":
            print(
                f"verify FAILED: zero claim on {list(z.interval)} violated "
                f"at n={z.first_violation}",
                file=sys.stderr,
            )
            return EXIT_VIOLATION
    for r in cert.rigidity_times:
        if not r.satisfied:
            print(f"verify FAILED: rigidity at n={r.time}", file=sys.stderr)
            return EXIT_VIOLATION
    for p in cert.polynomial_claims:
        if not p.satisfied:
            print(f"verify FAILED: polynomial limit at n={p.time}", file=sys.stderr)
            return EXIT_VIOLATION
    if recomputed != claimed:
        print("verify FAILED: certificate does not match recomputation",
              file=sys.stderr)
        return EXIT_VIOLATION
    print(f"verify ok: all claims of '{cert.subject}' hold exactly")
    return EXIT_PASS


def cmd_correlate(args) -> int:
    out_dir = _out_dir(args)
    manifest = _manifest(args, "correlate")
    spec = _load_spec(args.spec)
    f = ser.level_function_from_dict(ser.read_json(args.function))
    seq = correlation_sequence(
        spec,
        f,
        range(args.n_min, args.n_max + 1),
        tolerance=Fraction(args.tolerance),
        subject=Path(args.function).stem,
    )
    _emit(out_dir, manifest, args.out, ser.correlation_table_to_tsv(seq))
    _finish(out_dir, manifest)
    exact = sum(1 for n in seq.entries if seq.is_exact(n))
    print(f"correlate ok: {len(seq.entries)} lags, {exact} exact")
    return EXIT_PASS


def cmd_spectrum(args) -> int:
    out_dir = _out_dir(args)
    manifest = _manifest(args, "spectrum")
    seq = ser.correlation_table_from_tsv(Path(args.table).read_text())
    if args.exact:
        est = trig_polynomial_density(seq, args.grid)
    else:
        est = fejer_density(seq, args.order, args.grid)
    lags = sorted(seq.entries)
    summ = summability_report(seq, (lags[0], lags[-1]))
    lines = ["theta\tdensity"]
    for theta, v in zip(est.thetas, est.values):
        lines.append(f"{theta:.12g}\t{v:.12g}")
    _emit(out_dir, manifest, args.out, "\n".join(lines) + "\n")
    _emit(out_dir, manifest, "spectrum_summary.json", {
        "grid_mean": est.grid_mean(),
        "min_value": est.min_value(),
        "exact": est.exact,
        "l1": [ser.fraction_to_str(x) for x in summ.l1],
        "l2": [ser.fraction_to_str(x) for x in summ.l2],
        "support": summ.support,
    })
    _finish(out_dir, manifest)
    print(
        f"spectrum ok: grid mean {est.grid_mean():.6g}, "
        f"min {est.min_value():.6g}"
    )
    return EXIT_PASS


def cmd_simulate(args) -> int:
    out_dir = _out_dir(args)
    manifest = _manifest(args, "simulate")
    config = SimulationConfig(
        sample_count=args.samples,
        seed=args.seed,
        lag_max=args.lag_max,
        intensity=args.intensity,
    )
    if args.kind == "gaussian":
        seq = ser.correlation_table_from_tsv(Path(args.table).read_text())
        length = args.lag_max * 2 + 1
        sample = gaussian_sample(seq, length, config)
        errors = {
            lag: abs(sample.sample_covariance(lag) - float(seq.midpoint(lag)))
            for lag in range(args.lag_max + 1)
        }
        payload = {
            "kind": "gaussian",
            "repaired": sample.repaired,
            "max_abs_error": max(errors.values()),
            "errors": {str(k): v for k, v in errors.items()},
        }
    else:
        spec = _load_spec(args.spec)
        f = ser.level_function_from_dict(ser.read_json(args.function))
        pairs = poisson_sample_and_push(
            spec, args.depth, args.intensity, args.steps, config
        )
        est = linear_statistic_covariance(pairs, f)
        exact = correlation_sequence(spec, f, [abs(args.steps)]).entry(abs(args.steps))
        payload = {
            "kind": "poisson",
            "steps": args.steps,
            "estimate": est.estimate,
            "ci": list(est.ci),
            "stderr": est.stderr,
            "escape_fraction": est.escape_fraction,
            "exact_bracket": [ser.fraction_to_str(exact[0]),
                              ser.fraction_to_str(exact[1])],
            "ci_contains_exact": bool(est.contains(exact[0]) or est.contains(exact[1])),
        }
    _emit(out_dir, manifest, args.out, payload)
    _finish(out_dir, manifest)
    print(f"simulate ok ({args.kind})")
    return EXIT_PASS


def cmd_lemma3(args) -> int:
    out_dir = _out_dir(args)
    manifest = _manifest(args, "lemma3")
    f = ser.walsh_from_dict(ser.read_json(args.function))
    trunc = lemma3_truncate(f, Fraction(args.delta))
    residual = corr_tail_certificate(trunc.f_prime, trunc.cutoff, args.horizon)
    _emit(out_dir, manifest, args.out, {
        "f_prime": ser.walsh_to_dict(trunc.f_prime),
        "cutoff": trunc.cutoff,
        "kept_norm_sq": ser.fraction_to_str(trunc.kept_norm_sq),
        "tail_frac": ser.fraction_to_str(trunc.tail_frac),
        "distance_below_delta": trunc.distance_below(Fraction(args.delta)),
        "residual_correlation": ser.fraction_to_str(residual),
    })
    _finish(out_dir, manifest)
    if residual != 0 or not trunc.distance_below(Fraction(args.delta)):
        print("lemma3 FAILED: truncation guarantee violated", file=sys.stderr)
        return EXIT_VIOLATION
    print(
        f"lemma3 ok: {len(trunc.f_prime.terms)} terms kept, shifted copies "
        f"orthogonal for every n > {trunc.cutoff}"
    )
    return EXIT_PASS


def cmd_report(args) -> int:
    out_dir = _out_dir(args)
    manifest = _manifest(args, "report")
    plan_dir = Path(args.plan_dir)
    plan = ser.read_json(plan_dir / "plan.json")
    lines = [
        f"horizon: {plan['horizon']}",
        f"product correlations vanish for n >= {plan['n_zero_threshold']}",
        f"sound: {plan['sound']}",
    ]
    ok = bool(plan["sound"])
    for name in ("cert_s.json", "cert_t.json"):
        cert = ser.certificate_from_dict(ser.read_json(plan_dir / name))
        ok = ok and cert.ok
        lines.append(
            f"{cert.subject}: {len(cert.zero_intervals)} zero intervals, "
            f"{len(cert.rigidity_times)} rigidity times, "
            f"{len(cert.polynomial_claims)} polynomial claims, "
            f"ok={cert.ok}"
        )
        for note in cert.unverified_notes:
            lines.append(f"{cert.subject} unverified: {note}")
    text = "\n".join(lines) + "\n"
    _emit(out_dir, manifest, args.out, {"ok": ok, "summary": lines})
    _finish(out_dir, manifest)
    print(text, end="")
    return EXIT_PASS if ok else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rankpair", description=__doc__)
    parser.add_argument("--out-dir", default=None,
                        help="output directory (default: $RANKPAIR_OUT or .)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("schedule", help="generate and validate an interval schedule")
    p.add_argument("--growth", default="3", help="geometric growth ratio (rational)")
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--seed-lengths", default="2",
                   help="comma-separated initial breakpoint gaps")
    p.add_argument("--out", default="schedule.json")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("plan", help="build and certify a transformation pair")
    p.add_argument("--schedule", default=None, help="schedule file (else generated)")
    p.add_argument("--growth", default="8")
    p.add_argument("--horizon", type=int, default=100)
    p.add_argument("--blocking-cuts", type=int, default=2)
    p.add_argument("--generic-cuts", type=int, default=4)
    p.add_argument("--poly", default="rigidity",
                   help='"rigidity" or JSON {"coefficients": {"0": "1/2", ...}}')
    p.add_argument("--max-generic-per-block", type=int, default=1)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("verify", help="recheck a certificate against its spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--cert", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("correlate", help="exact correlation brackets over a lag range")
    p.add_argument("--spec", required=True)
    p.add_argument("--function", required=True)
    p.add_argument("--n-min", type=int, default=0)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--tolerance", default="0")
    p.add_argument("--out", default="correlations.tsv")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("spectrum", help="spectral density estimate from a table")
    p.add_argument("--table", required=True)
    p.add_argument("--order", type=int, default=64, help="smoothing order")
    p.add_argument("--grid", type=int, default=4096)
    p.add_argument("--exact", action="store_true",
                   help="evaluate the finite trigonometric polynomial directly")
    p.add_argument("--out", default="density.tsv")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("simulate", help="sample the Gaussian system or Poisson suspension")
    p.add_argument("--kind", choices=("gaussian", "poisson"), required=True)
    p.add_argument("--table", default=None, help="covariance table (gaussian)")
    p.add_argument("--spec", default=None, help="spec file (poisson)")
    p.add_argument("--function", default=None, help="statistic file (poisson)")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lag-max", type=int, default=20)
    p.add_argument("--intensity", type=float, default=1.0)
    p.add_argument("--out", default="simulation.json")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("lemma3", help="truncate a shift polynomial with an "
                                      "exact orthogonality cutoff")
    p.add_argument("--function", required=True)
    p.add_argument("--delta", required=True, help="distance guarantee (rational)")
    p.add_argument("--horizon", type=int, default=10000)
    p.add_argument("--out", default="truncation.json")
    p.set_defaults(func=cmd_lemma3)

    p = sub.add_parser("report", help="summarize a plan directory")
    p.add_argument("--plan-dir", required=True)
    p.add_argument("--out", default="report.json")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
