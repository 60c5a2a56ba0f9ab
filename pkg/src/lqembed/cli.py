"""Command-line entry point.

Exit codes: 0 success, 2 invalid input, 3 degenerate window (n = 2),
4 symbolic/numeric inconsistency.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from fractions import Fraction
from typing import Callable, Optional

from . import __version__
from .embed import (
    DegenerateWindow,
    NotANorm,
    density,
    describe,
    embeds,
    kwapien_counterexample,
    lambda_threshold,
    theorem1_constants,
    theorem2_constants,
)
from .exactmath import real_approx
from .moments import EvenIntegerExponent, UnsupportedOrder, derive_moment_identity
from .norms import InvalidLambda, PerturbedNormFamily, UnsupportedExponent, convexity_interval
from .numeric import (
    QuadratureError,
    ValidationReport,
    finite_difference_convexity,
    gram_psd_check,
    validate_representation,
)

EXIT_OK, EXIT_INPUT, EXIT_DEGENERATE, EXIT_INCONSISTENT = 0, 2, 3, 4
SEED_ENV = "LQEMBED_SEED"

_RATIONAL = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


class InputError(ValueError):
    pass


def parse_rational(text: str) -> Fraction:
    """Exact "p/q" or integer.  Decimals are refused rather than rounded."""
    m = _RATIONAL.match(str(text))
    if not m:
        hint = ""
        if re.match(r"^\s*[+-]?\d*\.\d+\s*$", str(text)):
            hint = f" (write it as a fraction, e.g. {Fraction(str(text).strip())})"
        raise InputError(f"expected an exact rational p/q, got {text!r}{hint}")
    num, den = int(m.group(1)), int(m.group(2) or 1)
    if den == 0:
        raise InputError("zero denominator")
    return Fraction(num, den)


def parse_grid(text: str) -> tuple[int, int]:
    m = re.match(r"^\s*(\d+)\s*[xX,]\s*(\d+)\s*$", str(text))
    if not m:
        raise InputError(f"grid must look like 200x400, got {text!r}")
    return int(m.group(1)), int(m.group(2))


def parse_n_list(text: str) -> list[int]:
    out: list[int] = []
    for part in str(text).replace(" ", "").split(","):
        if not part:
            continue
        if "-" in part[1:] or ".." in part:
            lo, hi = re.split(r"\.\.|-", part, maxsplit=1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out:
        raise InputError("empty --n list")
    return out


def read_config(path: str) -> dict[str, str]:
    """key=value lines; '#' starts a comment; keys mirror the long flags."""
    cfg: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InputError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            cfg[key.replace("-", "_")] = value
    return cfg


def exact_str(x) -> str:
    """Plain text for an exact real: p/q, a surd, or the defining polynomial."""
    if x is None:
        return ""
    if isinstance(x, Fraction):
        return str(x)
    return x.closed_form() or f"root of {x.poly.pretty('x')} in ({x.lo}, {x.hi})"


# --- output -------------------------------------------------------------------


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def dump_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    keys = list(dict.fromkeys(k for r in rows for k in r))
    writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: _flat(v) for k, v in r.items()})
    return buf.getvalue()


def _flat(v):
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return v


class Result:
    """What a subcommand produced: a JSON document, CSV rows and a text rendering."""

    def __init__(self, doc, rows: list[dict], text: str, code: int = EXIT_OK):
        self.doc, self.rows, self.text, self.code = doc, rows, text, code

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return dump_json(self.doc)
        if fmt == "csv":
            return dump_csv(self.rows)
        return self.text.rstrip("\n") + "\n"


# --- subcommands ----------------------------------------------------------------


def _need(args, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n, None) in (None, "")]
    if missing:
        raise InputError(f"missing required flag(s): {', '.join(missing)}")


def _seed(args) -> int:
    if args.seed is not None:
        return int(args.seed)
    env = os.environ.get(SEED_ENV)
    if env:
        return int(env)
    return int(args.config_seed) if getattr(args, "config_seed", None) is not None else 0


def cmd_identity(args) -> Result:
    _need(args, "n", "q", "max_power")
    n, q, m = int(args.n), parse_rational(args.q), int(args.max_power)
    ident = derive_moment_identity(n, q, m)
    rows = [{"power": r.power, "coefficients": [str(c) for c in r.poly.coeffs], "poly": r.poly.pretty("u")}
            for r in ident.rows]
    pre = ident.rows[0].prefactor
    lines = [f"moment identity n={n} q={q} (u = xi_n^2, unnormalized surface measure)",
             f"prefactor C = {pre.pretty()} ~ {pre.value():.12g}"]
    lines += [f"  x_n^{r['power']} = C * int |(x,xi)|^q ({r['poly']}) dxi" for r in rows]
    return Result(ident.to_json(), rows, "\n".join(lines))


def _family(args) -> PerturbedNormFamily:
    _need(args, "n", "s")
    return PerturbedNormFamily(int(args.n), int(args.s))


def cmd_threshold(args) -> Result:
    _need(args, "n", "s", "q")
    fam, q = _family(args), parse_rational(args.q)
    cert = lambda_threshold(fam, q)
    doc = cert.to_json()
    code = EXIT_OK
    lines = [f"lambda_q for n={fam.n} s={fam.s} q={q}: {describe(cert.threshold)}",
             f"binding condition: {', '.join(cert.binding_condition)}"]
    if cert.note:
        lines.append(f"note: {cert.note}")
    if fam.n == 2 and fam.s == 2:
        warning = "degenerate window: alpha_2 = 1/11 equals the convexity endpoint, so no counterexample exists"
        doc["warning"] = warning
        lines.append(f"warning: {warning}")
        code = EXIT_DEGENERATE
    row = {"n": fam.n, "s": fam.s, "q": str(q), "threshold": exact_str(cert.threshold),
           "approx": real_approx(cert.threshold), "binding": ";".join(cert.binding_condition)}
    return Result(doc, [row], "\n".join(lines), code)


def cmd_convexity(args) -> Result:
    _need(args, "s")
    fam = PerturbedNormFamily(int(args.n or 3), int(args.s))
    cert = convexity_interval(fam)
    row = {"s": fam.s, "lower": exact_str(cert.lower), "upper": exact_str(cert.upper)}
    text = f"N_lam is a norm (s={fam.s}) iff lam in {cert.pretty()}\n{cert.factored_note}\n{cert.reduction_note}"
    return Result(cert.to_json(), [row], text)


def cmd_embeds(args) -> Result:
    _need(args, "n", "s", "q", "lam")
    fam, q, lam = _family(args), parse_rational(args.q), parse_rational(args.lam)
    dec = embeds(fam, q, lam)
    cert = dec.certificate
    verdict = "embeds" if dec.embeds else "does not embed"
    detail = (f"minimum {cert.minimum.value} at u={cert.minimum.location}" if dec.embeds and cert.minimum
              else f"negative at u={cert.witness}: {cert.witness_value}")
    text = f"X_lam (n={fam.n}, s={fam.s}, lam={lam}) {verdict} in L_{q}\ndensity b(u) = {dec.density.at(lam).pretty('u')}\n{detail}"
    row = {"n": fam.n, "s": fam.s, "q": str(q), "lambda": str(lam), "embeds": dec.embeds}
    return Result(dec.to_json(), [row], text)


def cmd_certify(args) -> Result:
    _need(args, "n")
    bundle = kwapien_counterexample(int(args.n))
    e, ne = bundle.embed.certificate, bundle.non_embed.certificate
    text = "\n".join([
        f"n={bundle.n}, lam={bundle.lam}",
        f"norm: {bool(bundle.norm)} (lam in {bundle.norm.interval.pretty()})",
        f"L_1/2: density {bundle.embed.density.at(bundle.lam).pretty('u')}, minimum {e.minimum.value} at u={e.minimum.location}",
        f"L_1: density {bundle.non_embed.density.at(bundle.lam).pretty('u')}, value {ne.witness_value} at u={ne.witness}",
    ])
    row = {"n": bundle.n, "lambda": str(bundle.lam), "norm": bool(bundle.norm),
           "embeds_half": bundle.embed.embeds, "embeds_one": bundle.non_embed.embeds}
    return Result(bundle.to_json(), [row], text)


def _validation_batch(fam: PerturbedNormFamily, qs, lam: Fraction, args, seed: int) -> list[ValidationReport]:
    samples, points, trials = int(args.samples), int(args.points), int(args.trials)
    resolution = _resolution(args, fam.n)
    reports: list[ValidationReport] = []
    for q in qs:
        reports.append(validate_representation(density(fam, q), lam, samples, seed, resolution))
    reports.append(gram_psd_check(fam, qs[0], lam, points, trials, seed))
    reports.append(finite_difference_convexity(fam, lam, int(args.pairs), seed))
    return reports


def _resolution(args, n: int):
    if n == 3:
        return parse_grid(args.grid)
    if n == 2:
        return parse_grid(args.grid)[0]
    return int(args.mc_points)


def _report_line(r: ValidationReport) -> str:
    tag = "PASS" if r.passed else ("info" if r.informational else "FAIL")
    return f"  [{tag}] {r.name}: error {r.max_rel_error:.3g} (tol {r.tolerance:g})"


def cmd_validate(args) -> Result:
    _need(args, "n", "s", "q", "lam")
    fam, q, lam = _family(args), parse_rational(args.q), parse_rational(args.lam)
    seed = _seed(args)
    try:
        _resolution(args, fam.n)
    except QuadratureError as exc:
        doc = {"skipped": str(exc)}
        return Result(doc, [doc], f"skipped: {exc}")
    dec = embeds(fam, q, lam)
    reports = _validation_batch(fam, [q], lam, args, seed)
    doc = {"embeds": dec.embeds, "reports": [r.to_json() for r in reports], "seed": seed}
    code = EXIT_INCONSISTENT if any(r.required_failure for r in reports) else EXIT_OK
    lines = [f"validation n={fam.n} s={fam.s} q={q} lam={lam} seed={seed}: embeds={dec.embeds}"]
    lines += [_report_line(r) for r in reports]
    rows = [{"name": r.name, "max_rel_error": r.max_rel_error, "tolerance": r.tolerance,
             "passed": r.passed, "informational": r.informational} for r in reports]
    return Result(doc, rows, "\n".join(lines), code)


def cmd_reproduce(args) -> Result:
    seed = _seed(args)
    ns = parse_n_list(args.n) if args.n else list(range(3, 11))
    theorems = {int(args.theorem)} if args.theorem else {1, 2}
    doc: dict = {"seed": seed}
    rows: list[dict] = []
    lines: list[str] = []
    code = EXIT_OK
    failures: list[str] = []
    if 1 in theorems:
        doc["theorem1"] = []
        lines.append("Theorem 1 family (s = 2)")
        for n in ns:
            try:
                rep = theorem1_constants(n)
            except DegenerateWindow as exc:
                doc["theorem1"].append({"n": n, "degenerate": str(exc)})
                lines.append(f"  n={n}: degenerate window: {exc}")
                code = max(code, EXIT_DEGENERATE)
                continue
            entry = rep.to_json()
            fam = PerturbedNormFamily(n, 2)
            lam = Fraction(1, 6 * n - 4)
            reports = _validation_batch(fam, [Fraction(1, 2), Fraction(1)], lam, args, seed)
            entry["validation"] = [r.to_json() for r in reports]
            doc["theorem1"].append(entry)
            chain_ok = all(rep.chain.values()) and rep.window_nonempty and rep.alpha_closed_form_agrees
            if not chain_ok:
                failures.append(f"theorem 1 chain at n={n}")
            failures += [r.name for r in reports if r.required_failure]
            lines.append(
                f"  n={n}: alpha={describe(rep.alpha)} < 1/{6*n-2}={real_approx(Fraction(1, 6*n-2))}"
                f" < 1/{6*n-4}={real_approx(Fraction(1, 6*n-4))} < 1/11; chain {'ok' if chain_ok else 'FAILED'}"
            )
            lines += ["  " + _report_line(r) for r in reports]
            rows.append({"block": "theorem1", "n": n, "alpha": real_approx(rep.alpha),
                         "one_over_6n_minus_2": str(Fraction(1, 6 * n - 2)), "one_over_6n_minus_4": str(lam),
                         "window_nonempty": rep.window_nonempty, "chain_ok": chain_ok})
    if 2 in theorems:
        t2 = theorem2_constants()
        entry = t2.to_json()
        fam = PerturbedNormFamily(3, 4)
        lam = Fraction(1, 26)
        reports = _validation_batch(fam, [Fraction(1, 4), Fraction(1, 2)], lam, args, seed)
        entry["validation"] = [r.to_json() for r in reports]
        doc["theorem2"] = entry
        lh = t2.half_threshold.threshold
        ok = t2.ordering_ok and t2.window_nonempty and t2.non_embedding_on_window
        if not ok:
            failures.append("theorem 2 ordering/window")
        failures += [r.name for r in reports if r.required_failure]
        lines += [
            "Theorem 2 family (n = 3, s = 4)",
            f"  convexity endpoint: {describe(t2.convexity_endpoint)}",
            f"  L_1/4 threshold:    {describe(t2.quarter_threshold.threshold)}",
            f"  L_1/2 threshold:    {describe(lh)}",
            f"  stated bound 1/28:  lam_1/2 <= 1/28 is {t2.within_stated_bound}",
            f"  window ({describe(t2.window[0])}, {describe(t2.window[1])}] nonempty: {t2.window_nonempty};"
            f" non-embedding certified on it: {t2.non_embedding_on_window}",
        ]
        lines += ["  " + _report_line(r) for r in reports]
        rows.append({"block": "theorem2", "convexity_endpoint": exact_str(t2.convexity_endpoint),
                     "lambda_quarter": exact_str(t2.quarter_threshold.threshold), "lambda_half": real_approx(lh),
                     "le_1_28": t2.within_stated_bound, "window_nonempty": t2.window_nonempty})
    doc["failures"] = failures
    if failures:
        code = EXIT_INCONSISTENT
        lines.append("FAILURES: " + "; ".join(failures))
    return Result(doc, rows, "\n".join(lines), code)


COMMANDS: dict[str, Callable] = {
    "identity": cmd_identity,
    "threshold": cmd_threshold,
    "convexity": cmd_convexity,
    "embeds": cmd_embeds,
    "certify": cmd_certify,
    "validate": cmd_validate,
    "reproduce": cmd_reproduce,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lqembed", description="Exact L_q embedding certificates for perturbed Euclidean norms.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file mirroring the long flags")
    common.add_argument("--format", choices=["human", "json", "csv"], default="human")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--seed", type=int, help=f"RNG seed (env {SEED_ENV} is used when absent)")
    numeric = argparse.ArgumentParser(add_help=False)
    numeric.add_argument("--grid", default="200x400", help="n_theta x n_phi for the n=3 grid")
    numeric.add_argument("--mc-points", type=int, default=100000, help="Monte Carlo points for n > 3")
    numeric.add_argument("--samples", type=int, default=20)
    numeric.add_argument("--points", type=int, default=12)
    numeric.add_argument("--trials", type=int, default=20)
    numeric.add_argument("--pairs", type=int, default=2000)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("identity", parents=[common], help="moment identities x_n^(2j) = C int |(x,xi)|^q P_j")
    p.add_argument("--n", type=int)
    p.add_argument("--q")
    p.add_argument("--max-power", type=int)

    for name, helptext in (("threshold", "exact lambda_q"), ("embeds", "decide embeddability at one lambda")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--n", type=int)
        p.add_argument("--s", type=int, default=2)
        p.add_argument("--q")
        if name == "embeds":
            p.add_argument("--lambda", dest="lam")

    p = sub.add_parser("convexity", parents=[common], help="exact norm interval")
    p.add_argument("--n", type=int)
    p.add_argument("--s", type=int, default=2)

    p = sub.add_parser("certify", parents=[common], help="counterexample bundle at lam = 1/(6n-4)")
    p.add_argument("--n", type=int)

    p = sub.add_parser("validate", parents=[common, numeric], help="numeric cross-checks")
    p.add_argument("--n", type=int)
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--q")
    p.add_argument("--lambda", dest="lam")

    p = sub.add_parser("reproduce", parents=[common, numeric], help="every constant of both theorems")
    p.add_argument("--n", help="list such as 3,4,5 or 3-10 (default 3-10)")
    p.add_argument("--theorem", choices=["1", "2"])
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    cfg = read_config(args.config)
    if "lambda" in cfg:
        cfg["lam"] = cfg.pop("lambda")
    seed = cfg.pop("seed", None)
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    chosen = sub.choices[args.command]
    known = {a.dest for a in chosen._actions}
    unknown = set(cfg) - known
    if unknown:
        raise InputError(f"unknown config keys: {', '.join(sorted(unknown))}")
    chosen.set_defaults(**cfg)
    args = parser.parse_args(argv)
    args.config_seed = seed
    return args


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        result = COMMANDS[args.command](args)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)
    except DegenerateWindow as exc:
        print(f"degenerate window: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except EvenIntegerExponent as exc:
        print(f"invalid exponent: {exc}; q must not be an even integer", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, UnsupportedExponent, UnsupportedOrder, NotANorm, InvalidLambda, QuadratureError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ArithmeticError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = result.render(args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return result.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
