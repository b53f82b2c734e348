"""Command-line front end: colengths, reports, transformations, experiments."""

import argparse
import json
import random
import sys

from .cache import ColengthCache, cached_colength
from .errors import HKError, ParseError, PreconditionError
from .field import element_str, FieldSpec
from .hk import (
    LocalRingPresentation,
    family_scan,
    hk_estimate,
    hk_function,
    monsky_reference,
)
from .poly import parse_poly
from .reduce import CIPresentation, ci_to_hypersurface, conjecture_scan
from .ringfile import load_ring_file
from .series import (
    SQUARES_PLUS_CUBE,
    SUM_OF_SQUARES,
    TruncatedSeries,
    diagonalize_hypersurface,
    parse_series,
)


def _emit(data):
    print(json.dumps(data, sort_keys=True))


def _split_exprs(text, ring):
    gens = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            raise ParseError("empty generator expression")
        gens.append(parse_poly(part, ring))
    return gens


def _named_ideal(rf, label):
    if label not in rf.ideals:
        raise ParseError(
            "no ideal %r in the ring file (have: %s)"
            % (label, ", ".join(sorted(rf.ideals)) or "none")
        )
    return list(rf.ideals[label])


def _quotient_generators(rf, args):
    """Generators of J from --gens or --ideal; empty means the regular ring."""
    if args.gens is not None:
        return _split_exprs(args.gens, rf.ring)
    if args.ideal is not None:
        return _named_ideal(rf, args.ideal)
    return []


def _power_ideal(rf, args):
    """Generators of the ideal whose bracket powers are measured, or None."""
    if getattr(args, "power", None) is not None:
        return _split_exprs(args.power, rf.ring)
    if getattr(args, "power_ideal", None) is not None:
        return _named_ideal(rf, args.power_ideal)
    return None


def _presentation(rf, gens):
    if rf.precision is not None:
        gens = [TruncatedSeries.from_polynomial(g, rf.precision) for g in gens]
    return LocalRingPresentation(rf.ring, gens)


def cmd_compute(args):
    rf = load_ring_file(args.ringfile)
    P = _presentation(rf, _quotient_generators(rf, args))
    I = _power_ideal(rf, args)
    cache = None if args.no_cache else ColengthCache(args.cache_dir)
    entry, _hit = cached_colength(P, I, args.q, cache)
    if args.json:
        _emit(
            {
                "q": args.q,
                "colength": entry["colength"],
                "basis_size": entry["basis_size"],
                "seconds": entry["seconds"],
            }
        )
    else:
        print(entry["colength"])
    return 0


def _report_command(args, with_estimate):
    rf = load_ring_file(args.ringfile)
    P = _presentation(rf, _quotient_generators(rf, args))
    I = _power_ideal(rf, args)
    report = hk_function(P, I, args.emax)
    if with_estimate:
        est, unc = hk_estimate(report)
        report.estimate = est
        report.uncertainty = unc
    if args.out == "json":
        _emit(report.to_json())
    else:
        sys.stdout.write(report.to_csv())
        if with_estimate:
            print("# estimate,%r,uncertainty,%r" % (est, unc))
    return 0


def cmd_function(args):
    return _report_command(args, with_estimate=False)


def cmd_estimate(args):
    return _report_command(args, with_estimate=True)


def _parse_alphas(spec_text, field, seed):
    if spec_text == "all":
        return None
    kind, _, count_text = spec_text.partition(":")
    if kind == "random" and count_text.isdigit():
        count = min(int(count_text), field.size - 1)
        if count < 1:
            raise PreconditionError("--alphas random needs a positive count")
        rng = random.Random(seed)
        picks = sorted(rng.sample(range(1, field.size), count))
        return [field.element(i) for i in picks]
    raise ParseError("--alphas must be 'all' or 'random:<count>'")


def cmd_family(args):
    rf = load_ring_file(args.ringfile)
    f = parse_poly(args.f, rf.ring)
    g = parse_poly(args.g, rf.ring)
    alphas = _parse_alphas(args.alphas, rf.field, args.seed)
    result = family_scan(f, g, alphas=alphas, e_max=args.emax, seed=args.seed)
    if args.out == "json":
        _emit(result.to_json())
    else:
        sys.stdout.write(result.to_csv())
    return 0


def cmd_monsky(args):
    rf = load_ring_file(args.ringfile)
    ring = rf.ring
    if ring.n < 3:
        raise PreconditionError("the quartic family needs three variables")
    if not 0 <= args.alpha < rf.field.size:
        raise PreconditionError(
            "--alpha must be an element index below %d" % rf.field.size
        )
    x, y, z = ring.variable(0), ring.variable(1), ring.variable(2)
    f = z ** 4 + x * y * z ** 2 + (x ** 3 + y ** 3) * z
    g = x ** 2 * y ** 2
    alpha = rf.field.element(args.alpha)
    P = LocalRingPresentation(ring, [f + alpha * g])
    report = hk_function(P, None, args.emax)
    est, unc = hk_estimate(report)
    ref = monsky_reference(alpha)
    within = None if ref is None else abs(est - float(ref)) <= args.tol
    if args.json:
        _emit(
            {
                "alpha": element_str(alpha),
                "estimate": est,
                "uncertainty": unc,
                "reference": None if ref is None else float(ref),
                "reference_exact": None if ref is None else str(ref),
                "tolerance": args.tol,
                "within_tolerance": within,
            }
        )
        return 0
    print("alpha %s" % element_str(alpha))
    print("estimate %r (uncertainty %r)" % (est, unc))
    if ref is None:
        print("reference undefined at alpha = 0")
    else:
        print("reference %s = %r" % (ref, float(ref)))
        print("within tolerance %r: %s" % (args.tol, "true" if within else "false"))
    return 0


def cmd_diagonalize(args):
    rf = load_ring_file(args.ringfile)
    f = parse_series(args.f, rf.ring, default_precision=rf.precision or 12)
    cert = diagonalize_hypersurface(f, target=args.target, extend=not args.no_extend)
    verified = cert.verify(f)
    if args.json:
        data = cert.to_json()
        data["verified"] = verified
        _emit(data)
        return 0
    print("tag %s" % cert.tag)
    print("normal form %s" % cert.normal_form)
    for name, image in zip(cert.ring.names, cert.images):
        print("  %s -> %s" % (name, image))
    for ext in cert.extensions:
        print("field extended by degree %d" % ext["degree"])
    print("verified: %s" % ("true" if verified else "false"))
    return 0


def cmd_reduce(args):
    rf = load_ring_file(args.ringfile)
    gens = _quotient_generators(rf, args)
    if not gens:
        raise PreconditionError("reduce needs at least one generator")
    P = CIPresentation(rf.ring, gens, precision=rf.precision)
    final, trace = ci_to_hypersurface(
        P, seed=args.seed, audit=args.audit, e_max=args.emax
    )
    if args.json:
        _emit(trace.to_json())
        return 0
    described = trace.describe()
    if described:
        print(described)
    if trace.flags:
        print("flags: %s" % ", ".join(trace.flags))
    if final is None:
        print("the presentation is regular within precision")
    else:
        print(
            "hypersurface in k[[%s]]: %s" % (", ".join(final.ring.names), final)
        )
    if args.audit:
        print("stage,e,q,f_before,f_after,leq")
        for block in trace.audits:
            for row in block["rows"]:
                print(
                    "%d,%d,%d,%r,%r,%s"
                    % (
                        block["stage"],
                        row["e"],
                        row["q"],
                        row["f_before"],
                        row["f_after"],
                        "true" if row["leq"] else "false",
                    )
                )
    return 0


def cmd_scan(args):
    field = FieldSpec(args.p)
    report = conjecture_scan(
        args.dim,
        field,
        count=args.count,
        seed=args.seed,
        e_max=args.emax,
        tolerance=args.tol,
    )
    if args.out == "json":
        _emit(report.to_json())
    else:
        sys.stdout.write(report.to_csv())
        print("# quadric_estimate,%r" % report.quadric_estimate)
        print("# all_pass,%s" % ("true" if report.all_pass() else "false"))
    return 0


def _add_ring_argument(sub):
    sub.add_argument("ringfile", help="ring description file")


def _add_ideal_arguments(sub):
    sub.add_argument("--ideal", help="named ideal from the ring file for J")
    sub.add_argument("--gens", help="inline comma-separated generators for J")


def _add_power_arguments(sub):
    sub.add_argument(
        "--power", help="inline generators of the ideal taken to bracket powers"
    )
    sub.add_argument(
        "--power-ideal", help="named ideal taken to bracket powers (default m)"
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hk",
        description="Hilbert-Kunz functions, multiplicities, and reductions "
        "over small finite fields.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="one colength lambda(R/I^[q])")
    _add_ring_argument(c)
    _add_ideal_arguments(c)
    _add_power_arguments(c)
    c.add_argument("--q", type=int, required=True, help="Frobenius power p^e")
    c.add_argument("--json", action="store_true")
    c.add_argument("--cache-dir", help="cache directory (default platform cache)")
    c.add_argument("--no-cache", action="store_true")
    c.set_defaults(func=cmd_compute)

    c = sub.add_parser("function", help="table of f_e = colength / q^dim")
    _add_ring_argument(c)
    _add_ideal_arguments(c)
    _add_power_arguments(c)
    c.add_argument("--emax", type=int, default=3)
    c.add_argument("--out", choices=("csv", "json"), default="csv")
    c.set_defaults(func=cmd_function)

    c = sub.add_parser("estimate", help="function table plus extrapolated limit")
    _add_ring_argument(c)
    _add_ideal_arguments(c)
    _add_power_arguments(c)
    c.add_argument("--emax", type=int, default=4)
    c.add_argument("--out", choices=("csv", "json"), default="csv")
    c.set_defaults(func=cmd_estimate)

    c = sub.add_parser("family", help="colength comparison across f + alpha*g")
    _add_ring_argument(c)
    c.add_argument("--f", required=True, help="base polynomial expression")
    c.add_argument("--g", required=True, help="deformation polynomial expression")
    c.add_argument("--alphas", default="all", help="'all' or 'random:<count>'")
    c.add_argument("--emax", type=int, default=3)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", choices=("csv", "json"), default="csv")
    c.set_defaults(func=cmd_family)

    c = sub.add_parser("monsky", help="quartic family fiber vs the exact limit")
    _add_ring_argument(c)
    c.add_argument("--alpha", type=int, default=1, help="field element index")
    c.add_argument("--emax", type=int, default=5)
    c.add_argument("--tol", type=float, default=0.01)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_monsky)

    c = sub.add_parser("diagonalize", help="diagonal normal form certificate")
    _add_ring_argument(c)
    c.add_argument("--f", required=True, help="series expression, optionally @N")
    c.add_argument(
        "--target",
        choices=(SUM_OF_SQUARES, SQUARES_PLUS_CUBE),
        default=SUM_OF_SQUARES,
    )
    c.add_argument("--no-extend", action="store_true")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_diagonalize)

    c = sub.add_parser("reduce", help="complete intersection to hypersurface")
    _add_ring_argument(c)
    _add_ideal_arguments(c)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--audit", action="store_true")
    c.add_argument("--emax", type=int, default=3, help="audit depth")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_reduce)

    c = sub.add_parser("scan", help="sampled singular estimates vs the quadric")
    c.add_argument("--dim", type=int, required=True)
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--count", type=int, default=10)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--emax", type=int, default=3)
    c.add_argument("--tol", type=float, default=0.02)
    c.add_argument("--out", choices=("csv", "json"), default="csv")
    c.set_defaults(func=cmd_scan)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except HKError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
