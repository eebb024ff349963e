"""Command line entry point ``egh``.

Exit status: 0 when every certificate passes, 1 on input or usage errors,
2 when a proved ceiling is violated.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys

from . import io
from .metric import StructuralError, closure_indices, isometry_group, validate_space
from .quotients import ConvergenceScenario, coset_space, orbit_space, run_scenario
from .smoothing import BumpSpec, default_embedding, greedy_net, smooth_theta
from .solver import SearchConfig, egh_distance
from .triples import (CeilingViolation, PreconditionError, almost_inverse, inverse_certificate,
                      order_report, perturb_theta, theta_as_approximation)

log = logging.getLogger("egh")

USAGE_ERROR, CEILING_ERROR = 1, 2


def _threads() -> int:
    # the solver is single-worker; the variable only caps it
    return max(1, int(os.environ.get("EGH_THREADS", "1") or 1))


def cmd_validate(args):
    space = io.load_space(args.space, args.exact)
    rep = validate_space(space)
    io.write_json({"format": io.FORMAT, **rep.to_dict()}, args.out)
    return 0 if rep.valid else USAGE_ERROR


def cmd_group(args):
    space = io.load_space(args.space, args.exact)
    if not validate_space(space).valid:
        raise io.SchemaError("space fails the metric axioms")
    G = isometry_group(space)
    problems = G.check_axioms()
    out = io.group_to_dict(G)
    out.update(order=len(G), identity=G.identity, mul=G.mul.tolist(), inv=G.inv.tolist(),
               uniform=G.uniform)
    io.write_json(out, args.out)
    return CEILING_ERROR if problems else 0


def cmd_dist(args):
    A = io.load_group(args.a, args.exact)
    B = io.load_group(args.b, args.exact)
    cfg = SearchConfig(max_nodes=args.budget,
                       mode="exact" if args.mode == "exact" else "upper_bound")
    cert = egh_distance(A, B, cfg)
    io.write_json({"format": io.FORMAT, "mode": args.mode, **cert.to_dict()}, args.out)
    return 0


def cmd_check_triple(args):
    t = io.load_triple(args.triple, args.exact)
    reports = [order_report(t), theta_as_approximation(t), inverse_certificate(t)]
    out = {"format": io.FORMAT, "epsilon": t.order, "components": t.components,
           "passed": all(r.passed for r in reports), "reports": reports}
    io.write_json(out, args.out)
    return 0 if out["passed"] else CEILING_ERROR


def cmd_invert(args):
    t = io.load_triple(args.triple, args.exact)
    inv = almost_inverse(t)
    rep = inverse_certificate(t, inv)
    out = {**io.triple_to_dict(inv), "order": inv.order, "certificate": rep}
    io.write_json(out, args.out)
    return 0 if rep.passed else CEILING_ERROR


def cmd_certify_theta(args):
    t = io.load_triple(args.triple, args.exact)
    reports = [theta_as_approximation(t)]
    if args.theta2 is not None:
        theta2 = [int(v) for v in args.theta2.split(",")]
        reports.append(perturb_theta(t, theta2))
    out = {"format": io.FORMAT, "epsilon": t.order,
           "passed": all(r.passed for r in reports), "reports": reports}
    io.write_json(out, args.out)
    return 0 if out["passed"] else CEILING_ERROR


def cmd_smooth(args):
    t = io.load_triple(args.triple, args.exact)
    emb = default_embedding(t.target)
    net = greedy_net(t.source, args.net_radius)
    theta2, rep = smooth_theta(t, emb, net, BumpSpec(args.cutoff, args.profile))
    out = {"format": io.FORMAT, "theta2": theta2.tolist(), "net": list(net.centers),
           "report": rep}
    io.write_json(out, args.out)
    return 0 if rep.passed else CEILING_ERROR


def cmd_quotient(args):
    G = io.load_group(args.group, args.exact)
    if args.subgroup is None:
        q = orbit_space(G)
        kind = "orbits"
    else:
        gens = [int(v) for v in args.subgroup.split(",") if v.strip()]
        q = coset_space(G, closure_indices(G, gens))
        kind = "cosets"
    out = {"format": io.FORMAT, "kind": kind, "classes": [list(c) for c in q.classes],
           "dist": q.dist, "gap": q.gap}
    io.write_json(out, args.out)
    return 0


def cmd_scenario(args):
    data, base = io._load(args.scenario, None)
    io._check_format(data)
    try:
        limit = io.load_group(data["limit"], args.exact, base)
        sc = ConvergenceScenario(limit, data["schedule"], seed=data.get("seed", args.seed),
                                 subgroup=data.get("subgroup", ()),
                                 group_mode=data.get("group_mode", "transport"),
                                 budget=data.get("budget", args.budget))
    except KeyError as exc:
        raise io.SchemaError(f"scenario is missing {exc}") from None
    rep = run_scenario(sc)
    io.write_json({"format": io.FORMAT, **rep.to_dict()}, args.out)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            for row in rep.csv_rows():
                w.writerow([io.num_out(v) for v in row])
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="write the JSON report here")
    common.add_argument("--exact", action="store_true", help="rational arithmetic")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=2_000_000)

    p = argparse.ArgumentParser(prog="egh", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("validate", parents=[common])
    s.add_argument("space")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("group", parents=[common])
    s.add_argument("space")
    s.set_defaults(func=cmd_group)

    s = sub.add_parser("dist", parents=[common])
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--mode", choices=["exact", "bound"], default="exact")
    s.set_defaults(func=cmd_dist)

    for verb, fn in (("check-triple", cmd_check_triple), ("invert", cmd_invert)):
        s = sub.add_parser(verb, parents=[common])
        s.add_argument("triple")
        s.set_defaults(func=fn)

    s = sub.add_parser("certify-theta", parents=[common])
    s.add_argument("triple")
    s.add_argument("--theta2", default=None, help="comma separated element indices")
    s.set_defaults(func=cmd_certify_theta)

    s = sub.add_parser("smooth", parents=[common])
    s.add_argument("triple")
    s.add_argument("--net-radius", type=float, required=True)
    s.add_argument("--cutoff", type=float, required=True)
    s.add_argument("--profile", choices=["tent", "indicator"], default="tent")
    s.set_defaults(func=cmd_smooth)

    s = sub.add_parser("quotient", parents=[common])
    s.add_argument("group")
    s.add_argument("--subgroup", default=None,
                   help="comma separated generator indices; omit for the orbit space")
    s.set_defaults(func=cmd_quotient)

    s = sub.add_parser("scenario", parents=[common])
    s.add_argument("scenario")
    s.add_argument("--csv", default=None)
    s.set_defaults(func=cmd_scenario)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code else 0
    _threads()
    try:
        return args.func(args)
    except CeilingViolation as exc:
        log.error("proved ceiling violated: %s", exc)
        return CEILING_ERROR
    except (io.SchemaError, StructuralError, PreconditionError, ValueError, OSError,
            KeyError, IndexError) as exc:
        log.error("%s", exc)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
