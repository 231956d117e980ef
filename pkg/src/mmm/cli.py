"""Command-line front end for the verification campaigns.

Exit codes: 0 every sample passed, 1 some sample failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import campaigns
from .campaigns import CampaignConfig
from .errors import MMMError

log = logging.getLogger("mmm")


def _values(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad value list {text!r}") from exc


def _positive(text: str) -> float:
    x = float(text)
    if x <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _common(p: argparse.ArgumentParser, sizes: bool = True):
    if sizes:
        p.add_argument("--m", type=int)
        p.add_argument("--n", type=int)
        p.add_argument("--r", type=int)
        p.add_argument("--pattern", help="multiplicity pattern, e.g. 1,1")
        p.add_argument("--values", type=_values,
                       help="explicit sigma / omega / lambda list instead of random draws")
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=_positive, help="override the pass tolerance")
    p.add_argument("--method", choices=["closed", "fd", "both"])
    p.add_argument("--gap", type=_positive, default=0.1, help="minimum spacing of random spectra")
    p.add_argument("--h1", type=_positive, help="first-derivative step")
    p.add_argument("--h2", type=_positive, help="second-derivative step")
    p.add_argument("--rank-tol", type=_positive, default=1e-10,
                   help="numerical rank threshold relative to the largest singular value")
    p.add_argument("--richardson", action="store_true", help="one level of Richardson extrapolation")
    p.add_argument("--json", metavar="PATH", help="write the JSON report here ('-' for stdout)")
    p.add_argument("--csv", metavar="PATH", help="write a CSV of the samples here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mmm", description="Numerical minimality checks for matrix manifolds.")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="mean-curvature campaigns")
    vsub = verify.add_subparsers(dest="family", required=True)
    for fam in ("rank", "skew", "sym", "counterexample"):
        _common(vsub.add_parser(fam), sizes=fam != "counterexample")

    check = sub.add_parser("check", help="closed-form cross-checks")
    csub = check.add_subparsers(dest="family", required=True)
    g = csub.add_parser("gram")
    _common(g)
    g.add_argument("--family", dest="gram_family", choices=["rank", "skew", "both"], default="both")
    _common(csub.add_parser("cone-sphere"), sizes=False)

    dims = sub.add_parser("dims", help="dimension formula sweep")
    _common(dims, sizes=False)
    return parser


def config_from_args(args: argparse.Namespace) -> CampaignConfig:
    family = "dims" if args.command == "dims" else args.family.replace("-", "_")
    kw = {k: getattr(args, k) for k in ("m", "n", "r", "pattern", "values") if hasattr(args, k)}
    return CampaignConfig(
        family=family, samples=args.samples, seed=args.seed, tol=args.tol, method=args.method,
        gap=args.gap, rank_tol=args.rank_tol, h1=args.h1, h2=args.h2, richardson=args.richardson,
        gram_family=getattr(args, "gram_family", "both"), **kw,
    )


def _summary_line(report: dict) -> str:
    s = report["summary"]
    fam = report["config"]["family"]
    extra = {k: v for k, v in s.items() if k.startswith("max_")}
    parts = [f"{k}={v:.3e}" for k, v in extra.items() if isinstance(v, float)]
    return (f"{fam}: {s['passed']}/{s['samples']} pass, {s['failed']} fail, {s['errors']} error; "
            + " ".join(parts) + f"; {s['wall_time_s']:.2f}s")


def _dims_table(report: dict) -> str:
    lines = [f"{'family':<6} {'params':<28} {'formula':>7} {'numeric':>7}  ok"]
    for r in report["samples"]:
        params = ",".join(f"{k}={v}" for k, v in r["params"].items())
        lines.append(f"{r['family']:<6} {params:<28} {r['formula']:>7} {r['numeric']:>7}  "
                     f"{'yes' if r['verdict'] == 'pass' else 'NO'}")
    return "\n".join(lines)


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("MMM_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
    except MMMError as exc:
        parser.error(str(exc))
    log.info("running %s campaign with %d samples, seed %d", config.family, config.samples, config.seed)
    try:
        report = campaigns.run(config)
    except MMMError as exc:
        parser.error(str(exc))
    text = campaigns.dumps(report)
    if args.json in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.json, "w") as fh:
            fh.write(text)
        if config.family == "dims":
            print(_dims_table(report))
        print(_summary_line(report))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(campaigns.to_csv(report))
    code = campaigns.exit_code(report)
    log.info("exit code %d", code)
    return code


if __name__ == "__main__":
    sys.exit(main())
