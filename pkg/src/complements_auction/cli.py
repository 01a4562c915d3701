"""Command-line interface.

Exit codes: 0 success or positive verdict, 1 negative verdict (not stable,
non-equilibrium, not supermodular), 2 input error, 3 gross complements
precondition violated.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import io
from .auction import run_auction
from .demand import demand, demand_reports
from .errors import AuctionError, EnumerationCapError, GrossComplementsViolation, InstanceError
from .generate import GeneratorParams, generate
from .market import MarketInstance
from .oracles import efficient_sets, is_equilibrium_price, is_stable, is_supermodular
from .verifier import verify

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_PRECONDITION = 0, 1, 2, 3


def _instance(path, *, valuations: bool = True):
    market = io.parse_instance(path)
    if valuations and not isinstance(market, MarketInstance):
        raise InstanceError("this command needs an instance with valuations", path)
    return market


def _print(doc) -> None:
    sys.stdout.write(io.dumps(doc))


def cmd_solve(args) -> int:
    instance = _instance(args.instance)
    initial = io.parse_prices(args.initial, instance) if args.initial else None
    trace = run_auction(instance, initial)
    if args.trace:
        io.emit_trace(trace, args.trace, instance)
    if args.summary:
        io.emit_trace(trace, args.summary, instance, summary=True)
    _print({
        "outcome": trace.result.to_dict(),
        "prices": trace.final_prices.by_contract(),
        "lyapunov": trace.lyapunov_values,
        "total_rounds": trace.total_rounds,
    })
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.reports:
        market = _instance(args.instance, valuations=False)
        reports = io.parse_reports(args.reports, market)
    else:
        if not args.prices:
            raise InstanceError("verify needs a price file or --reports")
        market = _instance(args.instance)
        reports = demand_reports(market, io.parse_prices(args.prices, market))
    trace = verify(reports, market)
    if args.trace:
        io.emit_trace(trace, args.trace, market)
    _print(io.verification_document(trace, market))
    return EXIT_OK if trace.is_equilibrium else EXIT_NEGATIVE


def cmd_demand(args) -> int:
    instance = _instance(args.instance)
    prices = io.parse_prices(args.prices, instance)
    if not instance.has_agent(args.agent):
        raise InstanceError(f"unknown agent {args.agent!r}")
    _print(io.report_document(demand(instance, args.agent, prices), instance))
    return EXIT_OK


def cmd_oracle(args) -> int:
    instance = _instance(args.instance)
    order = instance.sorted_contracts
    if args.check == "efficient":
        eff = efficient_sets(instance)
        _print({
            "value": eff.value,
            "maximizers": [order(s) for s in eff.maximizers],
            "largest": order(eff.largest),
        })
        return EXIT_OK
    if args.check == "supermodular":
        result, ok = {}, True
        for a in instance.agents:
            check = is_supermodular(instance, a)
            ok &= check.ok
            result[a] = {"ok": True} if check else {
                "ok": False, "witness": [order(s) for s in check.witness]}
        _print(result)
        return EXIT_OK if ok else EXIT_NEGATIVE
    if args.extra is None:
        raise InstanceError(f"oracle {args.check} needs a second file argument")
    if args.check == "equilibrium":
        phi = is_equilibrium_price(instance, io.parse_prices(args.extra, instance))
        _print({"equilibrium": phi is not None, "support": None if phi is None else order(phi)})
        return EXIT_OK if phi is not None else EXIT_NEGATIVE
    check = is_stable(instance, io.parse_outcome(args.extra, instance))
    _print({"stable": check.ok, "reason": check.reason})
    return EXIT_OK if check else EXIT_NEGATIVE


def _value_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None
    return lo, hi


def cmd_gen(args) -> int:
    try:
        params = GeneratorParams(
            agents=args.agents,
            contracts=args.contracts,
            max_participants=args.max_participants,
            value_range=args.value_range,
            synergy_density=args.synergy_density,
            seed=args.seed,
        )
    except ValueError as exc:
        raise InstanceError(str(exc)) from exc
    io.emit_instance(generate(params), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="complements-auction",
        description="Stable outcomes for multilateral collaboration markets with gross complements.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log each auction round")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the auction to a stable outcome")
    p.add_argument("instance")
    p.add_argument("--initial", help="balanced initial price file (default: all zero)")
    p.add_argument("--trace", help="write the full JSON trace here")
    p.add_argument("--summary", help="write a per-round CSV summary here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check whether prices support an equilibrium")
    p.add_argument("instance")
    p.add_argument("prices", nargs="?")
    p.add_argument("--reports", help="verify demand reports from this file instead of prices")
    p.add_argument("--trace", help="write the verification trace here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("demand", help="one agent's demand sets at given prices")
    p.add_argument("instance")
    p.add_argument("prices")
    p.add_argument("--agent", required=True)
    p.set_defaults(func=cmd_demand)

    p = sub.add_parser("oracle", help="brute-force reference checks")
    p.add_argument("check", choices=["efficient", "equilibrium", "stable", "supermodular"])
    p.add_argument("instance")
    p.add_argument("extra", nargs="?", help="price file (equilibrium) or outcome file (stable)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="generate a random supermodular instance")
    p.add_argument("--agents", type=int, required=True)
    p.add_argument("--contracts", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--max-participants", type=int, default=2)
    p.add_argument("--value-range", type=_value_range, default=(-10, 10))
    p.add_argument("--synergy-density", type=float, default=0.3)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except GrossComplementsViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (InstanceError, EnumerationCapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AuctionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
