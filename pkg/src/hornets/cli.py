"""``hornet`` command-line driver.

Exit codes: 0 success, 2 usage error, 3 model error, 4 resource limit.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from importlib import resources
from pathlib import Path

from . import export
from .bos import BosParams, bos_model, run_bos, trace_rows
from .engine import enabled_events
from .errors import HornetError, LimitExceeded, ModeLimitExceeded
from .modelfile import Model, format_model, model_with_gamma, parse_model
from .stochastic import Simulator, build_dmc, firing_probabilities, transient_distribution

EXIT_OK, EXIT_USAGE, EXIT_MODEL, EXIT_LIMIT = 0, 2, 3, 4

log = logging.getLogger("hornets")


class _UsageError(Exception):
    pass


def bundled_models() -> list[str]:
    root = resources.files("hornets") / "models"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".hornet"))


def resolve_model_path(target: str):
    """A file path, or the name of a bundled model (with or without suffix)."""
    if Path(target).exists():
        return Path(target)
    name = target if target.endswith(".hornet") else target + ".hornet"
    res = resources.files("hornets") / "models" / name
    if res.is_file():
        return res
    raise _UsageError(f"no such model file or bundled model: {target} "
                      f"(bundled: {', '.join(bundled_models())})")


def _load(args) -> Model:
    path = resolve_model_path(args.model)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise _UsageError(f"cannot read {args.model}: {exc}") from None
    model = parse_model(text, args.arithmetic)
    if args.mape_gamma is not None:
        try:
            model = model_with_gamma(model, args.mape_gamma)
        except ValueError:
            raise _UsageError(f"--mape-gamma expects a number, got {args.mape_gamma!r}") from None
    return model


def _write(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _default_seed() -> int:
    raw = os.environ.get("HORNET_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise _UsageError(f"HORNET_SEED must be an integer, got {raw!r}") from None


# ------------------------------------------------------------ commands

def cmd_events(args) -> int:
    model = _load(args)
    enabled = enabled_events(model.system, model.marking)
    probs = firing_probabilities(model.system, model.marking, enabled=enabled)
    modes = {ev: m for ev, m in enabled}
    _write(export.events_csv(probs, modes, model.namer()), args.out)
    return EXIT_OK


def _check_limits(args):
    if args.max_states < 1 or getattr(args, "max_depth", None) is not None and args.max_depth < 0:
        raise _UsageError("--max-states must be positive and --max-depth nonnegative")


def cmd_rg(args) -> int:
    _check_limits(args)
    model = _load(args)
    d = build_dmc(model.system, model.marking, max_states=args.max_states,
                  max_depth=args.max_depth)
    name = model.namer()
    text = export.dmc_to_dot(d, name) if args.format == "dot" else export.dmc_to_json(d, name)
    _write(text, args.out)
    if d.truncated and not args.allow_truncated:
        print(f"hornet: state-space limit reached ({len(d.states)} states, "
              f"frontier {d.frontier}); output is partial", file=sys.stderr)
        return EXIT_LIMIT
    return EXIT_OK


def cmd_transient(args) -> int:
    _check_limits(args)
    if args.steps < 0:
        raise _UsageError("--steps must be nonnegative")
    model = _load(args)
    d = build_dmc(model.system, model.marking, max_states=args.max_states,
                  max_depth=args.steps)
    dist = transient_distribution(d, args.steps, allow_truncated=True)
    _write(export.transient_csv(d, dist, model.namer()), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.steps < 0:
        raise _UsageError("--steps must be nonnegative")
    model = _load(args)
    seed = _default_seed() if args.seed is None else args.seed
    name = model.namer()
    sim = Simulator(model.system, observer=lambda mu, en: {"marking": mu.pretty(name)})
    trace = sim.run(model.marking, seed, args.steps)
    _write(export.trace_csv(trace), args.out)
    return EXIT_OK


def _payoff(text: str):
    try:
        pairs = [tuple(x.split(",")) for x in text.split(";")]
        if len(pairs) != 4 or any(len(p) != 2 for p in pairs):
            raise ValueError
        return ((pairs[0], pairs[1]), (pairs[2], pairs[3]))
    except ValueError:
        raise argparse.ArgumentTypeError(
            "payoff is four 'r0,r1' pairs separated by ';' (row-major: a0a1;a0b1;b0a1;b0b1)"
        ) from None


def cmd_bos(args) -> int:
    fields = {k: getattr(args, k) for k in ("A0", "B0", "A1", "B1", "threshold", "gamma",
                                          "horizon", "payoff") if getattr(args, k) is not None}
    try:
        p = BosParams(**fields)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    if p.horizon < 0:
        raise _UsageError("--horizon must be nonnegative")
    if args.export_model:
        Path(args.export_model).write_text(format_model(bos_model(p)), encoding="utf-8")
    seed = _default_seed() if args.seed is None else args.seed
    trace = run_bos(p, seed)
    rows = trace_rows(trace)
    _write(export.bos_csv(rows), args.out)
    if args.plot:
        from .plotting import plot_choice_probabilities
        plot_choice_probabilities(rows, args.plot, p.threshold,
                                  title=f"battle of sexes, seed {seed}")
    return EXIT_OK


def cmd_validate(args) -> int:
    model = _load(args)
    model.system.check_marking(model.marking)
    if args.print:
        _write(format_model(model), None)
    else:
        sysn = model.system
        print(f"ok: {len(model.kinds)} kinds, {len(model.nets)} object nets, "
              f"{len(sysn.places)} places, {len(sysn.transitions)} transitions, "
              f"digest {model.digest()[:16]}")
    return EXIT_OK


# ------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hornet",
                                 description="Stochastic elementary hornets: events, "
                                             "reachability chains, simulation.")
    ap.add_argument("--mape-gamma", type=str, default=None, metavar="G",
                    help="replace every system rate by G**TC (transformation complexity)")
    ap.add_argument("--arithmetic", choices=("rational", "float"), default=None,
                    help="override the model's arithmetic option")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def model_cmd(name, help_text):
        sp = sub.add_parser(name, help=help_text, description=help_text)
        sp.add_argument("model", help="model file, or name of a bundled model (fig2, fig3)")
        return sp

    sp = model_cmd("events", "list enabled events of the initial marking with probabilities")
    sp.add_argument("--out", help="output file (default stdout)")
    sp.set_defaults(func=cmd_events)

    sp = model_cmd("rg", "build the reachability graph with probabilities (DMC) and export it")
    sp.add_argument("--max-states", type=int, default=100_000)
    sp.add_argument("--max-depth", type=int, default=None)
    sp.add_argument("--format", choices=("dot", "json"), default="dot")
    sp.add_argument("--out", help="output file (default stdout)")
    sp.add_argument("--allow-truncated", action="store_true",
                    help="exit 0 even if a limit cut the graph")
    sp.set_defaults(func=cmd_rg)

    sp = model_cmd("transient", "state distribution after a number of steps")
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--max-states", type=int, default=100_000)
    sp.add_argument("--out", help="output file (default stdout)")
    sp.set_defaults(func=cmd_transient)

    sp = model_cmd("simulate", "one seeded run; trace as CSV")
    sp.add_argument("--seed", type=int, default=None, help="default: $HORNET_SEED or 0")
    sp.add_argument("--steps", type=int, default=100)
    sp.add_argument("--out", help="output file (default stdout)")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("bos", help="run the battle-of-sexes adaptation scenario",
                        description="Run the battle-of-sexes adaptation scenario and emit "
                                    "step,prA0,prA1,structureFlag as CSV.")
    for f in ("A0", "B0", "A1", "B1"):
        sp.add_argument(f"--{f}", type=str, default=None, help=f"initial rate of branch {f}")
    sp.add_argument("--payoff", type=_payoff, default=None,
                    help="rewards 'r0,r1;r0,r1;r0,r1;r0,r1' for (a0,a1) (a0,b1) (b0,a1) (b0,b1); "
                         "default 3,1;0,0;0,0;1,3")
    sp.add_argument("--threshold", type=str, default=None, help="adaptation threshold (0.8)")
    sp.add_argument("--gamma", type=str, default=None, help="MAPE rate base (0.5)")
    sp.add_argument("--horizon", type=int, default=None, help="number of steps (200)")
    sp.add_argument("--seed", type=int, default=None, help="default: $HORNET_SEED or 0")
    sp.add_argument("--out", help="CSV output file (default stdout)")
    sp.add_argument("--plot", help="also render the choice probabilities to this image file")
    sp.add_argument("--export-model", help="write the scenario as a model file")
    sp.set_defaults(func=cmd_bos)

    sp = model_cmd("validate", "parse and check a model")
    sp.add_argument("--print", action="store_true", help="print the normalised model")
    sp.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"hornet: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LimitExceeded, ModeLimitExceeded) as exc:
        print(f"hornet: resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except HornetError as exc:
        print(f"hornet: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
