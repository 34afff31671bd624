"""Command line entry point: ``dtnrl {generate-contacts,train,evaluate,compare}``."""

from __future__ import annotations

import argparse
import logging
import sys

from ..orbits import generate_contact_plan, write_contact_plan
from .compare import compare
from .config import RunConfig, load_config
from .runner import evaluate, train


def _config(args) -> RunConfig:
    cfg = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        cfg = cfg.with_seed(args.seed)
    return cfg


def cmd_generate_contacts(args):
    cfg = _config(args)
    v = cfg.visibility
    plan = generate_contact_plan(cfg.constellation, 0.0, cfg.env.horizon, v.dt, v.max_range,
                                 v.grazing_altitude, cfg.env.rate_max)
    write_contact_plan(plan, args.out)
    print(f"wrote {len(plan)} contacts to {args.out}")


def cmd_train(args):
    cfg = _config(args)
    result = train(cfg)
    print(f"trained {cfg.train.episodes} episodes; {len(result.checkpoints)} checkpoints; "
          f"log {result.training_csv}")


def cmd_evaluate(args):
    cfg = _config(args)
    out = args.out or cfg.output_dir
    result = evaluate(args.policy, cfg, args.episodes, out_dir=out)
    print(f"{result.label}: {len(result.episodes)} episodes -> {result.csv_path}")
    for k, (mu, sd) in result.summary.items():
        print(f"  {k:20s} {mu:.6g} ± {sd:.3g}")


def cmd_compare(args):
    print(compare(args.csv).table())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dtnrl", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate-contacts", help="write the scenario contact plan")
    g.add_argument("config")
    g.add_argument("out")
    g.set_defaults(func=cmd_generate_contacts)

    t = sub.add_parser("train", help="train the actor-critic agent")
    t.add_argument("config")
    t.add_argument("--seed", type=int)
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("evaluate", help="evaluate a policy")
    e.add_argument("config")
    e.add_argument("--policy", required=True, help="checkpoint:PATH | standard | random")
    e.add_argument("--episodes", type=int)
    e.add_argument("--seed", type=int)
    e.add_argument("--out", help="output directory (default: run.output_dir)")
    e.set_defaults(func=cmd_evaluate)

    c = sub.add_parser("compare", help="compare evaluation CSVs")
    c.add_argument("csv", nargs="+")
    c.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except Exception as exc:  # one-line cause, nonzero exit
        print(f"dtnrl {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
