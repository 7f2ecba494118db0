"""Command-line interface.

Exit codes: 0 pass, 1 budget violation or distinguishable verdict,
2 usage error, 3 input or parse error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__, units
from .config import default_config_path, load_config, load_schema
from .conversation import detectability_probability, simulate_conversation
from .exceptions import CalibrationError, DomainError, InputError
from .report import compute_budget, render_report
from .trials import DEFAULT_ALPHA, DEFAULT_MARGIN, Setup, evaluate_trials, load_trials, plan_sessions

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3

logger = logging.getLogger("tttbudget")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_budget(args):
    config = load_config(args.config)
    report = compute_budget(config)
    _emit(render_report(report, args.format), args.out)
    return EXIT_OK if report.overall_pass else EXIT_FAIL


def cmd_simulate(args):
    config = load_config(args.config)
    model = config.gap_model()
    delta = units.ms(args.delta_ms)
    params = config.conversation_params(n_turns=args.turns, delta=delta, seed=args.seed)
    result = simulate_conversation(model, params)
    expected = detectability_probability(model, delta, params.detect_threshold)
    if args.format == "machine":
        doc = result.to_dict(include_gaps=args.gaps)
        doc["closed_form_detectability"] = expected
        doc["model"] = {"mu_s": model.mu, "sigma_s": model.sigma,
                        "lower_bound_s": model.lower_bound, "upper_bound_s": model.upper_bound,
                        "median_s": model.median(), "positive_fraction": float(model.sf(0.0)),
                        "exact_fit": model.exact}
        text = _dump(doc)
    else:
        lines = [
            f"turns                     {result.n_turns}",
            f"added delay               {args.delta_ms:g} ms",
            f"seed                      {result.seed}",
            f"detectable silence rate   {result.detectable_silence_rate:.4f}"
            f"  (closed form {expected:.4f})",
            f"baseline detectable rate  {result.baseline_detectable_rate:.4f}",
            f"repeat rate               {result.repeat_rate:.4f}",
            f"double-talk rate          {result.double_talk_rate:.4f}",
            f"breakdowns                {result.breakdown_count}",
        ]
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_evaluate(args):
    trials = load_trials(args.trials)
    verdict = evaluate_trials(trials, alpha=args.alpha, margin=args.margin)
    if args.format == "machine":
        text = _dump(verdict.to_dict())
    else:
        lines = [
            f"trials            {verdict.n_trials}",
            f"correct           {verdict.n_correct}",
            f"p-value           {verdict.p_value:.6g}  (one-sided exact binomial, chance 0.5)",
            f"alpha             {verdict.alpha:g}",
            f"identification    {'not distinguishable' if verdict.passed else 'distinguishable'}",
        ]
        if verdict.min_detectable_rate is not None:
            lines.append(f"power note        rejecting needs >= {verdict.critical_correct} correct; "
                         f"80% power only against rates >= {verdict.min_detectable_rate:.3f}")
        for label, mos in (("MOS mediated", verdict.mos_assessment),
                           ("MOS reference", verdict.mos_reference)):
            if mos is not None:
                lines.append(f"{label:<17} {mos.mean:.3f} +/- {mos.half_width:.3f} (n={mos.n})")
        if verdict.mos_pass is not None:
            lines.append(f"MOS non-inferior  {'yes' if verdict.mos_pass else 'no'} "
                         f"(margin {verdict.mos_margin:g})")
        lines += [f"caveat: {c}" for c in verdict.caveats]
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK if verdict.passed and verdict.mos_pass is not False else EXIT_FAIL


def cmd_plan(args):
    plan = plan_sessions(args.setup, args.subjects, args.seed)
    if args.format == "machine":
        text = _dump(plan.to_dict())
    else:
        lines = [f"setup {plan.setup.value}, seed {plan.seed}, {len(plan.assignments)} group(s)"]
        for g in plan.assignments:
            slots = "  ".join(f"{k}={v}" for k, v in g.slots.items())
            lines.append(f"group {g.index:>3}: {slots}  mediated={g.mediated}")
        counts = ", ".join(f"{k}: {v}" for k, v in plan.mediated_counts().items())
        lines.append(f"balance: {counts}")
        if plan.unassigned:
            lines.append(f"unassigned ({len(plan.unassigned)}): {' '.join(plan.unassigned)}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_config(args):
    if args.what == "schema":
        _emit(_dump(load_schema()), args.out)
    else:
        _emit(default_config_path().read_text(encoding="utf-8"), args.out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="tttbudget", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log injected defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("text", "machine"), default="text")
        p.add_argument("--out", help="write to this file instead of stdout")

    p = sub.add_parser("budget", help="evaluate requirements against declared capabilities")
    p.add_argument("--config", required=True)
    common(p)
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("simulate", help="Monte Carlo turn-taking under added delay")
    p.add_argument("--config", required=True)
    p.add_argument("--delta-ms", type=float, required=True)
    p.add_argument("--turns", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--gaps", action="store_true", help="include every perceived gap (machine format)")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", help="binomial verdict and MOS over recorded trials")
    p.add_argument("--trials", required=True)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--margin", type=float, default=DEFAULT_MARGIN)
    common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("plan", help="balanced assignment of subjects to sessions")
    p.add_argument("--setup", choices=[s.value for s in Setup], required=True)
    p.add_argument("--subjects", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("config", help="print the config schema or the shipped default config")
    p.add_argument("what", choices=("schema", "default"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_config)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, DomainError, CalibrationError) as exc:
        print(f"tttbudget: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
