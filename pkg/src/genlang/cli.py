"""``genlang`` command-line interface.

Exit codes: 0 on success, 2 for bad input or configuration, 3 when a
computation has no usable probability mass.
"""
from __future__ import annotations

import argparse
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import fixtures, io, replicate
from .baselines import free_production_cue_validity, normalize_label
from .errors import InputError, NumericalError
from .inference.mcmc import McmcConfig
from .inference.models import FIXED, UNCERTAIN, fit_beta, fit_beta_mixture, fit_joint, posterior_predictive
from .inference.summary import summarize
from .numerics import (BetaMixturePrior, BetaParams, GridDistribution, GridSpec, discretize_beta,
                       discretize_mixture)
from .pragmatics import (EXPECTATION, POINT, FixedThresholdParams, SpeakerConfig, endorse, endorse_expectation,
                         endorse_fixed, endorsement_curve, fixed_endorsement_curve, interpret, interpret_conjunction)
from .priors import cue_validity, prevalence_prior_from_world
from .semantics import CONJUNCTION, ThresholdPrior, Utterance
from .synthetic import generics_dataset

DATA_ENV = "GENLANG_DATA_DIR"


def _floats(text: str, n: int, what: str) -> list:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"{what}: expected {n} comma-separated numbers, got {text!r}") from None
    if len(vals) != n:
        raise InputError(f"{what}: expected {n} comma-separated numbers, got {text!r}")
    return vals


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", name).strip("_") or "item"


def _mcmc(args) -> McmcConfig:
    return McmcConfig(iterations=args.iterations, burn_in=args.burn_in, chains=args.chains, seed=args.seed)


def _grid_for(args, rate: bool) -> GridSpec:
    return GridSpec.rate(args.grid_bins) if rate else GridSpec.unit(args.grid_bins)


def _load_prior(args) -> GridDistribution:
    chosen = [x for x in (args.prior, args.prior_file, args.mixture) if x]
    if len(chosen) != 1:
        raise InputError("give exactly one of --prior, --prior-file, --mixture")
    if args.prior:
        return fixtures.prior(args.prior, _grid_for(args, fixtures.is_rate_fixture(args.prior)))
    if args.prior_file:
        return io.read_grid_distribution(args.prior_file)
    phi, gamma, xi = _floats(args.mixture, 3, "--mixture")
    return discretize_mixture(BetaMixturePrior(phi, BetaParams(gamma, xi)), GridSpec.unit(args.grid_bins))


def _print_json(obj):
    print(io.dumps(obj))


# verbs ---------------------------------------------------------------------

def cmd_fit_prior(args) -> int:
    data = io.read_elicitation(args.input)
    props = args.property or sorted(data.by_property)
    unknown = [p for p in props if p not in data.by_property]
    if unknown:
        raise InputError(f"no responses for {', '.join(unknown)}")
    out = Path(args.out)
    cfg = _mcmc(args)
    grid = GridSpec.unit(args.grid_bins)
    params, diagnostics = {}, {}
    for f in props:
        slug = _slug(f)
        responses = data.by_property[f]
        fits = {"mixture": fit_beta_mixture(responses, cfg)}
        if args.single_beta:
            fits["single"] = fit_beta(responses, cfg)
        params[f] = {}
        for kind, samples in fits.items():
            io.write_samples(out / f"samples_{slug}_{kind}.csv", samples)
            params[f][kind] = summarize(samples)
            diagnostics[f"{f} ({kind})"] = samples.diagnostics()
        m = {k: v["map"] for k, v in params[f]["mixture"].items()}
        io.write_grid_distribution(out / f"prior_{slug}.csv",
                                   discretize_mixture(BetaMixturePrior(m["phi"], BetaParams(m["gamma"], m["xi"])), grid))
        # posterior-predictive CDFs against the empirical CDF of the data
        xs = np.linspace(0.0, 1.0, 101)
        observed = np.clip(np.asarray(responses, dtype=float), 1, 99) / 100
        cols = {"empirical": np.searchsorted(np.sort(observed), xs, side="right") / observed.size}
        for kind, samples in fits.items():
            sim = np.sort(posterior_predictive(samples, 5000, cfg.seed))
            cols[kind] = np.searchsorted(sim, xs, side="right") / sim.size
        io.write_table(out / f"ppc_{slug}.csv", ["x", *cols], zip(xs, *cols.values()))
    io.write_json(out / "prior_params.json", params)
    io.write_json(out / "diagnostics.json", diagnostics)
    _print_json({f: {k: v["map"] for k, v in p["mixture"].items()} for f, p in params.items()})
    return 0


def cmd_endorse(args) -> int:
    prior = _load_prior(args)
    theta = ThresholdPrior.below(prior.support)
    cfg = SpeakerConfig(args.lam, args.variant)
    result = {"lambda": args.lam, "model": args.model, "variant": args.variant}
    if args.referent_beta:
        gamma, xi = _floats(args.referent_beta, 2, "--referent-beta")
        if prior.support[-1] >= 1:
            raise InputError("--referent-beta needs a unit-interval prior")
        ref = discretize_beta(BetaParams(gamma, xi), GridSpec.unit(prior.support.size))
        if args.model == FIXED:
            curve = fixed_endorsement_curve(prior, FixedThresholdParams(args.theta_star, args.noise), cfg)
            s = float(np.dot(ref.mass, curve))
        elif args.variant == EXPECTATION:
            s = endorse_expectation(ref, prior, theta, cfg)
        else:
            s = float(np.dot(ref.mass, endorsement_curve(prior, cfg, theta)))
        result["referent_beta"] = [gamma, xi]
    elif args.referent is not None:
        p = args.referent
        if prior.support[-1] < 1 and not 0 <= p <= 1:
            raise InputError(f"referent {p} outside [0, 1]")
        if p < 0:
            raise InputError("referent must be non-negative")
        if args.model == FIXED:
            s = endorse_fixed(p, prior, FixedThresholdParams(args.theta_star, args.noise), cfg)
        else:
            s = endorse(p, prior, theta, cfg)
        result["referent"] = p
    else:
        raise InputError("give --referent or --referent-beta")
    result["endorsement"] = s
    if args.table:
        post = interpret(Utterance.parse("gen"), prior, theta)
        io.write_table(args.table, ("p", "prior", "listener_gen"), zip(prior.support, prior.mass, post.mass))
    _print_json(result)
    return 0


def cmd_interpret(args) -> int:
    u = Utterance.parse(args.utterance)
    if u.kind == CONJUNCTION:
        joint = fixtures.conjunction_prior(args.grid_bins)
        out = {}
        for stage in ("partial", "full"):
            post = interpret_conjunction(joint, stage)
            out[stage] = {"mean_a": post.marginal_a().mean(), "mean_b": post.marginal_b().mean()}
        out["prior"] = {"mean_a": joint.marginal_a().mean(), "mean_b": joint.marginal_b().mean()}
        _print_json(out)
        return 0
    prior = _load_prior(args)
    post = interpret(u, prior, ThresholdPrior.below(prior.support))
    if args.table:
        io.write_table(args.table, ("p", "prior", "posterior"), zip(prior.support, prior.mass, post.mass))
    _print_json({"utterance": str(u), "prior_mean": prior.mean(), "posterior_mean": post.mean()})
    return 0


def cmd_fit_joint(args) -> int:
    data = io.read_elicitation(args.elicitation)
    items = io.read_endorsements(args.endorsements)
    cfg = _mcmc(args)
    pairs = {(it.category, it.property) for it in items if it.referent is None}
    referents = {kf: data.by_referent[kf] for kf in pairs if kf in data.by_referent}
    samples, joint = fit_joint(data.by_property, referents, items, cfg, args.model, GridSpec.unit(args.grid_bins))
    out = Path(args.out)
    summ = summarize(samples)
    io.write_samples(out / "samples.csv", samples)
    io.write_json(out / "summary.json", summ)
    io.write_json(out / "diagnostics.json", samples.diagnostics())
    flat = samples.flat()
    take = np.linspace(0, flat.shape[0] - 1, min(400, flat.shape[0])).astype(int)
    preds = np.array([joint.predict(flat[i]) for i in take])
    io.write_predictions(out / "predictions.csv", [it.item for it in items],
                         [it.n_agree / it.n_total for it in items], preds.mean(axis=0),
                         np.percentile(preds, 2.5, axis=0), np.percentile(preds, 97.5, axis=0))
    _print_json({n: summ[n] for n in ("lambda", "theta_star", "noise") if n in summ})
    return 0


def cmd_replicate(args) -> int:
    data_dir = args.data_dir or os.environ.get(DATA_ENV)
    if data_dir and not Path(data_dir).is_dir():
        raise InputError(f"data directory {data_dir} does not exist")
    rep = replicate.run(args.case, _mcmc(args), Path(data_dir) if data_dir else None, args.grid_bins,
                        n_bootstrap=args.bootstrap, joint=args.joint)
    if rep.banner:
        print(rep.banner)
    for c in rep.checks:
        print(c.line())
    for name, m in rep.metrics.items():
        print(f"{name}: r2={m['r2']:.4f} mse={m['mse']:.6f}")
    if args.out:
        out = Path(args.out)
        io.write_json(out / f"{args.case}_summary.json", rep.summary())
        for name, pred in rep.predictions.items():
            lo, hi = rep.intervals.get(name, (None, None))
            io.write_predictions(out / f"{args.case}_{_slug(name)}.csv", rep.items, rep.human, pred, lo, hi)
    return 0 if rep.passed else 1


def cmd_cue_validity(args) -> int:
    if bool(args.world) == bool(args.free_production):
        raise InputError("give exactly one of --world or --free-production")
    rows = []
    if args.world:
        world = io.read_world(args.world)
        grid = GridSpec.unit(args.grid_bins)
        for f in world.features():
            z = world.normalizer(f)
            prior_mean = prevalence_prior_from_world(world, f, grid).mean() if z > 0 else float("nan")
            for k in world.names:
                # Z = 0 rows are flagged, not fatal
                cv = cue_validity(world, f, k) if z > 0 else float("nan")
                rows.append((f, k, cv, z, prior_mean, "" if z > 0 else "Z=0"))
        header = ("feature", "category", "cue_validity", "Z", "prior_mean", "flag")
    else:
        produced = io.read_free_production(args.free_production)
        for f in sorted(produced):
            labels = [normalize_label(r) for r in produced[f]]
            for k in sorted(set(labels)):
                rows.append((f, k, free_production_cue_validity(labels, k), len(labels)))
        header = ("feature", "category", "cue_validity", "n_responses")
    if args.out:
        io.write_table(args.out, header, rows)
    print(",".join(header))
    for r in rows:
        print(",".join(str(io._fmt(v)) for v in r))
    return 0


def cmd_simulate(args) -> int:
    fixed = FixedThresholdParams(args.theta_star, args.noise) if args.model == FIXED else None
    data = generics_dataset(n_items=args.items, lam=args.lam, seed=args.seed, model=args.model, fixed=fixed,
                            grid=GridSpec.unit(args.grid_bins))
    rows = []
    for f, resp in sorted(data.prior_data.items()):
        for i, r in enumerate(resp):
            rows.append((f"p{i}", f, f"other{i}", "synthetic", r))
    for (k, f), resp in sorted(data.referent_data.items()):
        for i, r in enumerate(resp):
            rows.append((f"p{i}", f, k, "supplied", r))
    out = Path(args.out)
    io.write_table(out / "elicitation.csv", io.ELICITATION, rows)
    io.write_table(out / "endorsements.csv", io.ENDORSEMENTS,
                   [(it.item, it.category, it.property, it.n_agree, it.n_total) for it in data.items])
    io.write_json(out / "truth.json", {"parameters": data.truth, "endorsement": data.endorsement})
    print(f"wrote {len(rows)} elicitation rows and {len(data.items)} items to {out}")
    return 0


# parser --------------------------------------------------------------------

GLOBAL_DEFAULTS = {"grid_bins": 100, "seed": 0, "chains": 1, "iterations": 10_000, "burn_in": 2_000,
                   "lam": 1.0, "model": UNCERTAIN, "variant": POINT}


def _common() -> argparse.ArgumentParser:
    # SUPPRESS keeps a subcommand from overwriting flags given before it
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = p.add_argument_group("global options")
    g.add_argument("--grid-bins", type=int, help="grid resolution (default 100)")
    g.add_argument("--seed", type=int, help="random seed (default 0)")
    g.add_argument("--chains", type=int, help="MCMC chains (default 1)")
    g.add_argument("--iterations", type=int, help="MCMC iterations per chain (default 10000)")
    g.add_argument("--burn-in", type=int, help="discarded iterations (default 2000)")
    g.add_argument("--lambda", dest="lam", type=float, help="speaker rationality (default 1)")
    g.add_argument("--model", choices=(UNCERTAIN, FIXED), help="threshold model (default uncertain)")
    g.add_argument("--variant", choices=(POINT, EXPECTATION), help="speaker belief form (default point)")
    return p


def _prior_args(p):
    p.add_argument("--prior", help=f"fixture name ({', '.join(fixtures.names())})")
    p.add_argument("--prior-file", help="support,mass CSV (e.g. written by fit-prior)")
    p.add_argument("--mixture", help="phi,gamma,xi of a Beta mixture prior")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="genlang", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit-prior", parents=[common], help="fit Beta-mixture prevalence priors")
    p.add_argument("--input", required=True, help="elicitation CSV")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--property", action="append", help="restrict to a property (repeatable)")
    p.add_argument("--single-beta", action="store_true", help="also fit a single Beta for comparison")
    p.set_defaults(func=cmd_fit_prior)

    p = sub.add_parser("endorse", parents=[common], help="speaker endorsement probability")
    _prior_args(p)
    p.add_argument("--referent", type=float, help="referent prevalence (or rate)")
    p.add_argument("--referent-beta", help="gamma,xi of a referent distribution")
    p.add_argument("--theta-star", type=float, default=0.5, help="fixed model threshold")
    p.add_argument("--noise", type=float, default=0.0, help="fixed model guessing noise")
    p.add_argument("--table", help="write the listener table p,prior,listener_gen to this CSV")
    p.set_defaults(func=cmd_endorse)

    p = sub.add_parser("interpret", parents=[common], help="listener posterior after an utterance")
    _prior_args(p)
    p.add_argument("--utterance", default="gen", help="gen, silence, some, most or gen+gen")
    p.add_argument("--table", help="write p,prior,posterior to this CSV")
    p.set_defaults(func=cmd_interpret)

    p = sub.add_parser("fit-joint", parents=[common], help="joint Bayesian fit of priors and endorsements")
    p.add_argument("--elicitation", required=True)
    p.add_argument("--endorsements", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit_joint)

    p = sub.add_parser("replicate", parents=[common], help="worked examples and case-study comparisons")
    p.add_argument("--case", required=True, choices=replicate.CASES)
    p.add_argument("--data-dir", help=f"published data directory (default ${DATA_ENV})")
    p.add_argument("--out", help="directory for prediction tables and the summary")
    p.add_argument("--bootstrap", type=int, default=200, help="participant resamples for regression intervals")
    p.add_argument("--joint", action="store_true", help="also run joint fits on synthetic data")
    p.set_defaults(func=cmd_replicate)

    p = sub.add_parser("cue-validity", parents=[common], help="cue validities from a world or free production")
    p.add_argument("--world", help="category,prior_prob,<feature>... CSV")
    p.add_argument("--free-production", help="participant_id,property,response CSV")
    p.add_argument("--out", help="write the table to this CSV")
    p.set_defaults(func=cmd_cue_validity)

    p = sub.add_parser("simulate", parents=[common], help="synthetic generics data from either model")
    p.add_argument("--out", required=True)
    p.add_argument("--items", type=int, default=5)
    p.add_argument("--theta-star", type=float, default=0.3)
    p.add_argument("--noise", type=float, default=0.2)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for k, v in GLOBAL_DEFAULTS.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except NumericalError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
