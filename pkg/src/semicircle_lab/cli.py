"""Command-line driver: scenario catalog, sweeps over n, table output.

Usage::

    semicircle-lab simulate --scenario checkerboard --n 250,1000 --trials 10 --out results
    semicircle-lab conditions --scenario block --n 100,1000
    semicircle-lab walks --k-max 8
    semicircle-lab scenarios

Every subcommand accepts ``--config FILE``: a flat ``key=value`` file whose
keys are flag names.  Flags given on the command line win over the file.
"""

import argparse
import math
import sys
import dataclasses
from dataclasses import dataclass, fields

import numpy as np

from .conditions import DEFAULT_DELTA_GRID, DEFAULT_EPS_GRID, evaluate_conditions
from .concentration import spectral_concentration_experiment, truncation_survival_experiment
from .emit import VERSION_STRING, Emitter
from .ensemble import (
    DYADIC_GRID,
    EnsembleSpec,
    build_profile,
    heavy_tail_profile,
    load_profile_csv,
    threshold_sequence,
    truncate_center,
    variance_profile,
)
from .gauss import corollary_lhs, lindeberg_feller_check
from .laws import FAMILIES, EntryLaw
from .metrics import SEMICIRCLE, kolmogorov_witness, levy_distance, measure_moment, semicircle_moment
from .spectra import mean_esd, trial_eigenvalues
from .walks import MAX_WALK_LENGTH, class_tally, dyck_paths, moment_prediction, tree_pair_walks, walk_rows

# name -> (profile kind, entry family, description)
SCENARIOS = {
    "uniform-gauss": ("uniform", "gaussian", "Gaussian entries, every variance 1/n"),
    "rademacher": ("uniform", "rademacher", "random signs scaled by 1/sqrt(n)"),
    "checkerboard": ("checkerboard", "rademacher", "variance 2/n where i+j is even, 0 elsewhere"),
    "block": ("block", "gaussian", "variance 1/n except a zero off-diagonal bottom-right block"),
    "heavy-tail": ("heavy-tail", "heavy_tail_cubic", "cubic tails, scale c_n/sqrt(n log n), infinite variance"),
    "truncation-pipeline": ("heavy-tail", "heavy_tail_cubic",
                            "heavy-tail entries truncated at a vanishing level and recentered"),
    "custom": ("custom", None, "profile from --profile-file, law from --law"),
}

HIST_BINS = 200
HIST_RANGE = (-3.0, 3.0)
MAX_PREDICTION_K = 10


def _float_list(text):
    return tuple(float(x) for x in str(text).replace(";", ",").split(",") if x.strip())


def _int_list(text):
    return tuple(int(x) for x in str(text).replace(";", ",").split(",") if x.strip())


@dataclass
class ScenarioConfig:
    scenario: str = "uniform-gauss"
    n: tuple | None = None
    trials: int = 10
    seed: int = 0
    eps_grid: tuple = DEFAULT_EPS_GRID
    delta_grid: tuple = DEFAULT_DELTA_GRID
    k_max: int = 8
    out: str = "results"
    format: str = "csv"
    profile_file: str | None = None
    law: str = "gaussian"
    field: str = "real"
    workers: int = 1
    resamples: int = 10000
    rows: int | None = None
    eta: float | None = None
    _profile: object = dataclasses.field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}; choose from {', '.join(SCENARIOS)}")
        if self.scenario == "custom":
            if not self.profile_file:
                raise ValueError("the custom scenario needs --profile-file")
            self._profile = load_profile_csv(self.profile_file)
            if self.n is None:
                self.n = (self._profile.n,)
        self.n = tuple(int(v) for v in (self.n or (256,)))
        if self._profile is not None:
            if self.n != (self._profile.n,):
                raise ValueError(f"--n must be {self._profile.n} to match the profile file")
        if not self.n or any(b <= a for a, b in zip(self.n, self.n[1:])) or self.n[0] < 1:
            raise ValueError("n list must be nonempty, positive and strictly ascending")
        if self.scenario in ("heavy-tail", "truncation-pipeline") and self.n[0] < 3:
            raise ValueError("heavy-tail scenarios need n >= 3")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 1 <= self.k_max <= MAX_WALK_LENGTH:
            raise ValueError(f"k_max must be in 1..{MAX_WALK_LENGTH}")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        if self.law not in FAMILIES:
            raise ValueError(f"unknown law {self.law!r}")
        if self.workers < 1 or self.resamples < 1:
            raise ValueError("workers and resamples must be positive")

    def echo(self):
        """Config fields that determine the data (not where or how fast)."""
        d = {f.name: getattr(self, f.name) for f in fields(self)
             if f.name not in ("out", "workers", "_profile")}
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


@dataclass
class Case:
    """One matrix size of a scenario."""

    n: int
    spec: EnsembleSpec
    base: EnsembleSpec | None = None  # untruncated spec of the truncation pipeline
    eta: float | None = None


def _spec(config, n):
    kind, family, _ = SCENARIOS[config.scenario]
    if kind == "heavy-tail":
        profile = heavy_tail_profile(n)
    elif kind == "custom":
        profile = config._profile
        family = config.law
    else:
        profile = build_profile(kind, n)
    return EnsembleSpec(profile, EntryLaw(family, field=config.field), seed=config.seed, name=config.scenario)


def build_cases(config):
    """Specs for every ``n`` of the sweep."""
    specs = [_spec(config, n) for n in config.n]
    if config.scenario != "truncation-pipeline":
        return [Case(s.n, s) for s in specs]
    if config.eta is not None:
        etas = [config.eta] * len(specs)
    else:
        weak = {eps: [] for eps in DYADIC_GRID}
        for s in specs:
            rep = evaluate_conditions(s, eps_grid=DYADIC_GRID)
            for eps, v in zip(DYADIC_GRID, rep.weak_lindeberg):
                weak[eps].append(v)
        etas = threshold_sequence(weak, config.n)
    return [Case(s.n, s.with_law(truncate_center(s.law, float(eta))), base=s, eta=float(eta))
            for s, eta in zip(specs, etas)]


# -- sweep summary -----------------------------------------------------------------

def trend_flag(values, ses=None):
    """Classify a finite-n sequence of estimates.

    ``MONOTONE-DOWN`` needs every step to drop by more than the combined
    standard error of its two ends (exact values have zero error).
    """
    v = np.asarray(values, dtype=float)
    se = np.zeros_like(v) if ses is None else np.asarray(ses, dtype=float)
    if np.all(np.abs(v) <= 1e-12):
        return "FLAT-AT-ZERO"
    step = np.diff(v)
    # rounding-level differences between exact values do not count as steps
    noise = np.maximum(np.sqrt(se[:-1] ** 2 + se[1:] ** 2), 1e-12 * np.abs(v).max())
    if np.all(-step > noise):
        return "MONOTONE-DOWN"
    if np.all(step > noise):
        return "MONOTONE-UP"
    if np.all(np.abs(step) <= noise):
        return "FLAT"
    return "NON-MONOTONE"


def sweep_summary(series):
    """Trend rows ``(functional, n values, values, last/first, flag)``.

    ``series`` maps a functional name to a list of ``(n, value, se)``.
    """
    rows = []
    for name, pts in series.items():
        if len(pts) < 2:
            raise ValueError("a sweep needs at least two values of n")
        ns = [p[0] for p in pts]
        vals = [p[1] for p in pts]
        ses = [p[2] for p in pts]
        ratio = vals[-1] / vals[0] if vals[0] != 0 else float("nan")
        rows.append((name, ";".join(map(str, ns)), ";".join(repr(float(v)) for v in vals),
                     ratio, trend_flag(vals, ses)))
    return rows


SUMMARY_COLUMNS = ["functional", "n", "values", "last_over_first", "flag"]


# -- emission helpers ----------------------------------------------------------------

def _emit_conditions(em, name, report):
    em.table(name, ["functional", "parameter", "value"], report.long_rows())


def _condition_series(series, prefix, n, rep):
    def put(key, val):
        if val is not None:
            series.setdefault(prefix + key, []).append((n, val, 0.0))

    for key in ("row_one", "weak_row_one", "weak_zero", "row_bdd_sup"):
        put(key, getattr(rep, key))
    for eps, v in zip(rep.eps_grid, rep.weak_lindeberg):
        if eps == 0.5:
            put("weak_lindeberg@0.5", v)
    if rep.lindeberg is not None:
        put("lindeberg@0.5", rep.lindeberg[rep.eps_grid.index(0.5)] if 0.5 in rep.eps_grid else None)
    for d, v in zip(rep.delta_grid, rep.margin_curve):
        if d == 0.01:
            put("margin@0.01", v)


def esd_distances(spec, eigs):
    """Kolmogorov and Levy distance of the mean ESD to the semicircle law.

    The standard error is that of the mean-ESD value at the point of the
    largest Kolmogorov gap, estimated from the spread over trials.
    """
    mu = mean_esd(spec, len(eigs), eigs=eigs)
    dk, x, left = kolmogorov_witness(mu, SEMICIRCLE)
    per_trial = np.array([np.count_nonzero(e < x if left else e <= x) / len(e) for e in eigs])
    se = float(per_trial.std(ddof=1) / math.sqrt(len(eigs))) if len(eigs) > 1 else float("nan")
    return mu, dk, se, levy_distance(mu, SEMICIRCLE)


def histogram_rows(eigs):
    pooled = np.concatenate(eigs)
    counts, edges = np.histogram(pooled, bins=HIST_BINS, range=HIST_RANGE)
    width = edges[1] - edges[0]
    mass = counts / len(pooled)
    centers = 0.5 * (edges[:-1] + edges[1:])
    dens = SEMICIRCLE.pdf(centers)
    return [(edges[b], edges[b + 1], centers[b], int(counts[b]), mass[b], mass[b] / width, dens[b])
            for b in range(HIST_BINS)]


HIST_COLUMNS = ["left", "right", "center", "count", "mass", "density", "semicircle_density"]


def moment_rows(spec, mu, k_max):
    rows = []
    finite = spec.law.finite_variance
    vprof = variance_profile(spec) if finite else None
    for k in range(1, k_max + 1):
        emp = measure_moment(mu, k) if mu is not None else float("nan")
        if finite and k <= MAX_PREDICTION_K:
            pred = moment_prediction(vprof, k)
            p, exact, err = pred.value, pred.exact, pred.error_bound
        else:
            p, exact, err = float("nan"), "", float("nan")
        rows.append((spec.n, k, emp, semicircle_moment(k), p, exact, err))
    return rows


MOMENT_COLUMNS = ["n", "k", "empirical", "semicircle", "prediction", "prediction_exact", "prediction_error_bound"]


def run_scenario(config, em=None, command="simulate"):
    """Full experiment: conditions, mean ESD, distances, moments, histograms."""
    em = em or Emitter(config.out, config.format, command, config.echo())
    cases = build_cases(config)
    series, dist_rows, mom_rows = {}, [], []
    for case in cases:
        n = case.n
        stages = [("", case.spec)]
        if case.base is not None:
            stages.insert(0, ("pre_", case.base))
        for tag, spec in stages:
            rep = evaluate_conditions(spec, config.eps_grid, config.delta_grid)
            _emit_conditions(em, f"conditions_{tag}n{n}", rep)
            _condition_series(series, tag, n, rep)
            eigs = trial_eigenvalues(spec, config.trials, config.workers)
            mu, dk, se, lv = esd_distances(spec, eigs)
            em.table(f"mean_esd_{tag}n{n}", ["atom", "weight"], mu.to_rows())
            em.table(f"histogram_{tag}n{n}", HIST_COLUMNS, histogram_rows(eigs))
            dist_rows.append((tag.rstrip("_") or "main", n, config.trials, dk, se, lv))
            series.setdefault(tag + "kolmogorov", []).append((n, dk, se))
            series.setdefault(tag + "levy", []).append((n, lv, 0.0))
            if tag == "":
                mom_rows += moment_rows(spec, mu, config.k_max)
        if case.eta is not None:
            series.setdefault("eta", []).append((n, case.eta, 0.0))
    em.table("distances", ["stage", "n", "trials", "kolmogorov", "kolmogorov_se", "levy"], dist_rows)
    em.table("moments", MOMENT_COLUMNS, mom_rows)
    summary = sweep_summary(series) if len(cases) > 1 else []
    if summary:
        em.table("summary", SUMMARY_COLUMNS, summary)
    return {"distances": dist_rows, "moments": mom_rows, "summary": summary, "files": em.written}


def run_conditions(config, em):
    series = {}
    rows = []
    for case in build_cases(config):
        stages = [("", case.spec)] if case.base is None else [("pre_", case.base), ("", case.spec)]
        for tag, spec in stages:
            rep = evaluate_conditions(spec, config.eps_grid, config.delta_grid)
            _emit_conditions(em, f"conditions_{tag}n{case.n}", rep)
            _condition_series(series, tag, case.n, rep)
            rows.append(rep)
        if case.eta is not None:
            series.setdefault("eta", []).append((case.n, case.eta, 0.0))
    if len(config.n) > 1:
        em.table("summary", SUMMARY_COLUMNS, sweep_summary(series))
    return rows


def run_moments(config, em):
    rows = []
    for case in build_cases(config):
        eigs = trial_eigenvalues(case.spec, config.trials, config.workers)
        rows += moment_rows(case.spec, mean_esd(case.spec, config.trials, eigs=eigs), config.k_max)
    em.table("moments", MOMENT_COLUMNS, rows)
    return rows


def run_walks(config, em):
    ks = range(1, config.k_max + 1)
    em.table("walks", ["k", "t", "seq", "class", "tree_edges"], walk_rows(ks))
    em.table("walk_classes", ["k", "t", "class", "count"], class_tally(ks))
    counts = [(k, len(tree_pair_walks(k)), len(dyck_paths(k)), int(semicircle_moment(k)))
              for k in ks if k % 2 == 0]
    em.table("tree_counts", ["k", "tree_walks", "dyck_paths", "catalan"], counts)
    return counts


def _row_subset(n, count):
    if count is None or count >= n:
        return None
    return sorted(set(np.linspace(0, n - 1, count).round().astype(int).tolist()))


def run_gauss(config, em):
    summary = []
    cases = build_cases(config)
    for case in cases:
        study = corollary_lhs(case.spec, config.resamples, _row_subset(case.n, config.rows))
        em.table(f"gauss_rows_n{case.n}", ["row", "levy", "n", "resamples"],
                 [(r, L, case.n, config.resamples) for r, L in zip(study.rows, study.levy)])
        summary.append((case.n, config.resamples, len(study.rows), study.average, study.complement))
    em.table("gauss_summary", ["n", "resamples", "rows", "average_levy", "complement"], summary)
    feller = lindeberg_feller_check([c.spec for c in cases], resamples=min(config.resamples, 4000))
    eps = sorted(feller.rows[0].lindeberg, reverse=True)
    em.table("lindeberg_feller",
             ["n", "c_min", "c_mean", "c_max"] + [f"lindeberg@{e}" for e in eps] + ["ks", "verdict"],
             [[r.n, r.c_min, r.c_mean, r.c_max] + [r.lindeberg[e] for e in eps] + [r.ks, feller.verdict]
              for r in feller.rows])
    return summary, feller


RAMP = ((-0.1, 0.0), (0.1, 1.0))
T_GRID = (0.02, 0.05, 0.1, 0.2)


def run_concentrate(config, em):
    ks_rows, failures = [], 0
    for case in build_cases(config):
        res = spectral_concentration_experiment(case.spec, RAMP, T_GRID, config.trials, config.workers)
        em.table(f"concentration_n{case.n}", ["t", "empirical", "se", "bound", "satisfied"],
                 [(r.t, r.empirical, r.se, r.bound, r.satisfied) for r in res.rows])
        ks_rows.append((case.n, res.trials, res.single_vs_mean_ks))
        eta = case.eta if case.eta is not None else (config.eta or case.n ** -0.25)
        surv = truncation_survival_experiment(case.base or case.spec, eta, config.trials)
        em.table(f"survival_n{case.n}",
                 ["eta", "eps", "threshold", "empirical", "se", "bound", "simple_bound",
                  "simple_applicable", "satisfied"],
                 [(eta, r.eps, r.threshold, r.empirical, r.se, r.bound, r.simple_bound,
                   r.simple_applicable, r.satisfied) for r in surv])
        failures += sum(not r.satisfied for r in res.rows) + sum(not r.satisfied for r in surv)
    em.table("single_vs_mean", ["n", "trials", "kolmogorov"], ks_rows)
    return failures


def list_scenarios(out=None):
    out = out or sys.stdout
    for name, (kind, family, desc) in SCENARIOS.items():
        print(f"{name:20s} profile={kind:12s} law={family or '--law':17s} {desc}", file=out)


# -- argument parsing --------------------------------------------------------------

COMMANDS = ("simulate", "conditions", "moments", "walks", "gauss", "concentrate", "scenarios")


def _common(parser):
    parser.add_argument("--config", help="key=value file; flags override its values")
    parser.add_argument("--scenario", default="uniform-gauss", choices=sorted(SCENARIOS))
    parser.add_argument("--n", type=_int_list, default=None,
                        help="comma-separated ascending sizes (default 256)")
    parser.add_argument("--trials", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--k-max", type=int, default=8)
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--format", default="csv", choices=("csv", "json"))
    parser.add_argument("--profile-file", help="CSV of an n x n symmetric variance profile")
    parser.add_argument("--law", default="gaussian", choices=FAMILIES, help="entry law for custom")
    parser.add_argument("--field", default="real", choices=("real", "complex"))
    parser.add_argument("--workers", type=int, default=1, help="threads for the trial loop")
    parser.add_argument("--resamples", type=int, default=10000, help="row-sum resamples (gauss)")
    parser.add_argument("--rows", type=int, default=None, help="evenly spaced row subset (gauss)")
    parser.add_argument("--eta", type=float, default=None, help="truncation level override")
    parser.add_argument("--eps-grid", type=_float_list, default=DEFAULT_EPS_GRID)
    parser.add_argument("--delta-grid", type=_float_list, default=DEFAULT_DELTA_GRID)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="semicircle-lab",
        description="Spectral statistics of Wigner matrices with a variance profile.",
    )
    parser.add_argument("--version", action="version", version=VERSION_STRING)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "simulate": "full sweep: conditions, mean ESD, distances, moments, histograms",
        "conditions": "exact condition functionals only",
        "moments": "empirical and predicted moments",
        "walks": "canonical walk census and tree counts",
        "gauss": "row-sum Levy distances to the normal law",
        "concentrate": "concentration and truncation-survival experiments",
        "scenarios": "list the scenario catalog",
    }
    for name in COMMANDS:
        _common(sub.add_parser(name, help=helps[name]))
    return parser


def read_config_file(path):
    """Parse a flat ``key=value`` file; ``#`` starts a comment."""
    vals = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            vals[key.replace("-", "_")] = val
    return vals


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        vals = read_config_file(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions} - {"help", "config"}
        bad = sorted(set(vals) - known)
        if bad:
            raise ValueError(f"invalid config keys: {', '.join(bad)}")
        sub.set_defaults(**vals)
        args = parser.parse_args(argv)
    return args


def config_from_args(args):
    return ScenarioConfig(
        scenario=args.scenario, n=args.n, trials=args.trials, seed=args.seed,
        eps_grid=tuple(args.eps_grid), delta_grid=tuple(args.delta_grid), k_max=args.k_max,
        out=args.out, format=args.format, profile_file=args.profile_file, law=args.law,
        field=args.field, workers=args.workers, resamples=args.resamples, rows=args.rows,
        eta=args.eta,
    )


RUNNERS = {
    "conditions": run_conditions,
    "moments": run_moments,
    "walks": run_walks,
    "gauss": run_gauss,
}


def main(argv=None):
    try:
        args = parse_args(sys.argv[1:] if argv is None else argv)
        if args.command == "scenarios":
            list_scenarios()
            return 0
        config = config_from_args(args)
        em = Emitter(config.out, config.format, args.command, config.echo())
        if args.command == "simulate":
            run_scenario(config, em)
        elif args.command == "concentrate":
            failures = run_concentrate(config, em)
            if failures:
                print(f"{failures} bound check(s) exceeded their slack", file=sys.stderr)
        else:
            RUNNERS[args.command](config, em)
        for path in em.written:
            print(path)
        return 0
    except (ValueError, OSError) as exc:
        print(f"semicircle-lab: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
