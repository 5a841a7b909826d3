"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 input error, 3 infeasible
inference, 4 search stopped by the failure bound without an optimum.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import io as bio
from .benchmark import BenchmarkPlan, aggregate, load_reference, read_results, reference_names, run_benchmark, network_distance, truth_distance
from .dynamics import stable_states
from .exceptions import BoolSynthError, ContractViolation, InfeasibleInference, ParseError, SearchConfigError
from .objective import Objective
from .search import SearchConfig, eigenvector_centrality

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_FAILURE_BOUND = 0, 1, 2, 3, 4

logger = logging.getLogger("boolsynth")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_or_none(text: str):
    return None if text.lower() in ("", "none", "auto") else int(text)


def _fractions(text: str) -> list[float]:
    out = []
    for tok in text.replace(";", ",").split(","):
        tok = tok.strip()
        if tok:
            v = float(tok.rstrip("%"))
            out.append(v / 100 if tok.endswith("%") or v > 1 else v)
    return out


def _add_search_flags(p):
    p.add_argument("--moves", type=int, default=4, help="candidate variables per iteration")
    p.add_argument("--max-formulas", type=int, default=500, help="cap on each formula pool")
    p.add_argument("--failure-bound", type=int, default=100, help="consecutive non-improving iterations before halting")
    p.add_argument("--tenure", type=_int_or_none, default=None, help="tabu tenure (default: half the number of variables with a choice of formula)")
    p.add_argument("--max-iterations", type=_int_or_none, default=None)
    p.add_argument("--initial", choices=("smallest", "random"), default="smallest")
    p.add_argument("--seed", type=int, default=0)


def _search_config(args) -> SearchConfig:
    return SearchConfig(
        num_candidates=args.moves,
        failure_bound=args.failure_bound,
        max_formulas=args.max_formulas,
        tabu_tenure=args.tenure,
        rng_seed=args.seed,
        max_iterations=args.max_iterations,
        initial=args.initial,
    )


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = _Parser(prog="boolsynth", description="Boolean network synthesis from partial observations.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    subs = {}

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="key = value file mirroring the flags")
        subs[name] = p
        return p

    p = add("infer-local", "formula pools per target from profiles")
    p.add_argument("--profiles", help="CSV file, or directory of <target>.csv files")
    p.add_argument("--graph")
    p.add_argument("--max-formulas", type=int, default=500)
    p.add_argument("--target", action="append", help="restrict to these targets")
    p.add_argument("--no-influence", action="store_true", help="do not require unknown-sign regulators to matter")
    p.add_argument("--out-dir", help="write <target>.txt per target instead of stdout")
    p.add_argument("--dimacs-dir", help="also write each target's CNF in DIMACS format")

    p = add("synthesize", "search a network consistent with profiles and signatures")
    p.add_argument("--profiles", help="CSV file, or directory of <target>.csv files")
    p.add_argument("--graph")
    p.add_argument("--signatures")
    p.add_argument("--ref-stable-count", type=int)
    p.add_argument("--out", help="network file (default stdout)")
    p.add_argument("--trace", help="per-iteration trace CSV")
    _add_search_flags(p)

    p = add("stable-states", "stable states of a network")
    p.add_argument("--network")
    p.add_argument("--method", choices=("auto", "sat", "exhaustive"), default="auto")
    p.add_argument("--cap", type=int, default=1 << 16)

    p = add("score", "score vector of a network")
    p.add_argument("--network")
    p.add_argument("--signatures")
    p.add_argument("--ref-stable-count", type=int)

    p = add("distance", "truth-value distance between two networks")
    p.add_argument("--network")
    p.add_argument("--reference")
    p.add_argument("--per-variable", action="store_true")

    p = add("centrality", "eigenvector centrality ranking")
    p.add_argument("--network")
    p.add_argument("--graph")

    p = add("benchmark", "profile/signature sweep against a reference network")
    p.add_argument("--reference", help=f"network file or bundled name ({', '.join(reference_names())})")
    p.add_argument("--plan", help="plan file (profile_percents, signature_percents, trials, seed, search flags)")
    p.add_argument("--out")
    p.add_argument("--profile-percents", type=_fractions)
    p.add_argument("--signature-percents", type=_fractions)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--jobs", type=int, default=1)
    _add_search_flags(p)

    p = add("plot-data", "aggregate benchmark results per cell")
    p.add_argument("--results")
    p.add_argument("--out")
    return parser, subs


REQUIRED = {
    "infer-local": ("profiles", "graph"),
    "synthesize": ("profiles", "graph", "signatures", "ref_stable_count"),
    "stable-states": ("network",),
    "score": ("network", "signatures", "ref_stable_count"),
    "distance": ("network", "reference"),
    "benchmark": ("reference", "out"),
    "plot-data": ("results",),
}


def _apply_config(sub: argparse.ArgumentParser, argv: list[str], path: str) -> argparse.Namespace:
    """Re-parse with file values as defaults so explicit flags win."""
    values = bio.parse_config(Path(path).read_text())
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, raw in values.items():
        if key not in actions or key in ("help", "config"):
            raise UsageError(f"unknown configuration key {key!r} in {path}")
        a = actions[key]
        if isinstance(a, argparse._StoreTrueAction):
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
        elif isinstance(a, argparse._AppendAction):
            defaults[key] = [t.strip() for t in raw.split(",") if t.strip()]
        else:
            try:
                defaults[key] = a.type(raw) if a.type else raw
            except ValueError as err:
                raise UsageError(f"bad value for {key!r} in {path}: {err}") from None
            if a.choices and defaults[key] not in a.choices:
                raise UsageError(f"{key!r} must be one of {a.choices}")
    sub.set_defaults(**defaults)
    return sub.parse_args(argv)


def _profiles(path: str):
    """A profile CSV, or a directory of ``<target>.csv`` files."""
    p = Path(path)
    if p.is_dir():
        out = {f.stem: bio.parse_profiles(f.read_text()) for f in sorted(p.glob("*.csv"))}
        if not out:
            raise ContractViolation(f"no .csv profile files in {path}")
        return out
    return bio.parse_profiles(p.read_text())


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_infer_local(args) -> int:
    from . import expr as ex
    from .inference import build_constraints, b_vars, infer_formulas, profiles_to_rows
    from .sat import from_propositional

    profiles = _profiles(args.profiles)
    specs = bio.parse_graph(bio.read_text(args.graph))
    if isinstance(profiles, dict):
        missing = [s.target for s in specs if s.target not in profiles]
        if missing:
            raise ContractViolation(f"no profile file for targets {missing}")
    if args.target:
        unknown = set(args.target) - {s.target for s in specs}
        if unknown:
            raise ContractViolation(f"targets {sorted(unknown)} have no regulators in the graph")
        specs = [s for s in specs if s.target in args.target]
    status = EXIT_OK
    for spec in specs:
        data = profiles[spec.target] if isinstance(profiles, dict) else profiles
        pool = infer_formulas(data, spec, args.max_formulas, not args.no_influence)
        header = [f"pool of {spec.target}: {len(pool)} formula(s)" + (" (truncated)" if pool.truncated else "")]
        if pool.diagnostic:
            header.append(f"infeasible: {pool.diagnostic}")
            print(f"{spec.target}: {pool.diagnostic}", file=sys.stderr)
            status = EXIT_INFEASIBLE
        text = bio.serialize_pool(pool, header)
        if args.out_dir:
            Path(args.out_dir).mkdir(parents=True, exist_ok=True)
            (Path(args.out_dir) / f"{spec.target}.txt").write_text(text)
        else:
            sys.stdout.write(text)
        if args.dimacs_dir:
            Path(args.dimacs_dir).mkdir(parents=True, exist_ok=True)
            rows = profiles_to_rows(data, spec)
            cnf = from_propositional(ex.conj(*build_constraints(rows, spec, not args.no_influence).values()), b_vars(len(spec)))
            (Path(args.dimacs_dir) / f"{spec.target}.cnf").write_text(cnf.to_dimacs())
    return status


def cmd_synthesize(args) -> int:
    from .estimators import BooleanNetworkSynthesizer

    profiles = _profiles(args.profiles)
    graph = bio.parse_graph(bio.read_text(args.graph))
    signatures = bio.parse_signatures(bio.read_text(args.signatures))
    model = BooleanNetworkSynthesizer(
        graph=graph,
        max_formulas=args.max_formulas,
        n_moves=args.moves,
        failure_bound=args.failure_bound,
        tabu_tenure=args.tenure,
        max_iterations=args.max_iterations,
        initial=args.initial,
        random_state=args.seed,
    )
    model.fit(profiles, signatures=signatures, ref_stable_count=args.ref_stable_count)
    header = [f"seed: {model.seed_}", f"score: {model.score_}", f"halted: {model.halted_}", f"iterations: {model.n_iter_}"]
    _write(args.out, bio.serialize_network(model.network_, header))
    if args.trace:
        bio.write_trace(model.trace_, args.trace)
    print(f"seed={model.seed_} score={model.score_} halted={model.halted_} iterations={model.n_iter_}", file=sys.stderr)
    if model.halted_ == "failure_bound" and not all(v == 0 for v in model.score_):
        return EXIT_FAILURE_BOUND
    return EXIT_OK


def cmd_stable_states(args) -> int:
    net = bio.parse_network(bio.read_text(args.network))
    found = stable_states(net, args.cap, args.method)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(net.variables)
    w.writerows(found.states)
    if found.truncated:
        print(f"warning: truncated at {args.cap} stable states", file=sys.stderr)
    return EXIT_OK


def cmd_score(args) -> int:
    net = bio.parse_network(bio.read_text(args.network))
    sigs = bio.parse_signatures(bio.read_text(args.signatures))
    vec = Objective(sigs, args.ref_stable_count)(net)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow([f"signature_{i + 1}" for i in range(len(sigs))] + ["non_monotone", "stable_gap"])
    w.writerow(vec.values)
    return EXIT_OK


def cmd_distance(args) -> int:
    a = bio.parse_network(bio.read_text(args.network))
    b = bio.parse_network(bio.read_text(args.reference))
    if args.per_variable:
        if set(a.variables) != set(b.variables):
            raise ContractViolation("networks have different variables")
        for v in a.variables:
            print(f"{v},{truth_distance(a.functions[v], b.functions[v]):.6f}")
    print(f"{network_distance(a, b):.6f}")
    return EXIT_OK


def cmd_centrality(args) -> int:
    from .network import Arc, SignedInteractionGraph

    if args.network:
        graph = bio.parse_network(bio.read_text(args.network)).interaction_graph()
    elif args.graph:
        specs = bio.parse_graph(bio.read_text(args.graph))
        nodes = list(dict.fromkeys([n for s in specs for n in (*s.names, s.target)]))
        arcs = frozenset(Arc(src, s.target, sign or 0) for s in specs for src, sign in s.regulators)
        graph = SignedInteractionGraph(tuple(nodes), arcs)
    else:
        raise UsageError("centrality needs --network or --graph")
    ranking = eigenvector_centrality(graph)
    for v in ranking.ranked():
        print(f"{v},{ranking[v]:.6f}")
    return EXIT_OK


def _reference(arg: str):
    if Path(arg).exists():
        return bio.parse_network(bio.read_text(arg))
    if arg in reference_names():
        return load_reference(arg)
    raise ContractViolation(f"no reference network file or bundled network named {arg!r}")


def cmd_benchmark(args) -> int:
    if not args.profile_percents or not args.signature_percents:
        raise UsageError("benchmark needs profile_percents and signature_percents (flags or plan file)")
    plan = BenchmarkPlan(
        _reference(args.reference), args.profile_percents, args.signature_percents,
        args.trials, args.seed, _search_config(args), args.jobs,
    )
    records = run_benchmark(plan, args.out)
    failed = sum(r.status != "ok" for r in records)
    print(f"seed={args.seed} records={len(records)} failed={failed} -> {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_plot_data(args) -> int:
    rows = aggregate(read_results(Path(args.results)))
    fields = ["profile_pct", "signature_pct", "trials", "distance_mean", "distance_min", "distance_max", "distance_std", "iterations_mean"]
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.DictWriter(fh, fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (f"{v:.6f}" if isinstance(v, float) else v) for k, v in r.items()})
    finally:
        if args.out:
            fh.close()
    return EXIT_OK


COMMANDS = {
    "infer-local": cmd_infer_local,
    "synthesize": cmd_synthesize,
    "stable-states": cmd_stable_states,
    "score": cmd_score,
    "distance": cmd_distance,
    "centrality": cmd_centrality,
    "benchmark": cmd_benchmark,
    "plot-data": cmd_plot_data,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    name, verbose = args.command, args.verbose
    sub = subs[name]
    sub_argv = argv[argv.index(name) + 1 :]
    try:
        plan = getattr(args, "plan", None)
        for path in (plan, args.config):
            if path:
                args = _apply_config(sub, sub_argv, path)
        args.command, args.verbose = name, verbose
        missing = [k for k in REQUIRED.get(name, ()) if getattr(args, k, None) is None]
        if missing:
            raise UsageError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))
        return COMMANDS[name](args)
    except UsageError as err:
        sub.print_usage(sys.stderr)
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleInference as err:
        print(f"infeasible: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ParseError, ContractViolation, SearchConfigError, FileNotFoundError, IsADirectoryError) as err:
        print(f"input error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except BoolSynthError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
