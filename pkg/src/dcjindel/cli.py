"""Command-line front end: distance, median and simulate, with replayable
run manifests.

Every command that writes files also writes a ``manifest.json`` describing
the exact arguments and inputs; ``dcjindel replay manifest.json`` re-runs
the command and reproduces the same output bytes.  File outputs carry only
deterministic columns; wall-clock timings go to the terminal.

Exit codes: 0 success, 2 usage or parse failure, 3 verification failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from . import __version__
from .bpg import dcj_indel_distance_between
from .genome import GenomeParseError, family_census, parse_genomes, serialize_genomes
from .median import LKConfig, init_median_content, solve_median
from .oracle import best_median_score
from .simulate import EvolutionConfig, evolve, make_identity, make_trio
from .solver import OracleSpaceError, SolverOptions, branch_and_bound, distance_between, oracle_distance

SEED_ENV = "DCJINDEL_SEED"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VERIFY = 3


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        digest.update(handle.read())
    return digest.hexdigest()


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def write_manifest(out_dir: str, command: str, args: dict, inputs: list, outputs: list) -> str:
    manifest = {
        "tool": "dcjindel",
        "version": __version__,
        "command": command,
        "args": args,
        "inputs": {path: _sha256(path) for path in inputs},
        "outputs": sorted(outputs),
    }
    path = os.path.join(out_dir, "manifest.json")
    _write(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _load_genomes(paths):
    genomes = []
    for path in paths:
        with open(path, "r", encoding="utf-8") as handle:
            genomes.extend(parse_genomes(handle.read()))
    return genomes


def _solver_options(args: dict) -> SolverOptions:
    return SolverOptions(
        fix_two_cycles=not args.get("no_fix2cycles", False),
        condense=not args.get("no_condense", False),
        decompose=not args.get("no_decompose", False),
    )


# ---------------------------------------------------------------------------
# distance


def run_distance(args: dict, out_dir=None, stdout=sys.stdout, stderr=sys.stderr) -> int:
    try:
        genomes = _load_genomes(args["inputs"])
    except GenomeParseError as err:
        print("parse error: %s" % err, file=stderr)
        return EXIT_USAGE
    if len(genomes) < 2:
        print("need at least two genomes", file=stderr)
        return EXIT_USAGE
    model = args["model"]
    options = _solver_options(args)
    rows = []
    for i in range(len(genomes)):
        for j in range(i + 1, len(genomes)):
            a, b = genomes[i], genomes[j]
            result = branch_and_bound(a, b, model, options)
            if args.get("oracle"):
                try:
                    want = oracle_distance(a, b, model)
                except OracleSpaceError as err:
                    print("oracle refused (%s / %s): %s" % (a.name, b.name, err), file=stderr)
                    return EXIT_USAGE
                if want != result.distance:
                    print(
                        "oracle mismatch for %s / %s: solver %d, oracle %d"
                        % (a.name, b.name, result.distance, want),
                        file=stderr,
                    )
                    return EXIT_VERIFY
            rows.append(
                (a.name, b.name, model, result.distance, result.expanded_nodes, result.elapsed_ms)
            )
    if args.get("json"):
        payload = [
            {
                "genome1": r[0],
                "genome2": r[1],
                "model": r[2],
                "distance": r[3],
                "expanded_nodes": r[4],
                "wall_ms": round(r[5], 3),
            }
            for r in rows
        ]
        print(json.dumps(payload, indent=2), file=stdout)
    else:
        print("genome1\tgenome2\tmodel\tdistance\texpanded_nodes\twall_ms", file=stdout)
        for r in rows:
            print("%s\t%s\t%s\t%d\t%d\t%.3f" % r, file=stdout)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        lines = ["genome1\tgenome2\tmodel\tdistance\texpanded_nodes"]
        lines.extend("%s\t%s\t%s\t%d\t%d" % r[:5] for r in rows)
        _write(os.path.join(out_dir, "distance.tsv"), "\n".join(lines) + "\n")
        write_manifest(out_dir, "distance", args, args["inputs"], ["distance.tsv"])
    return EXIT_OK


# ---------------------------------------------------------------------------
# median


def run_median(args: dict, out_dir=None, stdout=sys.stdout, stderr=sys.stderr) -> int:
    try:
        genomes = _load_genomes(args["inputs"])
    except GenomeParseError as err:
        print("parse error: %s" % err, file=stderr)
        return EXIT_USAGE
    if len(genomes) != 3:
        print("median needs exactly three genomes, got %d" % len(genomes), file=stderr)
        return EXIT_USAGE
    config = LKConfig(l1=args["l1"], l2=args["l2"], delta=args["delta"], mode=args["mode"])
    result = solve_median(
        *genomes,
        model=args["model"],
        config=config,
        seed=args["seed"],
        shrink=not args.get("no_shrink", False),
        caps=args.get("caps"),
    )
    if args.get("oracle"):
        content = init_median_content(*(family_census(g) for g in genomes))
        size = sum(content.values())
        if size > 5:
            print("median oracle refused: %d genes is too many to enumerate" % size, file=stderr)
            return EXIT_USAGE
        opt, _ = best_median_score(
            genomes, content, lambda x, y: distance_between(x, y, args["model"])
        )
        gap = result.score - opt
        print("oracle optimum %d, search %d, gap %d" % (opt, result.score, gap), file=stdout)
    d1, d2, d3 = result.distances
    print(
        "score %d (distances %d/%d/%d), accepted moves %d, %.1f ms"
        % (result.score, d1, d2, d3, len(result.accepted_scores) - 1, result.elapsed_ms),
        file=stdout,
    )
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        _write(os.path.join(out_dir, "median.genome"), serialize_genomes([result.genome]))
        summary = (
            "score\td1\td2\td3\taccepted_moves\n%d\t%d\t%d\t%d\t%d\n"
            % (result.score, d1, d2, d3, len(result.accepted_scores) - 1)
        )
        _write(os.path.join(out_dir, "median.tsv"), summary)
        write_manifest(
            out_dir, "median", args, args["inputs"], ["median.genome", "median.tsv"]
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate


def run_simulate(args: dict, out_dir=None, stdout=sys.stdout, stderr=sys.stderr) -> int:
    try:
        config = EvolutionConfig(
            n=args["n"],
            theta=args["theta"],
            gamma=args["gamma"],
            phi=args["phi"],
            seed=args["seed"],
            insertion_probability=args.get("insertion_prob", 0.5),
        )
    except ValueError as err:
        print("invalid configuration: %s" % err, file=stderr)
        return EXIT_USAGE
    if args.get("trio"):
        trio = make_trio(args["n"], config)
        genomes = list(trio.genomes)
        seed_genome = trio.seed_genome
        logs = list(zip((g.name for g in trio.genomes), trio.logs))
    else:
        seed_genome = make_identity(args["n"])
        evolved, events = evolve(seed_genome, config, name="evolved")
        genomes = [evolved]
        logs = [(evolved.name, events)]
    genome_text = serialize_genomes(genomes)
    log_lines = []
    for name, events in logs:
        log_lines.extend("%s\t%s" % (name, ev.line()) for ev in events)
    log_text = "\n".join(log_lines) + ("\n" if log_lines else "")
    print(genome_text, end="", file=stdout)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        _write(os.path.join(out_dir, "genomes.txt"), genome_text)
        _write(os.path.join(out_dir, "seed.genome"), serialize_genomes([seed_genome]))
        _write(os.path.join(out_dir, "events.log"), log_text)
        write_manifest(
            out_dir, "simulate", args, [], ["genomes.txt", "seed.genome", "events.log"]
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# replay


def run_replay(manifest_path: str, out_dir=None, stdout=sys.stdout, stderr=sys.stderr) -> int:
    with open(manifest_path, "r", encoding="utf-8") as handle:
        manifest = json.load(handle)
    command = manifest["command"]
    args = manifest["args"]
    for path, digest in manifest.get("inputs", {}).items():
        if not os.path.exists(path):
            print("replay input missing: %s" % path, file=stderr)
            return EXIT_USAGE
        if _sha256(path) != digest:
            print("replay input changed since the original run: %s" % path, file=stderr)
            return EXIT_USAGE
    if out_dir is None:
        out_dir = os.path.dirname(manifest_path) or "."
    runner = {"distance": run_distance, "median": run_median, "simulate": run_simulate}
    if command not in runner:
        print("manifest has unknown command %r" % command, file=stderr)
        return EXIT_USAGE
    return runner[command](args, out_dir=out_dir, stdout=stdout, stderr=stderr)


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcjindel",
        description="Rearrangement distances and medians for genomes with duplications and indels",
    )
    parser.add_argument("--version", action="version", version="dcjindel %s" % __version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("distance", help="pairwise distances between genomes")
    p.add_argument("inputs", nargs="+", metavar="FILE", help="genome files (two or more genomes)")
    p.add_argument("--model", choices=("exemplar", "matching"), default="exemplar")
    p.add_argument("--no-fix2cycles", action="store_true", help="disable 2-cycle pre-fixing")
    p.add_argument("--no-condense", action="store_true", help="disable graph condensation")
    p.add_argument("--no-decompose", action="store_true", help="disable component decomposition")
    p.add_argument("--oracle", action="store_true", help="cross-check against exhaustive enumeration")
    p.add_argument("--json", action="store_true", help="emit JSON instead of TSV")
    p.add_argument("--out-dir", help="write distance.tsv and manifest.json here")

    p = sub.add_parser("median", help="median of exactly three genomes")
    p.add_argument("inputs", nargs="+", metavar="FILE", help="genome files (three genomes total)")
    p.add_argument("--model", choices=("exemplar", "matching"), default="exemplar")
    p.add_argument("--l1", type=int, default=2, help="exhaustive search level")
    p.add_argument("--l2", type=int, default=3, help="deepening search level")
    p.add_argument("--delta", type=int, default=2, help="neighbor admission threshold")
    p.add_argument("--seed", type=int, default=None, help="search seed (default: $%s or 0)" % SEED_ENV)
    p.add_argument("--mode", choices=("lk", "kopt"), default="lk")
    p.add_argument("--no-shrink", action="store_true", help="disable adequate-subgraph shrinking")
    p.add_argument("--caps", type=int, default=None, help="cap budget for median telomeres")
    p.add_argument("--oracle", action="store_true", help="compare against the exhaustive median")
    p.add_argument("--out-dir", help="write median.genome, median.tsv and manifest.json here")

    p = sub.add_parser("simulate", help="evolve genomes from an identity seed")
    p.add_argument("--n", type=int, required=True, help="seed gene count")
    p.add_argument("--theta", type=float, default=0.0, help="inversion rate")
    p.add_argument("--gamma", type=float, default=0.0, help="indel rate")
    p.add_argument("--phi", type=float, default=0.0, help="duplication rate")
    p.add_argument("--seed", type=int, default=None, help="simulation seed (default: $%s or 0)" % SEED_ENV)
    p.add_argument("--insertion-prob", type=float, default=0.5, help="insertion share of indels")
    p.add_argument("--trio", action="store_true", help="three genomes from one seed")
    p.add_argument("--out-dir", help="write genomes.txt, events.log and manifest.json here")

    p = sub.add_parser("replay", help="re-run a recorded manifest")
    p.add_argument("manifest", help="path to manifest.json")
    p.add_argument("--out-dir", help="write outputs here instead of next to the manifest")
    return parser


def _distance_args(ns) -> dict:
    return {
        "inputs": ns.inputs,
        "model": ns.model,
        "no_fix2cycles": ns.no_fix2cycles,
        "no_condense": ns.no_condense,
        "no_decompose": ns.no_decompose,
        "oracle": ns.oracle,
        "json": ns.json,
    }


def _median_args(ns) -> dict:
    return {
        "inputs": ns.inputs,
        "model": ns.model,
        "l1": ns.l1,
        "l2": ns.l2,
        "delta": ns.delta,
        "seed": ns.seed if ns.seed is not None else _default_seed(),
        "mode": ns.mode,
        "no_shrink": ns.no_shrink,
        "caps": ns.caps,
        "oracle": ns.oracle,
    }


def _simulate_args(ns) -> dict:
    return {
        "n": ns.n,
        "theta": ns.theta,
        "gamma": ns.gamma,
        "phi": ns.phi,
        "seed": ns.seed if ns.seed is not None else _default_seed(),
        "insertion_prob": ns.insertion_prob,
        "trio": ns.trio,
    }


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        if ns.command == "distance":
            return run_distance(_distance_args(ns), out_dir=ns.out_dir)
        if ns.command == "median":
            return run_median(_median_args(ns), out_dir=ns.out_dir)
        if ns.command == "simulate":
            return run_simulate(_simulate_args(ns), out_dir=ns.out_dir)
        if ns.command == "replay":
            return run_replay(ns.manifest, out_dir=ns.out_dir)
    except OSError as err:
        print("i/o error: %s" % err, file=sys.stderr)
        return EXIT_USAGE
    raise AssertionError("unhandled command")


if __name__ == "__main__":
    sys.exit(main())
