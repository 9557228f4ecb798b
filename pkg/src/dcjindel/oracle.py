"""Brute-force oracles: shortest event sequences and exhaustive medians.

These are deliberately naive and independent of the closed-form distance and
of the branch-and-bound machinery; the test suite holds the fast paths to
their answers.  All of them only scale to toy instances.
"""

from __future__ import annotations

import itertools
from collections import deque

from .genome import Chromosome, Gene, Genome, canonical_circular, canonical_linear, genome_from_adjacencies


def _canon_state(chromosomes) -> tuple:
    """Canonical content form of a list of (circular, signed tuple)."""
    out = []
    for circular, seq in chromosomes:
        if circular:
            out.append((True, canonical_circular(tuple(seq))))
        else:
            out.append((False, canonical_linear(tuple(seq))))
    return tuple(sorted(out))


def state_of(genome: Genome) -> tuple:
    return genome.content_key()


def genome_of(state: tuple, name: str = "g") -> Genome:
    return Genome(name, [Chromosome([Gene.of(x) for x in seq], circular=circ) for circ, seq in state])


def _elements(state):
    """Adjacency pairs and telomere sites of a duplicate-free state."""
    adjacencies = []
    telomeres = []
    for circular, seq in state:
        ends = []
        for x in seq:
            fam = abs(x)
            ends.append(((fam, "h"), (fam, "t")) if x > 0 else ((fam, "t"), (fam, "h")))
        for i in range(len(ends) - 1):
            adjacencies.append((ends[i][1], ends[i + 1][0]))
        if circular:
            adjacencies.append((ends[-1][1], ends[0][0]))
        else:
            telomeres.append(ends[0][0])
            telomeres.append(ends[-1][1])
    return adjacencies, telomeres


def _decode_elements(families, adjacencies, telomeres) -> tuple:
    adj = {}
    for u, v in adjacencies:
        adj[(u[0], 0, u[1])] = (v[0], 0, v[1])
        adj[(v[0], 0, v[1])] = (u[0], 0, u[1])
    tel = {(s[0], 0, s[1]) for s in telomeres}
    genome = genome_from_adjacencies([(f, 0) for f in families], adj, tel)
    return genome.content_key()


def dcj_successors(state) -> set:
    """Every state one cut-and-rejoin operation away."""
    adjacencies, telomeres = _elements(state)
    families = sorted({abs(x) for _circ, seq in state for x in seq})
    results = set()

    def emit(new_adj, new_tel):
        results.add(_decode_elements(families, new_adj, new_tel))

    n_adj = len(adjacencies)
    for i in range(n_adj):
        p, q = adjacencies[i]
        rest = adjacencies[:i] + adjacencies[i + 1:]
        # split one adjacency into two telomeres
        emit(rest, telomeres + [p, q])
        for j in range(i + 1, n_adj):
            r, s = adjacencies[j]
            rest2 = [x for k, x in enumerate(adjacencies) if k not in (i, j)]
            emit(rest2 + [(p, r), (q, s)], telomeres)
            emit(rest2 + [(p, s), (q, r)], telomeres)
        for t in range(len(telomeres)):
            r = telomeres[t]
            tel_rest = telomeres[:t] + telomeres[t + 1:]
            emit(rest + [(p, r)], tel_rest + [q])
            emit(rest + [(q, r)], tel_rest + [p])
    for t1 in range(len(telomeres)):
        for t2 in range(t1 + 1, len(telomeres)):
            tel_rest = [x for k, x in enumerate(telomeres) if k not in (t1, t2)]
            emit(adjacencies + [(telomeres[t1], telomeres[t2])], tel_rest)
    results.discard(state)
    return results


def indel_successors(state, target_families: frozenset, max_insert: int = 6) -> set:
    """States one insertion or deletion away, aimed at the target content.

    A deletion removes one contiguous run made entirely of families the
    target does not carry.  An insertion adds one contiguous run of families
    the target carries and the state lacks, in any order, orientation and
    position (including as a new chromosome).
    """
    chroms = list(state)
    current = {abs(x) for _circ, seq in chroms for x in seq}
    results = set()

    def with_chrom(idx, replacement):
        rest = chroms[:idx] + chroms[idx + 1:]
        if replacement is not None and replacement[1]:
            rest = rest + [replacement]
        return _canon_state(rest)

    for ci, (circular, seq) in enumerate(chroms):
        length = len(seq)
        deletable = [abs(x) not in target_families for x in seq]
        if not circular:
            for i in range(length):
                if not deletable[i]:
                    continue
                for j in range(i, length):
                    if not deletable[j]:
                        break
                    results.add(with_chrom(ci, (False, seq[:i] + seq[j + 1:])))
        else:
            if all(deletable):
                results.add(with_chrom(ci, None))
            for start in range(length):
                for run in range(1, length):
                    idx = [(start + t) % length for t in range(run)]
                    if not all(deletable[k] for k in idx):
                        continue
                    kept = tuple(seq[(start + run + t) % length] for t in range(length - run))
                    results.add(with_chrom(ci, (True, kept)))

    missing = sorted(f for f in target_families if f not in current)
    if len(missing) > max_insert:
        raise ValueError("too many missing families for exhaustive insertion moves")
    segments = []
    for k in range(1, len(missing) + 1):
        for perm in itertools.permutations(missing, k):
            for signs in itertools.product((1, -1), repeat=k):
                segments.append(tuple(f * s for f, s in zip(perm, signs)))
    for seg in segments:
        results.add(_canon_state(chroms + [(False, seg)]))
        results.add(_canon_state(chroms + [(True, seg)]))
        for ci, (circular, seq) in enumerate(chroms):
            length = len(seq)
            positions = range(length) if circular else range(length + 1)
            for pos in positions:
                if circular:
                    new = seq[: pos + 1] + seg + seq[pos + 1:]
                else:
                    new = seq[:pos] + seg + seq[pos:]
                results.add(with_chrom(ci, (circular, new)))
    results.discard(state)
    return results


class IndelBfsOracle:
    """Breadth-first search over genome space under cut-and-rejoin plus
    indel moves; successor sets are memoized per (state, target content)."""

    def __init__(self, max_insert: int = 6):
        self.max_insert = max_insert
        self._cache: dict = {}

    def successors(self, state, target_families: frozenset) -> set:
        key = (state, target_families)
        hit = self._cache.get(key)
        if hit is None:
            hit = dcj_successors(state) | indel_successors(
                state, target_families, self.max_insert
            )
            self._cache[key] = hit
        return hit

    def distances_to(self, source: Genome, target_families: frozenset,
                     wanted: set, max_depth=None) -> dict:
        """Depths of every wanted state reachable from the source."""
        start = state_of(source)
        found = {}
        if start in wanted:
            found[start] = 0
        seen = {start}
        frontier = [start]
        depth = 0
        while frontier and len(found) < len(wanted):
            if max_depth is not None and depth >= max_depth:
                break
            depth += 1
            nxt = []
            for state in frontier:
                for succ in self.successors(state, target_families):
                    if succ in seen:
                        continue
                    seen.add(succ)
                    nxt.append(succ)
                    if succ in wanted:
                        found[succ] = depth
            frontier = nxt
        return found

    def distance(self, a: Genome, b: Genome, max_depth=None) -> int:
        target = state_of(b)
        found = self.distances_to(a, frozenset(b.families()), {target}, max_depth)
        if target not in found:
            raise RuntimeError("target not reached within depth limit")
        return found[target]


def bfs_indel_distance(a: Genome, b: Genome, max_depth=None) -> int:
    """Length of the shortest event sequence turning one genome into the other."""
    return IndelBfsOracle().distance(a, b, max_depth)


def _set_partitions(items, max_parts):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest, max_parts):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [first]] + part[i + 1:]
        if len(part) < max_parts:
            yield part + [[first]]


def all_duplicate_free_genomes(families=(1, 2, 3), max_chromosomes=2) -> list:
    """Every genome (up to canonical form) using a non-empty subset of the
    families at most once each, in at most the given number of chromosomes."""
    families = sorted(families)
    states = set()
    for size in range(1, len(families) + 1):
        for subset in itertools.combinations(families, size):
            for part in _set_partitions(list(subset), max_chromosomes):
                block_variants = []
                for block in part:
                    variants = set()
                    for perm in itertools.permutations(block):
                        for signs in itertools.product((1, -1), repeat=len(block)):
                            seq = tuple(f * s for f, s in zip(perm, signs))
                            variants.add((False, canonical_linear(seq)))
                            variants.add((True, canonical_circular(seq)))
                    block_variants.append(sorted(variants))
                for combo in itertools.product(*block_variants):
                    states.add(tuple(sorted(combo)))
    out = [genome_of(state, "g%d" % i) for i, state in enumerate(sorted(states))]
    return out


def _pairings(points):
    if not points:
        yield []
        return
    first, rest = points[0], points[1:]
    for tail in _pairings(rest):
        yield tail  # first stays unmatched (a telomere)
    for i in range(len(rest)):
        partner = rest[i]
        remaining = rest[:i] + rest[i + 1:]
        for tail in _pairings(remaining):
            yield [(first, partner)] + tail


def iter_genomes_with_content(content: dict, name: str = "median"):
    """All genomes whose family census equals ``content`` (canonical dedupe)."""
    gene_ids = [(f, k) for f in sorted(content) for k in range(content[f])]
    points = [(f, k, e) for f, k in gene_ids for e in ("h", "t")]
    seen = set()
    for pairs in _pairings(points):
        adjacency = {}
        for u, v in pairs:
            adjacency[u] = v
            adjacency[v] = u
        telomeres = {p for p in points if p not in adjacency}
        genome = genome_from_adjacencies(gene_ids, adjacency, telomeres, name)
        key = genome.content_key()
        if key in seen:
            continue
        seen.add(key)
        yield genome


def best_median_score(inputs, content: dict, score_fn) -> tuple:
    """Exhaustive optimum of the median-of-three objective.

    Scores every genome with the given content by the supplied pairwise
    distance and returns (best score, one best genome).
    """
    best = None
    best_genome = None
    for candidate in iter_genomes_with_content(content):
        score = sum(score_fn(candidate, g) for g in inputs)
        if best is None or score < best:
            best, best_genome = score, candidate
    return best, best_genome
