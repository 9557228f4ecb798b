"""Exact duplicate-aware rearrangement distances by branch and bound.

Two ways to resolve duplicated families before the closed-form distance
applies:

* exemplar resolution keeps exactly one copy of each family per genome and
  deletes the rest;
* matching resolution pairs up copies across the genomes one-to-one (as many
  pairs as the smaller copy number), relabels each pair to a fresh shared
  marker, and leaves surplus copies as genome-private markers.

The search branches over the per-family choices.  A node's upper bound is
the distance of the assignment completed deterministically; its lower bound
is the distance after deleting all still-unresolved duplicated families from
both genomes, which never overestimates because deleting content never
increases the distance.  Nodes live in an array of buckets indexed by lower
bound and are expanded lowest-bound first.
"""

from __future__ import annotations

import itertools
import random
import time
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .bpg import (
    BreakpointGraph,
    ComponentCensus,
    _walk_census,
    build_bpg,
    census_of_pair,
    dcj_indel_distance,
    dcj_indel_distance_between,
)
from .condense import condense_bpg, evaluate_distance
from .genome import Chromosome, Gene, Genome, family_census, label_occurrences

MODELS = ("exemplar", "matching")


@dataclass
class SolverOptions:
    """Feature toggles and instrumentation for the branch-and-bound search."""

    fix_two_cycles: bool = True
    condense: bool = True
    decompose: bool = True
    branch_order: Optional[Sequence[int]] = None
    record_nodes: bool = False
    completion_seed: Optional[int] = None  # randomized initial completion


@dataclass
class DistanceResult:
    distance: int
    model: str
    assignment: dict
    genomes: tuple  # resolved / relabeled pair realizing the distance
    expanded_nodes: int = 0
    elapsed_ms: float = 0.0
    clusters: int = 0
    # (lb, ub, optimum of the sub-search that expanded the node)
    node_log: list = field(default_factory=list)


class OracleSpaceError(ValueError):
    def __init__(self, size):
        super().__init__("assignment space too large for exhaustive check: %d" % size)
        self.size = size


def _dup_families(ca, cb):
    return sorted(f for f in set(ca) | set(cb) if max(ca.get(f, 0), cb.get(f, 0)) >= 2)


# ---------------------------------------------------------------------------
# assignment application (direct, sequence-level)


def resolve_pair(a: Genome, b: Genome, mode: str, assignment: dict,
                 removed: frozenset = frozenset()) -> tuple[Genome, Genome]:
    """Materialize the genome pair an assignment describes.

    Exemplar choices drop the non-kept copies; matching choices relabel each
    matched pair to a fresh shared marker and every surplus copy to a fresh
    private marker.  Families in ``removed`` are dropped from both genomes.
    """
    ca, cb = family_census(a), family_census(b)
    dup = set(_dup_families(ca, cb))
    all_families = set(ca) | set(cb)
    next_id = max(all_families, default=0) + 1
    marker = ({}, {})  # (family, occ) -> marker per genome, matching mode only
    if mode == "matching":
        for f in sorted(dup):
            if f in removed:
                continue
            pairs = assignment[f]
            for ia, ib in pairs:
                marker[0][(f, ia)] = next_id
                marker[1][(f, ib)] = next_id
                next_id += 1
            for occ in range(ca.get(f, 0)):
                if (f, occ) not in marker[0]:
                    marker[0][(f, occ)] = next_id
                    next_id += 1
            for occ in range(cb.get(f, 0)):
                if (f, occ) not in marker[1]:
                    marker[1][(f, occ)] = next_id
                    next_id += 1

    out = []
    for gidx, genome in ((0, a), (1, b)):
        chroms = []
        for chrom, row in zip(genome.chromosomes, label_occurrences(genome)):
            genes = []
            for gene, occ in row:
                f = gene.family
                if f in removed:
                    continue
                if f not in dup:
                    genes.append(gene)
                elif mode == "exemplar":
                    if occ == assignment[f][gidx]:
                        genes.append(gene)
                else:
                    genes.append(Gene(marker[gidx][(f, occ)], gene.strand))
            if genes:
                chroms.append(Chromosome(genes, circular=chrom.circular))
        out.append(Genome(genome.name + "'", chroms))
    return out[0], out[1]


def _direct_evaluate(a, b, mode, assignment, removed=frozenset()):
    ra, rb = resolve_pair(a, b, mode, assignment, removed)
    return dcj_indel_distance_between(ra, rb)


# ---------------------------------------------------------------------------
# per-family choice enumeration


def _exemplar_choices(ca_f: int, cb_f: int):
    has_a = list(range(ca_f)) if ca_f else [None]
    has_b = list(range(cb_f)) if cb_f else [None]
    return itertools.product(has_a, has_b)


def _matching_choices(ca_f: int, cb_f: int, prefixed=()):
    """All full one-to-one pairings extending the pre-fixed pairs, in
    lexicographic occurrence order."""
    need = set(prefixed)
    if ca_f <= cb_f:
        for perm in itertools.permutations(range(cb_f), ca_f):
            pairs = tuple((ia, perm[ia]) for ia in range(ca_f))
            if need <= set(pairs):
                yield pairs
    else:
        for perm in itertools.permutations(range(ca_f), cb_f):
            pairs = tuple(sorted((perm[ib], ib) for ib in range(cb_f)))
            if need <= set(pairs):
                yield pairs


def _choice_count(mode, ca_f, cb_f):
    if mode == "exemplar":
        return max(ca_f, 1) * max(cb_f, 1)
    lo, hi = min(ca_f, cb_f), max(ca_f, cb_f)
    count = 1
    for i in range(lo):
        count *= hi - i
    return count


# ---------------------------------------------------------------------------
# optimization 1: fixing shared-adjacency 2-cycles


def _safely_fixable_extremities(bpg: BreakpointGraph) -> set:
    """Family extremities in components that are balanced and cap-free.

    Such a component never produces open path ends or telomere paths under
    any assignment, so its score is a pure cycle count and committing to a
    length-2 cycle is the classical safe move.  Components carrying private
    content, copy-number imbalance or telomeres couple into the indel and
    parity bookkeeping, where pinning a 2-cycle can cost optimality
    (observed on exhaustively checked instances), so they are left alone.
    """
    ca, cb = family_census(bpg.a), family_census(bpg.b)
    parent = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    def node_of(site):
        if site[0] == "cap":
            return site
        return (site[0], site[2])

    for u, v, _color in bpg.edges:
        union(node_of(u), node_of(v))
    for f in set(ca) | set(cb):
        union((f, "h"), (f, "t"))

    families_of = defaultdict(set)
    capped = set()
    for site in list(parent):
        if site[0] == "cap":
            capped.add(find(site))
        else:
            families_of[find(site)].add(site[0])
    good = set()
    for root, fams in families_of.items():
        if find(root) in capped:
            continue
        if all(ca.get(f, 0) == cb.get(f, 0) for f in fams):
            for f in fams:
                good.add((f, "h"))
                good.add((f, "t"))
    return good


def fix_short_cycles(bpg: BreakpointGraph) -> list:
    """Adjacencies present in both genomes between the same extremity pair.

    Each hit is a length-2 cycle of the graph.  Within balanced cap-free
    components (see `_safely_fixable_extremities`) pinning the involved
    copies to stay together cannot lose the optimum, so the solver commits
    to them before searching.  Returns
    ``((famext_u, famext_v), (occ_a_u, occ_a_v), (occ_b_u, occ_b_v))``
    records, where famext is (family, extremity).
    """
    safe = _safely_fixable_extremities(bpg)
    tables = (defaultdict(list), defaultdict(list))
    for u, v, color in bpg.edges:
        if u[0] == "cap" or v[0] == "cap":
            continue
        iu = ((u[0], u[2]), u[1])
        iv = ((v[0], v[2]), v[1])
        lo, hi = sorted((iu, iv))
        tables[color][(lo[0], hi[0])].append((lo[1], hi[1]))
    fixes = []
    for key in sorted(set(tables[0]) & set(tables[1])):
        if key[0] not in safe or key[1] not in safe:
            continue
        for occ_a, occ_b in zip(tables[0][key], tables[1][key]):
            fixes.append((key, occ_a, occ_b))
    return fixes


def _apply_two_cycle_fixes(fixes, mode, dup_set, ca, cb):
    """Greedy, conflict-free application of 2-cycle fixes.

    Exemplar: pins the whole per-family choice.  Matching: pins individual
    pairs. Conflicting fixes are skipped; skipping is always safe.
    """
    if mode == "exemplar":
        fixed = {}
        for (fe_u, fe_v), (au, av), (bu, bv) in fixes:
            fu, fv = fe_u[0], fe_v[0]
            if fu == fv and (au != av or bu != bv):
                continue  # joins two different copies; one copy cannot do both
            proposals = []
            for f, oa, ob in ((fu, au, bu), (fv, av, bv)):
                if f in dup_set and (f, oa, ob) not in proposals:
                    proposals.append((f, oa, ob))
            if not proposals:
                continue
            if any(fixed.get(f, (oa, ob)) != (oa, ob) for f, oa, ob in proposals):
                continue
            for f, oa, ob in proposals:
                fixed[f] = (oa, ob)
        return fixed
    fixed_pairs = defaultdict(list)
    for (fe_u, fe_v), (au, av), (bu, bv) in fixes:
        fu, fv = fe_u[0], fe_v[0]
        if fu == fv and (au != av or bu != bv):
            # Adjacency between two copies of one family: the two pairings
            # that preserve it are indistinguishable here, so committing to
            # one can lose the optimum.  Only the self-adjacency of a
            # single-copy circular chromosome is unambiguous.
            continue
        proposals = []
        for f, oa, ob in ((fu, au, bu), (fv, av, bv)):
            if f in dup_set and min(ca.get(f, 0), cb.get(f, 0)) >= 1:
                if (f, oa, ob) not in proposals:
                    proposals.append((f, oa, ob))
        ok = True
        staged = defaultdict(list)
        for f, oa, ob in proposals:
            current = fixed_pairs[f] + staged[f]
            if any(oa == pa or ob == pb for pa, pb in current):
                if (oa, ob) in current:
                    continue
                ok = False
                break
            if len(current) + 1 > min(ca.get(f, 0), cb.get(f, 0)):
                ok = False
                break
            staged[f].append((oa, ob))
        if ok:
            for f, new in staged.items():
                fixed_pairs[f].extend(new)
    return {f: tuple(sorted(p)) for f, p in fixed_pairs.items()}


# ---------------------------------------------------------------------------
# optimization 3: independent connected components


@dataclass
class SubInstance:
    """One connected component of the graph, as a separate search problem.

    ``balanced`` marks components where every family occurs equally often
    in both genomes: those never contribute open path ends, so their copy
    choices are fully independent of the rest of the graph.  Imbalanced
    components feed the global parity and pairing terms and must be solved
    jointly with each other.
    """

    sites: frozenset
    dup_families: tuple
    census: Optional[ComponentCensus]  # set when no duplicated family touches it
    balanced: bool = True


def decompose_components(bpg: BreakpointGraph) -> list[SubInstance]:
    """Connected components; copy choices in balanced components are
    independent, so each becomes its own (smaller) search.

    Head and tail of a duplicated family are tied together because one
    per-family choice drives both.  Components free of duplicated families
    get their census computed once and for all.
    """
    ca, cb = family_census(bpg.a), family_census(bpg.b)
    dup_set = set(_dup_families(ca, cb))

    def node_of(site):
        if site[0] == "cap":
            return site
        fam, _occ, ext = site
        return (fam, "x") if fam in dup_set else (fam, ext)

    parent = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    for u, v, _color in bpg.edges:
        union(node_of(u), node_of(v))

    groups = defaultdict(lambda: ([], set()))
    for u, v, color in bpg.edges:
        root = find(node_of(u))
        edges, fams = groups[root]
        edges.append((u, v, color))
        for site in (u, v):
            if site[0] != "cap" and site[0] in dup_set:
                fams.add(site[0])

    fam_a, fam_b = set(ca), set(cb)
    out = []
    for root in sorted(groups, key=repr):
        comp_edges, fams = groups[root]
        sites = frozenset(s for u, v, _ in comp_edges for s in (u, v))
        all_families = {s[0] for s in sites if s[0] != "cap"}
        balanced = all(ca.get(f, 0) == cb.get(f, 0) for f in all_families)
        if fams:
            out.append(SubInstance(sites, tuple(sorted(fams)), None, balanced))
            continue
        emap = ({}, {})
        caps = []
        for u, v, color in comp_edges:
            ku = u if u[0] == "cap" else (u[0], u[2])
            kv = v if v[0] == "cap" else (v[0], v[2])
            emap[color][ku] = kv
            emap[color][kv] = ku
            for s in (u, v):
                if s[0] == "cap":
                    caps.append(s)
        census = _walk_census(emap, caps, fam_a, fam_b)
        census.n = 0  # alphabet size is a property of the whole instance
        out.append(SubInstance(sites, (), census, balanced))
    return out


# ---------------------------------------------------------------------------
# bucket queue and the search itself


class BucketQueue:
    """Array of node lists indexed by lower bound; pops lowest first."""

    def __init__(self, lo: int, hi: int):
        self.lo = lo
        self.buckets = [[] for _ in range(hi - lo + 1)]
        self.cursor = 0

    def push(self, lb: int, item) -> None:
        self.buckets[lb - self.lo].append(item)

    def pop(self):
        while self.cursor < len(self.buckets):
            bucket = self.buckets[self.cursor]
            if bucket:
                return self.cursor + self.lo, bucket.pop()
            self.cursor += 1
        return None


def _solve_cluster(fams, base, choice_iter_of, evaluate, options, node_log):
    """Branch and bound over the families of one component.

    Families outside the cluster stay at their deterministic completion.
    Returns (best value, best choices for the cluster, expanded node count).
    """

    def merged(partial):
        m = dict(base)
        for f, c in zip(fams, partial):
            m[f] = c
        return m

    def lb_of(partial):
        return evaluate(merged(partial), frozenset(fams[len(partial):]))

    def ub_of(partial):
        return evaluate(merged(partial), frozenset())

    def cluster_best(partial):
        m = merged(partial)
        return {f: m[f] for f in fams}

    records = []

    def flush_log(optimum):
        if options.record_nodes:
            node_log.extend((lb, ub, optimum) for lb, ub in records)

    root_lb = lb_of(())
    root_ub = ub_of(())
    min_ub = root_ub
    best = cluster_best(())
    if root_ub <= root_lb:
        flush_log(min_ub)
        return min_ub, best, 0

    queue = BucketQueue(root_lb, root_ub)
    queue.push(root_lb, ((), root_lb, root_ub))
    expanded = 0
    while True:
        popped = queue.pop()
        if popped is None:
            break
        cur_lb, (partial, lb, ub) = popped
        if cur_lb >= min_ub:
            break
        expanded += 1
        if options.record_nodes:
            records.append((lb, ub))
        f = fams[len(partial)]
        last = len(partial) + 1 == len(fams)
        done = False
        for choice in choice_iter_of(f):
            child = partial + (choice,)
            if last:
                val = ub_of(child)
                if val < min_ub:
                    min_ub, best = val, cluster_best(child)
                if min_ub <= cur_lb:
                    done = True
                    break
                continue
            clb = lb_of(child)
            if clb >= min_ub:
                continue
            cub = ub_of(child)
            if cub < min_ub:
                min_ub, best = cub, cluster_best(child)
            if cub <= cur_lb:
                done = True
                break
            queue.push(clb, (child, clb, cub))
        if done:
            break
    flush_log(min_ub)
    return min_ub, best, expanded


def branch_and_bound(a: Genome, b: Genome, model: str,
                     options: Optional[SolverOptions] = None) -> DistanceResult:
    """Exact minimum distance over all duplicate resolutions of one model."""
    if model not in MODELS:
        raise ValueError("model must be one of %r" % (MODELS,))
    options = options or SolverOptions()
    t0 = time.perf_counter()

    ca, cb = family_census(a), family_census(b)
    dup = _dup_families(ca, cb)
    dup_set = set(dup)
    bpg = build_bpg(a, b)
    inst = condense_bpg(bpg)

    if options.condense:
        def evaluate(assignment, removed):
            return evaluate_distance(inst, model, assignment, removed)
    else:
        def evaluate(assignment, removed):
            return _direct_evaluate(a, b, model, assignment, removed)

    prefixed = {}
    if options.fix_two_cycles and dup:
        fixes = fix_short_cycles(bpg)
        prefixed = _apply_two_cycle_fixes(fixes, model, dup_set, ca, cb)

    rng = random.Random(options.completion_seed) if options.completion_seed is not None else None

    def det_choice(f):
        na, nb = ca.get(f, 0), cb.get(f, 0)
        if model == "exemplar":
            if f in prefixed:
                return prefixed[f]
            if rng is not None:
                return (rng.randrange(na) if na else None,
                        rng.randrange(nb) if nb else None)
            return (0 if na else None, 0 if nb else None)
        pairs = list(prefixed.get(f, ()))
        free_a = [i for i in range(na) if i not in {p[0] for p in pairs}]
        free_b = [i for i in range(nb) if i not in {p[1] for p in pairs}]
        if rng is not None:
            rng.shuffle(free_b)
        pairs.extend(zip(free_a, free_b))
        return tuple(sorted(pairs))

    base = {f: det_choice(f) for f in dup}

    def branches(f):
        na, nb = ca.get(f, 0), cb.get(f, 0)
        if model == "exemplar":
            return 0 if f in prefixed else max(na, 1) * max(nb, 1)
        lo = min(na, nb)
        if lo == 0 or len(prefixed.get(f, ())) == lo:
            return 0
        return _choice_count(model, na, nb)

    branch_fams = [f for f in dup if branches(f) > 1]

    def choice_iter_of(f):
        na, nb = ca.get(f, 0), cb.get(f, 0)
        if model == "exemplar":
            return _exemplar_choices(na, nb)
        return _matching_choices(na, nb, prefixed.get(f, ()))

    def order_key(f):
        return (-(max(ca.get(f, 0), 1) * max(cb.get(f, 0), 1)), f)

    if options.branch_order is not None:
        listed = [f for f in options.branch_order if f in branch_fams]
        branch_fams = listed + sorted(set(branch_fams) - set(listed), key=order_key)
    else:
        branch_fams = sorted(branch_fams, key=order_key)

    node_log: list = []
    expanded = 0
    final = dict(base)
    if branch_fams:
        if options.decompose:
            # Balanced components are independent; everything imbalanced is
            # coupled through the open-path parity terms and stays one search.
            comp_map = {}
            for sub in decompose_components(bpg):
                for f in sub.dup_families:
                    comp_map[f] = sub
            clusters_by_id: dict = {}
            coupled: list = []
            for f in branch_fams:
                sub = comp_map[f]
                if sub.balanced:
                    clusters_by_id.setdefault(id(sub), []).append(f)
                else:
                    coupled.append(f)
            clusters = sorted(clusters_by_id.values(), key=lambda c: c[0])
            if coupled:
                clusters.append(coupled)
        else:
            clusters = [branch_fams]
        for cluster in clusters:
            _value, best, n = _solve_cluster(
                cluster, base, choice_iter_of, evaluate, options, node_log
            )
            expanded += n
            final.update(best)
    else:
        clusters = []

    distance = evaluate(final, frozenset())
    genomes = resolve_pair(a, b, model, final)
    return DistanceResult(
        distance=distance,
        model=model,
        assignment=final,
        genomes=genomes,
        expanded_nodes=expanded,
        elapsed_ms=(time.perf_counter() - t0) * 1000.0,
        clusters=len(clusters),
        node_log=node_log,
    )


def exemplar_distance(a: Genome, b: Genome,
                      options: Optional[SolverOptions] = None) -> DistanceResult:
    """Minimum distance over all keep-one-copy reductions of both genomes."""
    return branch_and_bound(a, b, "exemplar", options)


def matching_distance(a: Genome, b: Genome,
                      options: Optional[SolverOptions] = None) -> DistanceResult:
    """Minimum distance over all one-to-one pairings of duplicate copies."""
    return branch_and_bound(a, b, "matching", options)


def distance_between(a: Genome, b: Genome, model: str = "exemplar",
                     options: Optional[SolverOptions] = None) -> int:
    """Distance value only; skips the search when there is nothing to resolve."""
    ca, cb = family_census(a), family_census(b)
    if not _dup_families(ca, cb):
        return dcj_indel_distance_between(a, b)
    return branch_and_bound(a, b, model, options).distance


def oracle_distance(a: Genome, b: Genome, model: str, limit: int = 10 ** 6) -> int:
    """Exhaustive minimum over the whole assignment space.

    Independent of the search and of the condensed evaluator: every
    assignment is materialized at sequence level and scored from scratch.
    Refuses when the space exceeds ``limit``.
    """
    if model not in MODELS:
        raise ValueError("model must be one of %r" % (MODELS,))
    ca, cb = family_census(a), family_census(b)
    dup = _dup_families(ca, cb)
    space = 1
    for f in dup:
        space *= _choice_count(model, ca.get(f, 0), cb.get(f, 0))
        if space > limit:
            raise OracleSpaceError(space)
    if not dup:
        return dcj_indel_distance_between(a, b)
    choice_lists = []
    for f in dup:
        if model == "exemplar":
            choice_lists.append(list(_exemplar_choices(ca.get(f, 0), cb.get(f, 0))))
        else:
            choice_lists.append(list(_matching_choices(ca.get(f, 0), cb.get(f, 0))))
    best = None
    for combo in itertools.product(*choice_lists):
        assignment = dict(zip(dup, combo))
        d = _direct_evaluate(a, b, model, assignment)
        if best is None or d < best:
            best = d
    return best
