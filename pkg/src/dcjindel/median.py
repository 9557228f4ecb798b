"""Median-of-three search over a multiple breakpoint graph.

The median's gene content follows a per-family counting rule over the three
inputs; its adjacencies are a perfect matching ("the 0-matching") on the
extremities of that content plus a budget of cap vertices for telomeres.
The three input genomes contribute one colour of edges each, laid over the
same vertex set, and guide the search in two ways: shared adjacencies
between regular vertices are fixed and contracted up front, and candidate
moves are ranked by how many colours keep the touched 0-edges in one
component (``num_pair``).

The search itself is a level-limited local search: from the current
matching, all admissible two-edge recombinations are explored up to level
L1, then only the most promising neighbor is followed up to level L2; the
first strictly improving node restarts the search from itself.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .genome import Genome, family_census, genome_from_adjacencies, label_occurrences
from .solver import SolverOptions, distance_between


def init_median_content(c1, c2, c3) -> dict:
    """Per family: the middle of the three occurrence counts.

    When two counts agree that value is the middle one, so the rule covers
    both cases of the content heuristic.  Families absent everywhere are
    dropped; a middle count of zero excludes the family.
    """
    content = {}
    for f in set(c1) | set(c2) | set(c3):
        middle = sorted((c1.get(f, 0), c2.get(f, 0), c3.get(f, 0)))[1]
        if middle > 0:
            content[f] = middle
    return content


def _ext_site(family, occ, ext):
    return ("e", family, occ, ext)


def _cap_site(k):
    return ("cap", k)


def _edge(u, v):
    return (u, v) if u <= v else (v, u)


@dataclass
class MultipleBreakpointGraph:
    """Vertex set of the median content plus one edge colour per input."""

    content: dict
    genomes: tuple
    sites: tuple  # matchable sites: gene extremities and caps
    caps: tuple
    colored_edges: tuple  # one edge list per input genome

    def gene_ids(self):
        return [(f, k) for f in sorted(self.content) for k in range(self.content[f])]


def build_mbg(g1: Genome, g2: Genome, g3: Genome, content: Optional[dict] = None,
              caps: Optional[int] = None) -> MultipleBreakpointGraph:
    """Project the three genomes' adjacencies onto the median vertex set.

    Genes absent from the median content are bridged over; surplus copies
    beyond the median count collapse onto its last copy, which is what makes
    vertices irregular.  Telomeres attach to the cap pool round-robin.  The
    cap budget defaults to the largest telomere count among the inputs.
    """
    genomes = (g1, g2, g3)
    if content is None:
        content = init_median_content(*(family_census(g) for g in genomes))
    if caps is None:
        caps = max(
            2 * sum(1 for c in g.chromosomes if not c.circular) for g in genomes
        )
    cap_sites = tuple(_cap_site(k) for k in range(caps))
    gene_sites = tuple(
        _ext_site(f, k, ext)
        for f in sorted(content)
        for k in range(content[f])
        for ext in ("h", "t")
    )

    colored = []
    for genome in genomes:
        edges = []
        next_cap = 0

        def take_cap():
            nonlocal next_cap
            if not cap_sites:
                return None
            site = cap_sites[next_cap % len(cap_sites)]
            next_cap += 1
            return site

        for chrom, row in zip(genome.chromosomes, label_occurrences(genome)):
            ends = []
            for gene, occ in row:
                f = gene.family
                have = content.get(f, 0)
                if have == 0:
                    continue
                k = min(occ, have - 1)
                if gene.strand > 0:
                    ends.append((_ext_site(f, k, "h"), _ext_site(f, k, "t")))
                else:
                    ends.append((_ext_site(f, k, "t"), _ext_site(f, k, "h")))
            if not ends:
                continue
            for i in range(len(ends) - 1):
                edges.append(_edge(ends[i][1], ends[i + 1][0]))
            if chrom.circular:
                edges.append(_edge(ends[-1][1], ends[0][0]))
            else:
                for outer in (ends[0][0], ends[-1][1]):
                    cap = take_cap()
                    if cap is not None:
                        edges.append(_edge(outer, cap))
        colored.append(tuple(edges))

    return MultipleBreakpointGraph(
        content=dict(content),
        genomes=genomes,
        sites=gene_sites + cap_sites,
        caps=cap_sites,
        colored_edges=tuple(colored),
    )


def init_zero_matching(mbg: MultipleBreakpointGraph, seed) -> frozenset:
    """Uniformly random perfect matching of the median sites; any perfect
    matching decodes to a valid genome, so no rejection is needed."""
    sites = list(mbg.sites)
    if len(sites) % 2 != 0:
        raise ValueError("odd number of matchable sites; cap budget must be even")
    rng = random.Random(seed)
    rng.shuffle(sites)
    return frozenset(_edge(sites[i], sites[i + 1]) for i in range(0, len(sites), 2))


def decode_zero_matching(mbg: MultipleBreakpointGraph, matching: frozenset,
                         name: str = "median") -> Genome:
    """Read the genome off a perfect matching; cap-cap edges are null."""
    adjacency = {}
    telomeres = set()
    for u, v in matching:
        if u[0] == "cap" and v[0] == "cap":
            continue
        if u[0] == "cap" or v[0] == "cap":
            ext = v if u[0] == "cap" else u
            telomeres.add(ext[1:])
            continue
        adjacency[u[1:]] = v[1:]
        adjacency[v[1:]] = u[1:]
    return genome_from_adjacencies(mbg.gene_ids(), adjacency, telomeres, name)


def median_score(mbg: MultipleBreakpointGraph, matching: frozenset,
                 model: str = "exemplar",
                 solver_options: Optional[SolverOptions] = None) -> int:
    """Sum of the three pairwise distances from the decoded median."""
    return sum(median_distances(mbg, matching, model, solver_options))


def median_distances(mbg: MultipleBreakpointGraph, matching: frozenset,
                     model: str = "exemplar",
                     solver_options: Optional[SolverOptions] = None) -> list:
    decoded = decode_zero_matching(mbg, matching)
    return [distance_between(decoded, g, model, solver_options) for g in mbg.genomes]


def dcj_neighbor(matching: frozenset, e1, e2) -> tuple:
    """The two recombinations of a pair of 0-matching edges.

    Both stay perfect matchings; applying the same recombination again
    restores the original matching.
    """
    if e1 == e2:
        raise ValueError("neighbor move needs two distinct edges")
    u1, v1 = e1
    u2, v2 = e2
    base = matching - {e1, e2}
    return (
        frozenset(base | {_edge(u1, u2), _edge(v1, v2)}),
        frozenset(base | {_edge(u1, v2), _edge(v1, u2)}),
    )


def _components_by_color(mbg: MultipleBreakpointGraph, matching: frozenset) -> list:
    """For each input colour: connected components of 0-edges plus that
    colour's edges, as a site -> root map."""
    out = []
    for color in range(3):
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

        for u, v in matching:
            union(u, v)
        for u, v in mbg.colored_edges[color]:
            union(u, v)
        out.append({site: find(site) for site in parent})
    return out


def num_pair(mbg: MultipleBreakpointGraph, matching: frozenset, e1, e2) -> int:
    """How many colours keep both edges in one 0+colour component."""
    comps = _components_by_color(mbg, matching)
    return _num_pair_from(comps, e1, e2)


def _num_pair_from(comps, e1, e2) -> int:
    count = 0
    for comp in comps:
        r1 = comp.get(e1[0], e1[0])
        r2 = comp.get(e2[0], e2[0])
        if r1 == r2:
            count += 1
    return count


def shrink_adequate_subgraphs(mbg: MultipleBreakpointGraph) -> tuple:
    """Fix 0-edges implied by two-colour agreement and contract them.

    A pair of non-cap vertices that are regular (exactly one edge of every
    colour) and joined directly by at least two colours keeps that adjacency
    in an optimal median; the pair is fixed, removed, and each remaining
    colour's edges are spliced through it.  Repeats to a fixed point.
    Returns the reduced graph and the fixed 0-edges.
    """
    edge_lists = [list(e) for e in mbg.colored_edges]
    sites = set(mbg.sites)
    fixed = []

    while True:
        incident = [dict() for _ in range(3)]
        for color in range(3):
            for edge in edge_lists[color]:
                for s in edge:
                    incident[color].setdefault(s, []).append(edge)

        def regular(site):
            return site[0] != "cap" and all(
                len(incident[c].get(site, ())) == 1 for c in range(3)
            )

        candidate = None
        pair_colors = {}
        for color in range(3):
            for edge in edge_lists[color]:
                pair_colors.setdefault(edge, set()).add(color)
        for edge in sorted(pair_colors):
            u, v = edge
            if len(pair_colors[edge]) < 2 or u == v:
                continue
            if regular(u) and regular(v):
                candidate = edge
                break
        if candidate is None:
            break

        u, v = candidate
        fixed.append(candidate)
        sites.discard(u)
        sites.discard(v)
        for color in range(3):
            direct = [e for e in edge_lists[color] if set(e) == {u, v}]
            if direct:
                edge_lists[color].remove(direct[0])
                continue
            eu = incident[color][u][0]
            ev = incident[color][v][0]
            x = eu[0] if eu[1] == u else eu[1]
            y = ev[0] if ev[1] == v else ev[1]
            edge_lists[color].remove(eu)
            edge_lists[color].remove(ev)
            if x != y:
                edge_lists[color].append(_edge(x, y))

    reduced = MultipleBreakpointGraph(
        content=mbg.content,
        genomes=mbg.genomes,
        sites=tuple(s for s in mbg.sites if s in sites),
        caps=tuple(c for c in mbg.caps if c in sites),
        colored_edges=tuple(tuple(e) for e in edge_lists),
    )
    return reduced, tuple(fixed)


@dataclass
class LKConfig:
    """Search levels and the admission threshold for neighbor moves."""

    l1: int = 2
    l2: int = 3
    delta: int = 2
    mode: str = "lk"  # "kopt" collapses both levels to l1

    def __post_init__(self):
        if self.mode == "kopt":
            self.l2 = self.l1
        if not (0 < self.l1 <= self.l2):
            raise ValueError("levels must satisfy 0 < L1 <= L2")


@dataclass
class LKResult:
    matching: frozenset
    score: int
    initial_score: int
    accepted_scores: list
    evaluations: int = 0
    sweeps: int = 0


def lk_search(mbg: MultipleBreakpointGraph, matching: frozenset,
              config: Optional[LKConfig] = None, model: str = "exemplar",
              score_fn: Optional[Callable] = None) -> LKResult:
    """Level-limited local search over 0-matchings.

    Levels below L1 expand every admissible edge-pair recombination
    (``num_pair > delta``); levels in [L1, L2) follow only the pair with the
    highest ``num_pair`` (ties broken by smallest pair).  Nodes are scored
    when taken from the search list and the first improvement restarts the
    search from the improved matching.
    """
    config = config or LKConfig()
    if score_fn is None:
        cache = {}

        def score_fn(m):
            if m not in cache:
                cache[m] = median_score(mbg, m, model)
            return cache[m]

    best = matching
    best_score = score_fn(matching)
    accepted = [best_score]
    evaluations = 1
    sweeps = 0
    improved = True
    while improved:
        improved = False
        sweeps += 1
        levels = [[best]] + [[] for _ in range(config.l2)]
        seen = {best}
        for level in range(config.l2 + 1):
            if improved:
                break
            for node in levels[level]:
                score = score_fn(node)
                evaluations += 1
                if score < best_score:
                    best, best_score = node, score
                    accepted.append(score)
                    improved = True
                    break
                if level >= config.l2:
                    continue
                edges = sorted(node)
                if len(edges) < 2:
                    continue
                comps = _components_by_color(mbg, node)
                if level < config.l1:
                    chosen = []
                    for i in range(len(edges)):
                        for j in range(i + 1, len(edges)):
                            if _num_pair_from(comps, edges[i], edges[j]) > config.delta:
                                chosen.append((edges[i], edges[j]))
                else:
                    top = None
                    top_np = config.delta
                    for i in range(len(edges)):
                        for j in range(i + 1, len(edges)):
                            np_ij = _num_pair_from(comps, edges[i], edges[j])
                            if np_ij > top_np:
                                top, top_np = (edges[i], edges[j]), np_ij
                    chosen = [top] if top is not None else []
                for e1, e2 in chosen:
                    for child in dcj_neighbor(node, e1, e2):
                        if child not in seen:
                            seen.add(child)
                            levels[level + 1].append(child)
    return LKResult(
        matching=best,
        score=best_score,
        initial_score=accepted[0],
        accepted_scores=accepted,
        evaluations=evaluations,
        sweeps=sweeps,
    )


@dataclass
class MedianResult:
    genome: Genome
    score: int
    distances: list
    initial_score: int
    accepted_scores: list
    matching: frozenset
    fixed_edges: tuple
    evaluations: int
    sweeps: int
    elapsed_ms: float = 0.0


def solve_median(g1: Genome, g2: Genome, g3: Genome, model: str = "exemplar",
                 config: Optional[LKConfig] = None, seed: int = 0,
                 shrink: bool = True, caps: Optional[int] = None,
                 content: Optional[dict] = None,
                 name: str = "median") -> MedianResult:
    """Full median pipeline: content rule, graph, shrinking, search, decode."""
    t0 = time.perf_counter()
    config = config or LKConfig()
    mbg = build_mbg(g1, g2, g3, content=content, caps=caps)
    fixed: tuple = ()
    search_mbg = mbg
    if shrink:
        search_mbg, fixed = shrink_adequate_subgraphs(mbg)

    cache = {}

    def score_full(m):
        full = frozenset(m) | frozenset(fixed)
        if full not in cache:
            cache[full] = median_score(mbg, full, model)
        return cache[full]

    start = init_zero_matching(search_mbg, seed)
    result = lk_search(search_mbg, start, config, model, score_fn=score_full)
    full = frozenset(result.matching) | frozenset(fixed)
    genome = decode_zero_matching(mbg, full, name)
    distances = median_distances(mbg, full, model)
    return MedianResult(
        genome=genome,
        score=sum(distances),
        distances=distances,
        initial_score=result.initial_score,
        accepted_scores=result.accepted_scores,
        matching=full,
        fixed_edges=fixed,
        evaluations=result.evaluations,
        sweeps=result.sweeps,
        elapsed_ms=(time.perf_counter() - t0) * 1000.0,
    )
