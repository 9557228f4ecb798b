"""Condensed breakpoint graphs: bridge out everything that never changes.

While resolving duplicates, only edges next to copies of duplicated families
are rewired; every other vertex keeps its one edge per genome forever.  The
condensation walks the occurrence-level graph once and replaces each maximal
run of such stable vertices by a single chain record carrying its edge count
and its two endpoints.  Endpoints are:

* ``('port', genome, family, occurrence, extremity)`` - an attachment point
  of a duplicated-family copy, the only places assignments act on;
* ``('open', genome)`` - an extremity of a single-copy family private to one
  genome (a path end that no assignment can change);
* ``('cap',)`` - a telomere cap.

Components without any port are classified once into a baseline census.
Scoring an assignment then only splices chains at ports: a deleted copy
bridges its two ports losing one edge, a kept/matched copy merges its chains
across genomes, and a surplus copy turns its ports into open path ends.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .bpg import BreakpointGraph, ComponentCensus, dcj_indel_distance, record_path
from .genome import family_census, label_occurrences


CAP_END = ("cap",)


@dataclass
class CondensedInstance:
    """Chain structure plus the bookkeeping needed to rebuild any census."""

    baseline: ComponentCensus
    chains: list  # [end0, end1, nedges] per chain; ends as described above
    port_loc: dict  # port -> (chain index, end slot)
    counts: tuple  # (Counter for genome a, Counter for genome b)
    dup_families: tuple  # families with more than one copy somewhere, sorted
    n_exemplar: int  # distinct families across both genomes
    n_matching: int  # sum over families of max(copies in a, copies in b)
    matching_weight: dict  # family -> max(copies in a, copies in b)
    # Circular chromosomes that may end up all-private depending on the
    # assignment: (genome, private single-copy genes, duplicated occupants).
    circular_watch: tuple = ()
    vertex_map: dict = field(default_factory=dict)  # site -> chain index (diagnostics)

    def is_dup(self, family: int) -> bool:
        return family in self.matching_weight and self.matching_weight[family] > 1


def condense_bpg(bpg: BreakpointGraph) -> CondensedInstance:
    """Bridge out all stable vertices of a breakpoint graph.

    Stable means: not an extremity of a duplicated family.  The result keeps
    exactly the information needed to reproduce the component census of any
    duplicate assignment of the original graph.
    """
    ca = family_census(bpg.a)
    cb = family_census(bpg.b)
    fam_a, fam_b = set(ca), set(cb)
    dup = sorted(f for f in fam_a | fam_b if max(ca.get(f, 0), cb.get(f, 0)) >= 2)
    dup_set = set(dup)

    def node_of(site, color):
        if site[0] == "cap":
            return site
        fam, occ, ext = site
        if fam in dup_set:
            return ("port", color, fam, occ, ext)
        return (fam, ext)

    edges = []
    adj: dict = {}
    for u, v, color in bpg.edges:
        nu, nv = node_of(u, color), node_of(v, color)
        eid = len(edges)
        edges.append((nu, nv))
        adj.setdefault(nu, []).append(eid)
        adj.setdefault(nv, []).append(eid)

    def end_descriptor(node):
        if node[0] == "port":
            return node
        if node[0] == "cap":
            return CAP_END
        fam, _ext = node
        return ("open", 0 if fam in fam_a else 1)

    baseline = ComponentCensus()
    chains = []
    port_loc: dict = {}
    vertex_map: dict = {}
    seen_edges = set()

    def walk(start, first_eid):
        count = 0
        node, eid = start, first_eid
        while True:
            seen_edges.add(eid)
            count += 1
            nu, nv = edges[eid]
            node = nv if node == nu else nu
            vertex_map[node] = len(chains)
            pending = [e for e in adj[node] if e not in seen_edges]
            if not pending:
                return node, count
            eid = pending[0]

    endpoints = sorted(
        (node for node, eids in adj.items() if len(eids) == 1), key=repr
    )
    for endpoint in endpoints:
        eid = adj[endpoint][0]
        if eid in seen_edges:
            continue
        vertex_map[endpoint] = len(chains)
        far, count = walk(endpoint, eid)
        d0, d1 = end_descriptor(endpoint), end_descriptor(far)
        if d0[0] != "port" and d1[0] != "port":
            record_path(baseline, _as_label(d0), _as_label(d1), count)
            continue
        idx = len(chains)
        chains.append([d0, d1, count])
        if d0[0] == "port":
            port_loc[d0] = (idx, 0)
        if d1[0] == "port":
            port_loc[d1] = (idx, 1)

    # Whatever is left lies on all-stable cycles.
    for eid in range(len(edges)):
        if eid in seen_edges:
            continue
        start = edges[eid][0]
        walk(start, eid)
        baseline.cycles += 1

    # Circular chromosomes that could become all-private.  A shared
    # single-copy gene anchors the chromosome forever; otherwise whether it
    # ends up private depends on what happens to its duplicated occupants.
    watch = []
    for gidx, genome, own, other in ((0, bpg.a, ca, cb), (1, bpg.b, cb, ca)):
        for chrom, row in zip(genome.chromosomes, label_occurrences(genome)):
            if not chrom.circular:
                continue
            anchored = False
            privates = 0
            occupants = []
            for gene, occ in row:
                f = gene.family
                if f in dup_set:
                    occupants.append((f, occ))
                elif other.get(f, 0):
                    anchored = True
                    break
                else:
                    privates += 1
            if anchored:
                continue
            if not occupants:
                baseline.exclusive_circulars += 1
            else:
                watch.append((gidx, privates, tuple(occupants)))

    n_exemplar = len(fam_a | fam_b)
    weight = {f: max(ca.get(f, 0), cb.get(f, 0)) for f in fam_a | fam_b}
    return CondensedInstance(
        baseline=baseline,
        chains=chains,
        port_loc=port_loc,
        counts=(ca, cb),
        dup_families=tuple(dup),
        n_exemplar=n_exemplar,
        n_matching=sum(weight.values()),
        matching_weight=weight,
        circular_watch=tuple(watch),
        vertex_map=vertex_map,
    )


def _as_label(descriptor):
    if descriptor == CAP_END:
        return "cap"
    return descriptor  # ('open', g)


class _ChainSplicer:
    """One evaluation pass: consume every port, then read off the census."""

    def __init__(self, inst: CondensedInstance):
        self.ends = [list(c[:2]) for c in inst.chains]
        self.edges = [c[2] for c in inst.chains]
        self.alive = [True] * len(inst.chains)
        self.port_loc = dict(inst.port_loc)
        self.census = replace(inst.baseline)

    def splice(self, p1, p2, keep_both_edges: bool) -> None:
        c1, s1 = self.port_loc.pop(p1)
        c2, s2 = self.port_loc.pop(p2)
        loss = 0 if keep_both_edges else 1
        if c1 == c2:
            total = self.edges[c1] - loss
            self.alive[c1] = False
            if total > 0:
                self.census.cycles += 1
            return
        far1 = self.ends[c1][1 - s1]
        far2 = self.ends[c2][1 - s2]
        self.ends[c1] = [far1, far2]
        self.edges[c1] = self.edges[c1] + self.edges[c2] - loss
        self.alive[c2] = False
        if far1[0] == "port":
            self.port_loc[far1] = (c1, 0)
        if far2[0] == "port":
            self.port_loc[far2] = (c1, 1)

    def open_port(self, port, genome: int) -> None:
        cid, slot = self.port_loc.pop(port)
        self.ends[cid][slot] = ("open", genome)

    def finish(self) -> ComponentCensus:
        if self.port_loc:
            raise AssertionError("unconsumed ports: %r" % sorted(self.port_loc, key=repr))
        for cid, ok in enumerate(self.alive):
            if not ok:
                continue
            d0, d1 = self.ends[cid]
            record_path(self.census, _as_label(d0), _as_label(d1), self.edges[cid])
        return self.census


def _port(genome, family, occ, ext):
    return ("port", genome, family, occ, ext)


def evaluate_census(
    inst: CondensedInstance,
    mode: str,
    assignment: dict,
    removed: frozenset = frozenset(),
) -> ComponentCensus:
    """Census of the graph after resolving all duplicated families.

    ``assignment`` maps every duplicated family not in ``removed`` to its
    choice: an (occurrence kept in a, occurrence kept in b) pair for exemplar
    resolution (None where the family is absent), or a tuple of
    (occurrence in a, occurrence in b) matched pairs for matching resolution.
    Families in ``removed`` are deleted from both genomes outright, which is
    how search lower bounds are scored.
    """
    ca, cb = inst.counts
    splicer = _ChainSplicer(inst)
    n = inst.n_exemplar if mode == "exemplar" else inst.n_matching
    for f in inst.dup_families:
        occs_a = range(ca.get(f, 0))
        occs_b = range(cb.get(f, 0))
        if f in removed:
            for g, occs in ((0, occs_a), (1, occs_b)):
                for occ in occs:
                    splicer.splice(_port(g, f, occ, "h"), _port(g, f, occ, "t"), False)
            n -= 1 if mode == "exemplar" else inst.matching_weight[f]
            continue
        if mode == "exemplar":
            keep_a, keep_b = assignment[f]
            for g, occs, keep in ((0, occs_a, keep_a), (1, occs_b, keep_b)):
                for occ in occs:
                    if occ != keep:
                        splicer.splice(_port(g, f, occ, "h"), _port(g, f, occ, "t"), False)
            if keep_a is not None and keep_b is not None:
                splicer.splice(_port(0, f, keep_a, "h"), _port(1, f, keep_b, "h"), True)
                splicer.splice(_port(0, f, keep_a, "t"), _port(1, f, keep_b, "t"), True)
            elif keep_a is not None:
                splicer.open_port(_port(0, f, keep_a, "h"), 0)
                splicer.open_port(_port(0, f, keep_a, "t"), 0)
            else:
                splicer.open_port(_port(1, f, keep_b, "h"), 1)
                splicer.open_port(_port(1, f, keep_b, "t"), 1)
        else:
            pairs = assignment[f]
            used_a = {ia for ia, _ in pairs}
            used_b = {ib for _, ib in pairs}
            for ia, ib in pairs:
                splicer.splice(_port(0, f, ia, "h"), _port(1, f, ib, "h"), True)
                splicer.splice(_port(0, f, ia, "t"), _port(1, f, ib, "t"), True)
            for occ in occs_a:
                if occ not in used_a:
                    splicer.open_port(_port(0, f, occ, "h"), 0)
                    splicer.open_port(_port(0, f, occ, "t"), 0)
            for occ in occs_b:
                if occ not in used_b:
                    splicer.open_port(_port(1, f, occ, "h"), 1)
                    splicer.open_port(_port(1, f, occ, "t"), 1)
    census = splicer.finish()
    census.n = n

    # Watched circular chromosomes: surcharge the ones whose surviving
    # occupants are all private to their genome.
    for gidx, privates, occupants in inst.circular_watch:
        shared = 0
        private = privates
        for f, occ in occupants:
            if f in removed:
                continue
            if mode == "exemplar":
                keep = assignment[f][gidx]
                if occ != keep:
                    continue
                if assignment[f][1 - gidx] is None:
                    private += 1
                else:
                    shared += 1
            else:
                matched = {pair[gidx] for pair in assignment[f]}
                if occ in matched:
                    shared += 1
                else:
                    private += 1
        if shared == 0 and private >= 1:
            census.exclusive_circulars += 1
    return census


def evaluate_distance(
    inst: CondensedInstance,
    mode: str,
    assignment: dict,
    removed: frozenset = frozenset(),
) -> int:
    return dcj_indel_distance(evaluate_census(inst, mode, assignment, removed))
