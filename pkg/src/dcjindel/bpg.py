"""Breakpoint graphs of two genomes and the rearrangement distance formulas.

Every gene occurrence contributes a head and a tail vertex; adjacent
extremities within a genome are joined by an edge of that genome's colour,
and telomeres of linear chromosomes are tied off to private cap vertices.
Components of the graph are cycles and paths; paths are classified by what
sits at their two ends:

* a cap,
* an extremity of a family private to the first genome ("a-open"), or
* an extremity of a family private to the second genome ("b-open").

The closed-form distance charges one operation per missing cycle and
settles genome-private content through the path-end bookkeeping.  Two
mixed-end paths (one a-open end, one b-open end) can be resolved together,
hence the floor of half their count; an odd leftover is absorbed by the
parity correction term ``delta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .genome import Genome, label_occurrences


# Gene sites are (family, occurrence, extremity) with extremity 'h' or 't';
# caps are ('cap', genome_index, serial).  Census walking uses the
# family-level form (family, extremity) because it only applies to
# duplicate-free genomes.


@dataclass
class ComponentCensus:
    """Cycle and path counts of one breakpoint graph (or a merge of parts).

    ``n`` is the number of distinct markers shared or private across both
    genomes after any duplicate resolution; caps never count toward it.
    """

    n: int = 0
    cycles: int = 0
    cap_even: int = 0
    cap_odd: int = 0
    open_a_odd: int = 0
    open_a_even: int = 0
    open_b_odd: int = 0
    open_b_even: int = 0
    open_aa: int = 0
    open_bb: int = 0
    open_ab: int = 0
    # Circular chromosomes made entirely of content absent from the other
    # genome.  Their paths look exactly like interior pieces of private runs
    # but the whole chromosome still takes one operation of its own, so they
    # carry a flat surcharge.  (Pinned against the event-sorting oracle.)
    exclusive_circulars: int = 0

    @property
    def open_ab_is_odd(self) -> bool:
        return self.open_ab % 2 == 1

    def component_count(self) -> int:
        return (
            self.cycles
            + self.cap_even
            + self.cap_odd
            + self.open_a_odd
            + self.open_a_even
            + self.open_b_odd
            + self.open_b_even
            + self.open_aa
            + self.open_bb
            + self.open_ab
        )

    def merged_with(self, other: "ComponentCensus") -> "ComponentCensus":
        """Sum the component counts; ``n`` is kept from self (it is a
        property of the whole instance, not of a component)."""
        return ComponentCensus(
            n=self.n,
            cycles=self.cycles + other.cycles,
            cap_even=self.cap_even + other.cap_even,
            cap_odd=self.cap_odd + other.cap_odd,
            open_a_odd=self.open_a_odd + other.open_a_odd,
            open_a_even=self.open_a_even + other.open_a_even,
            open_b_odd=self.open_b_odd + other.open_b_odd,
            open_b_even=self.open_b_even + other.open_b_even,
            open_aa=self.open_aa + other.open_aa,
            open_bb=self.open_bb + other.open_bb,
            open_ab=self.open_ab + other.open_ab,
            exclusive_circulars=self.exclusive_circulars + other.exclusive_circulars,
        )


def dcj_indel_distance(census: ComponentCensus) -> int:
    """Evaluate the closed-form distance for a duplicate-free genome pair.

    ``delta`` is 1 only when the mixed-end path count is odd and the odd/even
    imbalance of the a-open and b-open cap paths points the same way on both
    sides; this is exactly the correction that keeps the half-sum integral.
    """
    c = census
    if c.open_ab_is_odd and (
        (c.open_b_odd > c.open_b_even and c.open_a_odd > c.open_a_even)
        or (c.open_b_odd < c.open_b_even and c.open_a_odd < c.open_a_even)
    ):
        delta = 1
    else:
        delta = 0
    half = c.cap_even + min(c.open_a_odd, c.open_a_even) + min(c.open_b_odd, c.open_b_even) + delta
    if half % 2 != 0:
        raise AssertionError("distance half-term is not integral: %r" % (c,))
    d = c.n - (c.cycles + c.open_aa + c.open_bb + c.open_ab // 2) - half // 2
    d += c.exclusive_circulars
    if d < 0:
        raise AssertionError("negative distance from census %r" % (c,))
    return d


def _pair_edge_maps(a: Genome, b: Genome):
    """Per-colour site adjacency maps for a duplicate-free genome pair."""
    edges = ({}, {})
    caps = []
    for gidx, genome in ((0, a), (1, b)):
        emap = edges[gidx]

        def add(u, v):
            if u in emap or v in emap:
                raise ValueError(
                    "duplicated family in %r; resolve duplicates first" % genome.name
                )
            emap[u] = v
            emap[v] = u

        for chrom in genome.chromosomes:
            ends = []
            for gene in chrom.genes:
                if gene.strand > 0:
                    ends.append(((gene.family, "h"), (gene.family, "t")))
                else:
                    ends.append(((gene.family, "t"), (gene.family, "h")))
            for i in range(len(ends) - 1):
                add(ends[i][1], ends[i + 1][0])
            if chrom.circular:
                add(ends[-1][1], ends[0][0])
            else:
                for outer in (ends[0][0], ends[-1][1]):
                    cap = ("cap", gidx, len(caps))
                    caps.append(cap)
                    add(outer, cap)
    return edges, caps


def record_path(census: ComponentCensus, lab1, lab2, nedges: int) -> None:
    """Count one path whose ends are ``'cap'`` or ``('open', genome_index)``."""
    odd = nedges % 2 == 1
    n_caps = (lab1 == "cap") + (lab2 == "cap")
    if n_caps == 2:
        if odd:
            census.cap_odd += 1
        else:
            census.cap_even += 1
    elif n_caps == 1:
        open_side = lab2[1] if lab1 == "cap" else lab1[1]
        if open_side == 0:
            if odd:
                census.open_a_odd += 1
            else:
                census.open_a_even += 1
        else:
            if odd:
                census.open_b_odd += 1
            else:
                census.open_b_even += 1
    else:
        sides = {lab1[1], lab2[1]}
        if sides == {0}:
            census.open_aa += 1
        elif sides == {1}:
            census.open_bb += 1
        else:
            census.open_ab += 1


def _walk_census(edges, caps, fam_a: set, fam_b: set) -> ComponentCensus:
    census = ComponentCensus(n=len(fam_a | fam_b))
    visited = set()

    def is_cap(site):
        return site[0] == "cap"

    def end_label(site, color):
        # Reached over an edge of ``color`` and cannot continue: either a cap
        # or an extremity whose family lives only in genome ``color``.
        if is_cap(site):
            return "cap"
        return ("open", color)

    # Path starting points: caps, plus gene extremities that carry only one
    # colour (their family is private to one genome).
    starts = []
    for cap in caps:
        starts.append((cap, cap[1]))
    for color, other in ((0, 1), (1, 0)):
        for site in edges[color]:
            if is_cap(site):
                continue
            if site not in edges[other]:
                starts.append((site, color))

    for start, color in starts:
        if start in visited:
            continue
        start_label = "cap" if is_cap(start) else ("open", color)
        site = start
        nedges = 0
        while True:
            visited.add(site)
            nxt = edges[color][site]
            nedges += 1
            visited.add(nxt)
            if is_cap(nxt) or nxt not in edges[1 - color]:
                record_path(census, start_label, end_label(nxt, color), nedges)
                break
            site = nxt
            color = 1 - color

    # Whatever is left carries both colours everywhere: cycles.
    for site in edges[0]:
        if site in visited or is_cap(site):
            continue
        s0, color = site, 0
        cur = s0
        while True:
            visited.add(cur)
            cur = edges[color][cur]
            color = 1 - color
            if cur == s0 and color == 0:
                break
        census.cycles += 1
    return census


def count_exclusive_circulars(a: Genome, b: Genome) -> int:
    """Circular chromosomes whose whole content is private to their genome."""
    count = 0
    for own, other in ((a, b), (b, a)):
        other_families = other.families()
        for chrom in own.chromosomes:
            if chrom.circular and all(g.family not in other_families for g in chrom.genes):
                count += 1
    return count


def census_of_pair(a: Genome, b: Genome) -> ComponentCensus:
    """Component census of the breakpoint graph of two duplicate-free genomes."""
    edges, caps = _pair_edge_maps(a, b)
    census = _walk_census(edges, caps, a.families(), b.families())
    census.exclusive_circulars = count_exclusive_circulars(a, b)
    return census


def dcj_indel_distance_between(a: Genome, b: Genome) -> int:
    """Distance between two duplicate-free genomes (unequal content allowed)."""
    return dcj_indel_distance(census_of_pair(a, b))


def dcj_distance(a: Genome, b: Genome) -> int:
    """Classic rearrangement distance; requires equal content, no duplicates.

    Coincides with the indel-aware distance whenever no open vertices exist.
    """
    if a.families() != b.families():
        raise ValueError("dcj_distance requires equal gene content")
    from .genome import family_census

    ca, cb = family_census(a), family_census(b)
    if any(v != 1 for v in ca.values()) or any(v != 1 for v in cb.values()):
        raise ValueError("dcj_distance requires duplicate-free genomes")
    return dcj_indel_distance_between(a, b)


@dataclass
class BreakpointGraph:
    """Two-genome breakpoint graph at occurrence resolution.

    Edges carry the occurrence index of each endpoint so that duplicate
    resolution machinery can tell copies apart; the family-level view (all
    occurrences of a family collapsed onto one head and one tail vertex) is
    what the classic regular/irregular vocabulary refers to.
    """

    a: Genome
    b: Genome
    # (site_u, site_v, color); sites are (family, occ, 'h'|'t') or ('cap', g, k)
    edges: list = field(default_factory=list)
    caps: list = field(default_factory=list)

    def vertices(self) -> set:
        verts = set()
        for u, v, _ in self.edges:
            verts.add(u)
            verts.add(v)
        return verts

    def family_color_degrees(self) -> dict:
        """Edge count per (family, extremity) and colour, collapsing copies."""
        deg: dict = {}
        for u, v, color in self.edges:
            for site in (u, v):
                if site[0] == "cap":
                    continue
                fam, _occ, ext = site
                key = (fam, ext)
                deg.setdefault(key, [0, 0])[color] += 1
        return deg

    def irregular_family_extremities(self) -> set:
        """Family extremities with anything other than one edge per colour."""
        return {key for key, d in self.family_color_degrees().items() if d != [1, 1]}

    def dump(self) -> str:
        """Stable text edge list for golden-file comparisons."""
        names = (self.a.name, self.b.name)

        def label(site):
            if site[0] == "cap":
                return "cap:%s.%d" % (names[site[1]], site[2])
            fam, occ, ext = site
            return "%d.%d%s" % (fam, occ, ext)

        lines = []
        for u, v, color in self.edges:
            lu, lv = sorted((label(u), label(v)))
            lines.append("%s -- %s [%s]" % (lu, lv, names[color]))
        return "\n".join(sorted(lines)) + "\n"


def build_bpg(a: Genome, b: Genome) -> BreakpointGraph:
    """Adjacency edges of both genomes over head/tail extremity vertices.

    Works for genomes with duplications and private genes; telomeres of
    linear chromosomes connect to fresh cap vertices, circular chromosomes
    close on themselves.
    """
    graph = BreakpointGraph(a, b)
    for gidx, genome in ((0, a), (1, b)):
        rows = label_occurrences(genome)
        for chrom, row in zip(genome.chromosomes, rows):
            ends = []
            for gene, occ in row:
                if gene.strand > 0:
                    ends.append(((gene.family, occ, "h"), (gene.family, occ, "t")))
                else:
                    ends.append(((gene.family, occ, "t"), (gene.family, occ, "h")))
            for i in range(len(ends) - 1):
                graph.edges.append((ends[i][1], ends[i + 1][0], gidx))
            if chrom.circular:
                graph.edges.append((ends[-1][1], ends[0][0], gidx))
            else:
                for outer in (ends[0][0], ends[-1][1]):
                    cap = ("cap", gidx, len(graph.caps))
                    graph.caps.append(cap)
                    graph.edges.append((outer, cap, gidx))
    return graph


def classify_components(bpg: BreakpointGraph, a: Genome, b: Genome) -> ComponentCensus:
    """Census of a breakpoint graph built from duplicate-free genomes."""
    edges = ({}, {})
    for u, v, color in bpg.edges:

        def family_site(site):
            if site[0] == "cap":
                return site
            fam, occ, ext = site
            if occ != 0:
                raise ValueError("duplicated family in breakpoint graph")
            return (fam, ext)

        fu, fv = family_site(u), family_site(v)
        emap = edges[color]
        if fu in emap or fv in emap:
            raise ValueError("duplicated family in breakpoint graph")
        emap[fu] = fv
        emap[fv] = fu
    census = _walk_census(edges, bpg.caps, a.families(), b.families())
    census.exclusive_circulars = count_exclusive_circulars(a, b)
    return census
