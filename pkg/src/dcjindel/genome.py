"""Signed gene-order genomes: markers, chromosomes, parsing and serialization.

A genome is a list of chromosomes; a chromosome is an ordered run of signed
gene-family markers and is either linear or circular.  Families are positive
integers; the sign carries the reading orientation.  Two genomes may share
only part of their family alphabet, and a family may occur several times
within one genome.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Iterator, NamedTuple


class Gene(NamedTuple):
    """One oriented gene-family marker."""

    family: int
    strand: int  # +1 forward, -1 reverse

    @classmethod
    def of(cls, value: int) -> "Gene":
        value = int(value)
        if value == 0:
            raise ValueError("gene marker 0 is not allowed")
        return cls(abs(value), 1 if value > 0 else -1)

    @property
    def signed(self) -> int:
        return self.family * self.strand

    def flipped(self) -> "Gene":
        return Gene(self.family, -self.strand)


def _reverse_flip(seq: tuple[int, ...]) -> tuple[int, ...]:
    """Read a signed sequence from the other end."""
    return tuple(-g for g in reversed(seq))


def canonical_linear(seq: tuple[int, ...]) -> tuple[int, ...]:
    """Normal form of a linear gene run: a chromosome and its reverse
    complement are the same molecule."""
    rev = _reverse_flip(seq)
    return seq if seq <= rev else rev


def canonical_circular(seq: tuple[int, ...]) -> tuple[int, ...]:
    """Normal form of a circular run: invariant under rotation and under
    reading the circle backwards with flipped signs."""
    best = None
    for variant in (seq, _reverse_flip(seq)):
        for i in range(len(variant)):
            rot = variant[i:] + variant[:i]
            if best is None or rot < best:
                best = rot
    return best


class Chromosome:
    """An ordered, non-empty run of genes, linear or circular.

    Equality and hashing use the canonical form, so a circular chromosome
    compares equal to any rotation or reflected traversal of itself.
    """

    __slots__ = ("genes", "circular")

    def __init__(self, genes: Iterable[Gene | int], circular: bool = False):
        parsed = tuple(g if isinstance(g, Gene) else Gene.of(g) for g in genes)
        if not parsed:
            raise ValueError("a chromosome must contain at least one gene")
        self.genes = parsed
        self.circular = bool(circular)

    def signed(self) -> tuple[int, ...]:
        return tuple(g.signed for g in self.genes)

    def canonical(self) -> tuple:
        seq = self.signed()
        if self.circular:
            return (True, canonical_circular(seq))
        return (False, canonical_linear(seq))

    def __len__(self) -> int:
        return len(self.genes)

    def __iter__(self) -> Iterator[Gene]:
        return iter(self.genes)

    def __eq__(self, other) -> bool:
        return isinstance(other, Chromosome) and self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash(self.canonical())

    def __repr__(self) -> str:
        shape = "circular" if self.circular else "linear"
        return "Chromosome(%s, %s)" % (list(self.signed()), shape)


class Genome:
    """A named collection of chromosomes over signed gene-family markers."""

    __slots__ = ("name", "chromosomes")

    def __init__(self, name: str, chromosomes: Iterable[Chromosome] = ()):
        self.name = str(name)
        self.chromosomes = tuple(chromosomes)

    def genes(self) -> Iterator[Gene]:
        for chrom in self.chromosomes:
            yield from chrom.genes

    def families(self) -> set[int]:
        return {g.family for g in self.genes()}

    def gene_count(self) -> int:
        return sum(len(c) for c in self.chromosomes)

    def content_key(self) -> tuple:
        """Order-independent canonical form; ignores the name."""
        return tuple(sorted(c.canonical() for c in self.chromosomes))

    def same_content(self, other: "Genome") -> bool:
        return self.content_key() == other.content_key()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Genome)
            and self.name == other.name
            and self.content_key() == other.content_key()
        )

    def __hash__(self) -> int:
        return hash((self.name, self.content_key()))

    def __repr__(self) -> str:
        return "Genome(%r, %d chromosomes)" % (self.name, len(self.chromosomes))


def family_census(genome: Genome) -> Counter:
    """Occurrence count of every family in the genome, ignoring signs."""
    return Counter(g.family for g in genome.genes())


def label_occurrences(genome: Genome) -> list[list[tuple[Gene, int]]]:
    """Attach a per-family occurrence index (reading order) to every gene.

    Returns one list per chromosome of (gene, occurrence_index) pairs. The
    indices make individual copies of a duplicated family addressable; they
    are internal bookkeeping and never serialized.
    """
    seen: Counter = Counter()
    out = []
    for chrom in genome.chromosomes:
        row = []
        for gene in chrom.genes:
            row.append((gene, seen[gene.family]))
            seen[gene.family] += 1
        out.append(row)
    return out


class GenomeParseError(ValueError):
    """Malformed genome file; carries the 1-based offending line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__("line %d: %s" % (line_no, message))
        self.line_no = line_no


LINEAR_MARK = "$"
CIRCULAR_MARK = "@"


def parse_genomes(text: str) -> list[Genome]:
    """Parse the genome file format.

    One record per genome: a header line ``>NAME`` followed by one
    chromosome per line, a whitespace-separated list of signed non-zero
    integers terminated by ``$`` (linear) or ``@`` (circular).  Blank lines
    are ignored.
    """
    genomes: list[Genome] = []
    current_name = None
    current_chroms: list[Chromosome] = []

    def flush():
        nonlocal current_name, current_chroms
        if current_name is not None:
            genomes.append(Genome(current_name, current_chroms))
        current_name = None
        current_chroms = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(">"):
            flush()
            name = line[1:].strip()
            if not name:
                raise GenomeParseError(line_no, "header has no genome name")
            current_name = name
            continue
        if current_name is None:
            raise GenomeParseError(line_no, "chromosome line before any genome header")
        tokens = line.split()
        mark = tokens[-1]
        if mark not in (LINEAR_MARK, CIRCULAR_MARK):
            raise GenomeParseError(
                line_no,
                "chromosome line must end with %r or %r" % (LINEAR_MARK, CIRCULAR_MARK),
            )
        body = tokens[:-1]
        if not body:
            raise GenomeParseError(line_no, "empty chromosome")
        genes = []
        for tok in body:
            try:
                value = int(tok)
            except ValueError:
                raise GenomeParseError(line_no, "non-integer gene marker %r" % tok)
            if value == 0:
                raise GenomeParseError(line_no, "gene marker 0 is not allowed")
            genes.append(Gene.of(value))
        current_chroms.append(Chromosome(genes, circular=(mark == CIRCULAR_MARK)))
    flush()
    return genomes


def serialize_genomes(genomes: Iterable[Genome]) -> str:
    """Inverse of parse_genomes; emits records in order, orientation intact."""
    out = []
    for genome in genomes:
        out.append(">%s\n" % genome.name)
        for chrom in genome.chromosomes:
            mark = CIRCULAR_MARK if chrom.circular else LINEAR_MARK
            out.append("%s %s\n" % (" ".join(str(s) for s in chrom.signed()), mark))
    return "".join(out)


def genome_from_adjacencies(
    gene_ids: Iterable[tuple[int, int]],
    adjacency: dict,
    telomeres: set,
    name: str = "",
) -> Genome:
    """Rebuild a genome from its adjacency structure.

    ``gene_ids`` lists (family, occurrence) pairs; sites are
    ``(family, occurrence, 'h'|'t')``.  ``adjacency`` maps each matched site
    to its partner, ``telomeres`` holds the unmatched sites.  Chromosome
    order and travel direction are chosen deterministically so the same
    structure always decodes to the same genome.
    """
    gene_ids = sorted(gene_ids)
    visited = set()
    chromosomes = []

    def other_site(site):
        fam, occ, ext = site
        return (fam, occ, "t" if ext == "h" else "h")

    def walk(start, circular):
        genes = []
        site = start
        while True:
            fam, occ, ext = site
            genes.append(Gene(fam, 1 if ext == "h" else -1))
            visited.add((fam, occ))
            out = other_site(site)
            if circular:
                nxt = adjacency[out]
                if (nxt[0], nxt[1]) == (start[0], start[1]):
                    break
            else:
                if out in telomeres:
                    break
                nxt = adjacency[out]
            site = nxt
        return genes

    for site in sorted(telomeres):
        fam, occ, _ = site
        if (fam, occ) in visited:
            continue
        chromosomes.append(Chromosome(walk(site, circular=False), circular=False))
    for fam, occ in gene_ids:
        if (fam, occ) in visited:
            continue
        start = min((fam, occ, "h"), (fam, occ, "t"))
        chromosomes.append(Chromosome(walk(start, circular=True), circular=True))
    return Genome(name, chromosomes)
