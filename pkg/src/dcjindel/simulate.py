"""Synthetic genome evolution: inversions, indels and duplications.

A run starts from the identity genome (one linear chromosome 1..n) and
applies a fixed budget of events in uniformly shuffled order: floor(theta*n)
segment inversions, floor(gamma*n) indels (insertion of a brand-new family
or deletion of one gene, an even coin per event) and floor(phi*n) single
gene duplications.  Everything is driven by one seeded generator, so a
configuration reproduces its genomes bit for bit.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Optional

from .genome import Chromosome, Gene, Genome

log = logging.getLogger(__name__)


@dataclass
class EvolutionConfig:
    n: int
    theta: float = 0.0  # inversion rate, as a fraction of n
    gamma: float = 0.0  # indel rate
    phi: float = 0.0  # duplication rate
    seed: int = 0
    insertion_probability: float = 0.5  # insertion vs deletion split per indel
    duplication_span: int = 1  # genes copied per duplication event

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one seed gene")
        for name in ("theta", "gamma", "phi"):
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise ValueError("%s must be within [0, 1]" % name)

    def event_budget(self) -> tuple[int, int, int]:
        return (
            int(self.theta * self.n),
            int(self.gamma * self.n),
            int(self.phi * self.n),
        )


@dataclass
class SimEvent:
    kind: str  # inversion | insertion | deletion | duplication
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        parts = [self.kind]
        for key in sorted(self.detail):
            parts.append("%s=%s" % (key, self.detail[key]))
        return "\t".join(parts)


def make_identity(n: int, name: str = "seed") -> Genome:
    """One linear chromosome carrying genes 1..n forward."""
    if n < 1:
        raise ValueError("need at least one gene")
    return Genome(name, [Chromosome([Gene(i, 1) for i in range(1, n + 1)])])


def _as_lists(genome: Genome) -> list:
    return [[list(c.genes), c.circular] for c in genome.chromosomes]


def _total(chroms) -> int:
    return sum(len(c[0]) for c in chroms)


def _pick_position(rng, chroms):
    """Uniform gene position across chromosomes: (chromosome, index)."""
    flat = _total(chroms)
    k = rng.randrange(flat)
    for ci, (genes, _circ) in enumerate(chroms):
        if k < len(genes):
            return ci, k
        k -= len(genes)
    raise AssertionError("unreachable")


def _invert(rng, chroms, events):
    if not chroms:
        events.append(SimEvent("inversion", {"skipped": "empty genome"}))
        log.warning("inversion skipped: empty genome")
        return
    ci = rng.randrange(len(chroms))
    genes, _circ = chroms[ci]
    i = rng.randrange(len(genes))
    j = rng.randrange(len(genes))
    i, j = min(i, j), max(i, j)
    genes[i:j + 1] = [g.flipped() for g in reversed(genes[i:j + 1])]
    events.append(SimEvent("inversion", {"chrom": ci, "start": i, "end": j}))


def _insert(rng, chroms, fresh_family, events):
    gene = Gene(fresh_family, rng.choice((1, -1)))
    if not chroms:
        chroms.append([[gene], False])
        events.append(SimEvent("insertion", {"family": fresh_family, "chrom": 0, "pos": 0}))
        return
    ci = rng.randrange(len(chroms))
    genes, _circ = chroms[ci]
    pos = rng.randrange(len(genes) + 1)
    genes.insert(pos, gene)
    events.append(SimEvent("insertion", {"family": fresh_family, "chrom": ci, "pos": pos}))


def _delete(rng, chroms, events):
    if _total(chroms) == 0:
        events.append(SimEvent("deletion", {"skipped": "empty genome"}))
        log.warning("deletion skipped: empty genome")
        return
    ci, pos = _pick_position(rng, chroms)
    gene = chroms[ci][0].pop(pos)
    events.append(SimEvent("deletion", {"family": gene.family, "chrom": ci, "pos": pos}))
    if not chroms[ci][0]:
        del chroms[ci]


def _duplicate(rng, chroms, span, events):
    if _total(chroms) == 0:
        events.append(SimEvent("duplication", {"skipped": "empty genome"}))
        log.warning("duplication skipped: empty genome")
        return
    ci, pos = _pick_position(rng, chroms)
    genes, _circ = chroms[ci]
    copy = [g for g in genes[pos:pos + span]]
    ti = rng.randrange(len(chroms))
    tpos = rng.randrange(len(chroms[ti][0]) + 1)
    chroms[ti][0][tpos:tpos] = copy
    events.append(
        SimEvent(
            "duplication",
            {
                "family": copy[0].family,
                "from_chrom": ci,
                "from_pos": pos,
                "chrom": ti,
                "pos": tpos,
                "span": len(copy),
            },
        )
    )


def evolve(seed_genome: Genome, config: EvolutionConfig, name: Optional[str] = None,
           fresh_base: Optional[int] = None) -> tuple[Genome, list]:
    """Apply the configured event budget to a copy of the seed genome.

    ``fresh_base``: the first family id used for insertions (defaults to one
    past the largest existing family).  Callers producing several related
    genomes hand out disjoint ranges so that inserted content stays private
    to each genome.  Returns the evolved genome and its event log; skipped
    events (e.g. deletion from an emptied genome) still occupy a log line.
    """
    rng = random.Random(config.seed)
    n_inv, n_indel, n_dup = config.event_budget()
    plan = ["inversion"] * n_inv + ["indel"] * n_indel + ["duplication"] * n_dup
    rng.shuffle(plan)

    chroms = _as_lists(seed_genome)
    fresh = fresh_base if fresh_base is not None else (
        max((g.family for c in seed_genome.chromosomes for g in c.genes), default=0) + 1
    )
    events: list = []
    for step in plan:
        if step == "inversion":
            _invert(rng, chroms, events)
        elif step == "indel":
            if rng.random() < config.insertion_probability:
                _insert(rng, chroms, fresh, events)
                fresh += 1
            else:
                _delete(rng, chroms, events)
        else:
            _duplicate(rng, chroms, config.duplication_span, events)
    out = Genome(
        name if name is not None else seed_genome.name + "_evolved",
        [Chromosome(genes, circ) for genes, circ in chroms],
    )
    return out, events


@dataclass
class TrioResult:
    genomes: tuple  # the three evolved genomes
    seed_genome: Genome
    logs: tuple  # one event list per genome


def make_trio(n: int, config: EvolutionConfig) -> TrioResult:
    """Three independent evolutions of one identity seed, same rates.

    Sub-seeds derive deterministically from the configuration seed, and each
    genome draws inserted families from its own range.
    """
    seed_genome = make_identity(n)
    insert_budget = int(config.gamma * n) + 1
    genomes = []
    logs = []
    for i in range(3):
        sub = EvolutionConfig(
            n=n,
            theta=config.theta,
            gamma=config.gamma,
            phi=config.phi,
            seed=config.seed * 3 + i + 1,
            insertion_probability=config.insertion_probability,
            duplication_span=config.duplication_span,
        )
        genome, events = evolve(
            seed_genome,
            sub,
            name="g%d" % (i + 1),
            fresh_base=n + 1 + i * insert_budget,
        )
        genomes.append(genome)
        logs.append(events)
    return TrioResult(tuple(genomes), seed_genome, tuple(logs))
