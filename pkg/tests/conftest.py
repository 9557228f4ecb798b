"""Shared generators for randomized tests.

The solver corpus mirrors the acceptance setup: genomes of at most 8 genes,
at most two copies of any duplicated family per genome, private genes
allowed.  Roughly half the instances arrange families in balanced
per-chromosome blocks (so the graph has several components, the setting the
decomposition optimization targets); the rest are free-form.
"""

import random

import pytest

from dcjindel.genome import Chromosome, Gene, Genome


def corpus_pair(seed):
    rng = random.Random(seed)
    if rng.random() < 0.55:
        blocks = ([1, 2], [3, 4])
        genomes = []
        for gi in range(2):
            chroms = []
            for block in blocks:
                genes = [f for f in block for _ in range(2)]
                rng.shuffle(genes)
                signed = [g * rng.choice([1, -1]) for g in genes]
                chroms.append(
                    Chromosome([Gene.of(x) for x in signed], circular=rng.random() < 0.4)
                )
            if rng.random() < 0.3:
                fam = 100 + gi * 10 + rng.randint(0, 2)
                chroms.append(
                    Chromosome([Gene.of(fam * rng.choice([1, -1]))], circular=rng.random() < 0.5)
                )
            genomes.append(Genome("G%d" % gi, chroms))
        return genomes
    nfam = rng.randint(3, 6)
    shared = list(range(1, nfam + 1))
    genomes = []
    for gi in range(2):
        genes = []
        for f in shared:
            genes.extend([f] * rng.choice([0, 1, 1, 2, 2]))
        for _ in range(rng.randint(0, 2)):
            genes.append(100 + gi * 10 + rng.randint(0, 3))
        genes = genes[:8]
        if not genes:
            genes = [shared[0]]
        rng.shuffle(genes)
        signed = [g * rng.choice([1, -1]) for g in genes]
        if len(signed) >= 2 and rng.random() < 0.5:
            cut = rng.randint(1, len(signed) - 1)
            parts = [signed[:cut], signed[cut:]]
        else:
            parts = [signed]
        chroms = [
            Chromosome([Gene.of(x) for x in p], circular=rng.random() < 0.4) for p in parts if p
        ]
        genomes.append(Genome("G%d" % gi, chroms))
    return genomes


def random_duplicate_free_genome(rng, families, name="g", max_chromosomes=2):
    """Random genome using each of the given families exactly once."""
    fams = list(families)
    rng.shuffle(fams)
    signed = [f * rng.choice([1, -1]) for f in fams]
    n_chrom = rng.randint(1, min(max_chromosomes, len(signed)))
    cuts = sorted(rng.sample(range(1, len(signed)), n_chrom - 1)) if n_chrom > 1 else []
    parts = []
    prev = 0
    for cut in cuts + [len(signed)]:
        parts.append(signed[prev:cut])
        prev = cut
    chroms = [
        Chromosome([Gene.of(x) for x in part], circular=rng.random() < 0.4)
        for part in parts
    ]
    return Genome(name, chroms)


def random_duplicate_free_pair(rng, universe=6):
    """Two duplicate-free genomes over partially overlapping content."""
    pool = list(range(1, universe + 1))
    size_a = rng.randint(1, universe)
    size_b = rng.randint(1, universe)
    fams_a = rng.sample(pool, size_a)
    fams_b = rng.sample(pool, size_b)
    return (
        random_duplicate_free_genome(rng, fams_a, "A"),
        random_duplicate_free_genome(rng, fams_b, "B"),
    )


def linear(name, *seqs):
    return Genome(name, [Chromosome([Gene.of(x) for x in s]) for s in seqs])


def circular(name, *seqs):
    return Genome(name, [Chromosome([Gene.of(x) for x in s], circular=True) for s in seqs])


@pytest.fixture
def fig_pair():
    """The worked-example pair: one circular, one linear genome."""
    return circular("G", (1, -2, 3, -6, 5)), linear("P", (1, 2, 3, 7, 4))


@pytest.fixture
def dup_pair():
    """A pair with one duplicated family and private content on both sides."""
    return linear("G", (1, -2, 3, 2, -6, 5)), linear("P", (1, 2, 3, 7, 2, 4))
