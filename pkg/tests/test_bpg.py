import random

import pytest

from dcjindel.bpg import (
    build_bpg,
    census_of_pair,
    classify_components,
    dcj_distance,
    dcj_indel_distance,
    dcj_indel_distance_between,
)
from dcjindel.oracle import bfs_indel_distance

from conftest import circular, linear, random_duplicate_free_genome, random_duplicate_free_pair


def test_worked_example_census_and_distance(fig_pair):
    g, p = fig_pair
    census = census_of_pair(g, p)
    assert census.n == 7
    assert census.cycles == 1
    # one even path from an extremity private to the first genome to a cap,
    # one odd path from a second-genome-private extremity to a cap
    assert (census.open_a_even, census.open_a_odd) == (1, 0)
    assert (census.open_b_even, census.open_b_odd) == (0, 1)
    # one private-private path on each side and one mixed path
    assert census.open_aa == 1
    assert census.open_bb == 1
    assert census.open_ab == 1
    assert dcj_indel_distance(census) == 4


def test_classify_components_matches_direct_walk(fig_pair):
    g, p = fig_pair
    assert classify_components(build_bpg(g, p), g, p) == census_of_pair(g, p)


def test_classify_components_rejects_duplicates(dup_pair):
    g, p = dup_pair
    with pytest.raises(ValueError):
        classify_components(build_bpg(g, p), g, p)


def test_identical_genomes_census():
    a = linear("A", (1, 2, 3))
    b = linear("B", (1, 2, 3))
    census = census_of_pair(a, b)
    assert census.component_count() == 4
    assert census.cycles == 2
    assert census.cap_even == 2
    assert census.open_aa == census.open_bb == census.open_ab == 0
    assert dcj_indel_distance(census) == 0


def test_disjoint_singletons_census():
    # Enumerating the 4-vertex graph by hand: each genome contributes two
    # cap paths ending at an extremity whose family the other genome lacks.
    a = linear("A", (1,))
    b = linear("B", (2,))
    census = census_of_pair(a, b)
    assert census.n == 2
    assert (census.open_a_odd, census.open_a_even) == (2, 0)
    assert (census.open_b_odd, census.open_b_even) == (2, 0)
    assert census.cycles == census.cap_even == census.cap_odd == 0
    assert dcj_indel_distance(census) == 2


def test_private_circular_chromosome_is_surcharged():
    from dcjindel.genome import Chromosome, Gene, Genome

    a = linear("A", (2,))
    b = Genome("B", [Chromosome([Gene.of(2)]), Chromosome([Gene.of(1)], circular=True)])
    census = census_of_pair(a, b)
    assert census.exclusive_circulars == 1
    assert dcj_indel_distance(census) == 1
    assert bfs_indel_distance(a, b) == 1


def test_dcj_distance_examples():
    assert dcj_distance(linear("A", (1, 2, 3)), linear("B", (1, -2, 3))) == 1
    assert dcj_distance(linear("A", (1, 2, 3)), linear("B", (1, 2, 3))) == 0
    with pytest.raises(ValueError):
        dcj_distance(linear("A", (1, 2)), linear("B", (1, 2, 3)))
    with pytest.raises(ValueError):
        dcj_distance(linear("A", (1, 1)), linear("B", (1, 1)))


def test_dcj_distance_matches_event_oracle():
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randint(1, 5)
        fams = list(range(1, n + 1))
        a = random_duplicate_free_genome(rng, fams, "A")
        b = random_duplicate_free_genome(rng, fams, "B")
        assert dcj_distance(a, b) == bfs_indel_distance(a, b)


def test_distance_symmetry_property():
    rng = random.Random(17)
    for _ in range(1000):
        a, b = random_duplicate_free_pair(rng)
        swapped = census_of_pair(b, a)
        assert dcj_indel_distance(census_of_pair(a, b)) == dcj_indel_distance(swapped)


def test_distance_zero_iff_same_content():
    rng = random.Random(23)
    for _ in range(300):
        a, b = random_duplicate_free_pair(rng)
        d = dcj_indel_distance_between(a, b)
        if a.same_content(b):
            assert d == 0
        else:
            assert d > 0
        assert dcj_indel_distance_between(a, a) == 0


def test_census_conservation():
    # Every edge of the graph is walked exactly once, and per-genome edge
    # counts reconstruct the gene counts.
    rng = random.Random(29)
    for _ in range(200):
        a, b = random_duplicate_free_pair(rng)
        bpg = build_bpg(a, b)
        per_color = [0, 0]
        for _u, _v, color in bpg.edges:
            per_color[color] += 1
        for genome, edges in ((a, per_color[0]), (b, per_color[1])):
            expected = 0
            for chrom in genome.chromosomes:
                expected += len(chrom) if chrom.circular else len(chrom) + 1
            assert edges == expected
        census = census_of_pair(a, b)
        # paths with at least one open end pair up with open extremities
        open_ends = census.open_a_odd + census.open_a_even + census.open_b_odd \
            + census.open_b_even + 2 * (census.open_aa + census.open_bb + census.open_ab)
        private = len(a.families() ^ b.families())
        assert open_ends == 2 * private


def test_small_world_formula_vs_event_oracle_sample():
    # A light version of the exhaustive acceptance check.
    rng = random.Random(31)
    for _ in range(60):
        a, b = random_duplicate_free_pair(rng, universe=3)
        assert dcj_indel_distance_between(a, b) == bfs_indel_distance(a, b)


def test_bpg_dump_is_stable(fig_pair):
    g, p = fig_pair
    dump = build_bpg(g, p).dump()
    assert dump == build_bpg(g, p).dump()
    lines = dump.strip().split("\n")
    assert lines == sorted(lines)
    assert "1.0t -- 2.0t [G]" in lines
    assert "1.0h -- cap:P.0 [P]" in lines


# Triangle inequality deliberately untested: this distance does not satisfy it.
