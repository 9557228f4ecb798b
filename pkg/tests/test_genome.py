import random

import pytest

from dcjindel.genome import (
    Chromosome,
    Gene,
    Genome,
    GenomeParseError,
    family_census,
    label_occurrences,
    parse_genomes,
    serialize_genomes,
)

from conftest import linear


def test_parse_single_circular_genome():
    genomes = parse_genomes(">G\n1 -2 3 -6 5 @\n")
    assert len(genomes) == 1
    g = genomes[0]
    assert g.name == "G"
    assert len(g.chromosomes) == 1
    assert g.chromosomes[0].circular
    assert g.chromosomes[0].signed() == (1, -2, 3, -6, 5)


def test_parse_single_linear_genome():
    g = parse_genomes(">P\n1 2 3 7 4 $\n")[0]
    assert not g.chromosomes[0].circular
    assert g.chromosomes[0].signed() == (1, 2, 3, 7, 4)


def test_parse_one_gene_genome():
    g = parse_genomes(">E\n1 $\n")[0]
    assert g.chromosomes[0].signed() == (1,)


def test_parse_multiple_genomes_and_blank_lines():
    text = ">A\n1 2 $\n\n>B\n3 @\n-1 4 $\n"
    a, b = parse_genomes(text)
    assert a.name == "A" and b.name == "B"
    assert len(b.chromosomes) == 2
    assert b.chromosomes[1].signed() == (-1, 4)


@pytest.mark.parametrize(
    "text,line",
    [
        (">\n1 $\n", 1),  # nameless header
        (">A\n1 x $\n", 2),  # non-integer token
        (">A\n1 0 $\n", 2),  # zero marker
        (">A\n1 2 3\n", 2),  # missing terminator
        (">A\n$\n", 2),  # empty chromosome
        ("1 2 $\n", 1),  # genes before a header
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(GenomeParseError) as err:
        parse_genomes(text)
    assert err.value.line_no == line


def test_serialize_round_trip_exact_text():
    text = ">G\n1 -2 3 -6 5 @\n"
    assert serialize_genomes(parse_genomes(text)) == text
    assert serialize_genomes([]) == ""
    two = ">A\n1 $\n>B\n2 @\n"
    assert serialize_genomes(parse_genomes(two)) == two


def test_parse_serialize_identity_property():
    rng = random.Random(7)
    for _ in range(1000):
        chroms = []
        for _ in range(rng.randint(1, 3)):
            genes = [rng.randint(1, 9) * rng.choice([1, -1]) for _ in range(rng.randint(1, 6))]
            chroms.append(Chromosome([Gene.of(x) for x in genes], circular=rng.random() < 0.5))
        g = Genome("r%d" % rng.randint(0, 999), chroms)
        back = parse_genomes(serialize_genomes([g]))[0]
        assert back.name == g.name
        assert [c.signed() for c in back.chromosomes] == [c.signed() for c in g.chromosomes]
        assert [c.circular for c in back.chromosomes] == [c.circular for c in g.chromosomes]


def test_family_census_examples():
    assert dict(family_census(linear("G", (1, -2, 3, 2, -6, 5)))) == {1: 1, 2: 2, 3: 1, 5: 1, 6: 1}
    assert dict(family_census(linear("g", (1, 2, 3)))) == {1: 1, 2: 1, 3: 1}
    assert dict(family_census(linear("g", (4, 4, 4)))) == {4: 3}


def test_family_census_totals_match_gene_count():
    rng = random.Random(11)
    for _ in range(200):
        genes = [rng.randint(1, 5) * rng.choice([1, -1]) for _ in range(rng.randint(1, 10))]
        g = linear("g", tuple(genes))
        assert sum(family_census(g).values()) == g.gene_count()


def test_gene_marker_validation():
    with pytest.raises(ValueError):
        Gene.of(0)
    assert Gene.of(-3) == Gene(3, -1)
    assert Gene.of(3).signed == 3
    assert Gene.of(-3).flipped() == Gene(3, 1)


def test_circular_chromosome_rotation_and_reflection_equality():
    base = Chromosome([Gene.of(x) for x in (1, -2, 3)], circular=True)
    rotated = Chromosome([Gene.of(x) for x in (-2, 3, 1)], circular=True)
    reflected = Chromosome([Gene.of(x) for x in (-3, 2, -1)], circular=True)
    assert base == rotated
    assert base == reflected
    assert hash(base) == hash(rotated) == hash(reflected)


def test_linear_chromosome_reverse_complement_equality():
    fwd = Chromosome([Gene.of(x) for x in (1, -2, 3)])
    rev = Chromosome([Gene.of(x) for x in (-3, 2, -1)])
    assert fwd == rev
    circ = Chromosome([Gene.of(x) for x in (1, -2, 3)], circular=True)
    assert fwd != circ


def test_chromosome_must_be_nonempty():
    with pytest.raises(ValueError):
        Chromosome([])


def test_occurrence_labels_are_per_family_reading_order():
    g = linear("g", (2, 1, 2, 2, 1))
    rows = label_occurrences(g)
    assert [(gene.family, occ) for gene, occ in rows[0]] == [
        (2, 0), (1, 0), (2, 1), (2, 2), (1, 1),
    ]
