"""Rearrangement distances and medians for genomes with unequal content."""

__version__ = "0.1.0"

from .bpg import (
    BreakpointGraph,
    ComponentCensus,
    build_bpg,
    census_of_pair,
    classify_components,
    dcj_distance,
    dcj_indel_distance,
    dcj_indel_distance_between,
)
from .condense import CondensedInstance, condense_bpg, evaluate_census
from .genome import (
    Chromosome,
    Gene,
    Genome,
    GenomeParseError,
    family_census,
    parse_genomes,
    serialize_genomes,
)
from .median import (
    LKConfig,
    MedianResult,
    MultipleBreakpointGraph,
    build_mbg,
    dcj_neighbor,
    decode_zero_matching,
    init_median_content,
    init_zero_matching,
    lk_search,
    median_score,
    num_pair,
    shrink_adequate_subgraphs,
    solve_median,
)
from .oracle import (
    IndelBfsOracle,
    all_duplicate_free_genomes,
    best_median_score,
    bfs_indel_distance,
)
from .simulate import EvolutionConfig, evolve, make_identity, make_trio
from .solver import (
    DistanceResult,
    OracleSpaceError,
    SolverOptions,
    branch_and_bound,
    decompose_components,
    distance_between,
    exemplar_distance,
    fix_short_cycles,
    matching_distance,
    oracle_distance,
    resolve_pair,
)
