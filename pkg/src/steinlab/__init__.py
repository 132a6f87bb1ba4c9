"""Random chord diagrams, size-bias couplings and Stein-method bounds."""
from steinlab.diagram import (
    ChordDiagram,
    DiagramError,
    DuplicateEndpoint,
    IncompleteMatching,
    OutOfRange,
    Rng,
    SelfLoop,
    chord_set_probability,
    double_factorial,
    enumerate_all,
    from_pairs,
    sample_uniform,
)
from steinlab.pmf import Pmf
from steinlab.statistics import (
    DiagramStats,
    count_components,
    count_crossings_fast,
    count_crossings_naive,
    count_length_j,
    count_nestings,
    count_simple_chords,
    crossing_mean_variance,
    diagram_stats,
)
from steinlab.sizebias import (
    CouplingOutcome,
    Quadruple,
    ZeroMean,
    conditional_mean_increment,
    couple_crossings,
    couple_simple,
    size_bias_pmf,
    verify_size_bias_exact,
)

__version__ = "0.1.0"
