"""Exact laws, reference distributions, distances and Stein bounds."""
from steinlab.limitlab.bounds import (
    BoundReport,
    SBVariance,
    exact_kolmogorov_crossings,
    sb_variance_term,
    stein_normal_bound,
    tv_bound_simple,
)
from steinlab.limitlab.distances import (
    EmptySample,
    dkw_radius,
    empirical_kolmogorov,
    kolmogorov_distance_to_normal,
    normal_cdf,
    poisson_pmf,
    tv_distance_to_poisson,
)
from steinlab.limitlab.exact import (
    catalan,
    crossing_pmf_exact,
    scfree_bounds,
    simple_chord_free_count,
    simple_chord_pmf_exact,
)
