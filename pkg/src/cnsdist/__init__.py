"""Common-neighbor similarity distributions and theoretical link-prediction accuracy."""

from .graph import Graph, NodeSet, cns, load_edge_list, pair_classes
from .cns import (
    ClassCondDistributions,
    Pmf,
    class_distributions_analytic,
    convolution_identity,
    convolve,
    empirical_class_distributions,
    er_closed_form,
    poisson_binomial,
    set_cns_distribution,
)

__version__ = "0.1.0"
