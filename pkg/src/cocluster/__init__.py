"""Information-theoretic co-clustering with a tunable coupling parameter.

Normalize a nonnegative matrix into a joint distribution, then search
for row and column partitions minimizing a beta-weighted sum of
information losses. beta interpolates between fully decoupled one-sided
clustering (beta = 1) and objectives that couple the two sides through
their cluster variables (down to beta = 0); well-known mutual-information
co-clustering objectives appear at beta = 1/2 and beta = 3/4. An
equivalent formulation as state-space aggregation of the bipartite
random walk serves as an independent correctness oracle.
"""

from .core import (
    AggregateStats,
    CoClustering,
    JointDistribution,
    aggregate,
    connected_components,
    entropy,
    mutual_information,
    normalize,
    relevant_information_loss,
)
from .cost import (
    CostBreakdown,
    MoveEvaluator,
    cost_beta,
    cost_ibcc,
    cost_itcc,
)
from .markov import (
    AggregationMap,
    BipartiteChain,
    aggregation_cost_loss,
    aggregation_cost_mi,
    build_chain,
    consistency_residual,
)
from .metrics import map_prime, map_score, overlap_matrix
from .optimize import (
    OptimizerConfig,
    RunTrace,
    annealed_coclustering,
    best_of_restarts,
    one_sided_clustering,
    random_clustering,
    sequential_coclustering,
)
from .synth import (
    CirculantSpec,
    Fixture,
    PlantedSpec,
    fixture,
    fixtures,
    gen_circulant,
    gen_planted,
    smooth,
)

__version__ = "0.1.0"

__all__ = [
    "AggregateStats",
    "AggregationMap",
    "BipartiteChain",
    "CirculantSpec",
    "CoClustering",
    "CostBreakdown",
    "Fixture",
    "JointDistribution",
    "MoveEvaluator",
    "OptimizerConfig",
    "PlantedSpec",
    "RunTrace",
    "aggregate",
    "aggregation_cost_loss",
    "aggregation_cost_mi",
    "annealed_coclustering",
    "best_of_restarts",
    "build_chain",
    "connected_components",
    "consistency_residual",
    "cost_beta",
    "cost_ibcc",
    "cost_itcc",
    "entropy",
    "fixture",
    "fixtures",
    "gen_circulant",
    "gen_planted",
    "map_prime",
    "map_score",
    "mutual_information",
    "normalize",
    "one_sided_clustering",
    "overlap_matrix",
    "random_clustering",
    "relevant_information_loss",
    "sequential_coclustering",
    "smooth",
]
