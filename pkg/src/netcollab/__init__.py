"""Joint network reconstruction and community detection by evolutionary multitasking."""

from .community import CdRates, CdResult, cd_dynamic_step, cd_preoptimize, cd_variation
from .dynamics import NrProblem, load_problem, make_problem, save_problem, simulate_eg, simulate_rn
from .errors import ConfigurationError, DimensionError, ParseError
from .graph import KNOWN_NETWORKS, Network, load_edge_list, load_named, make_network
from .moea import (
    NrOptimizer,
    Population,
    crowding_distance,
    environment_selection,
    fast_nondominated_sort,
    nr_variation,
)
from .nc import (
    NcConfig,
    RunResult,
    knowledge_transfer_cd_to_nr,
    run_network_collaborator,
    run_nr2cd,
    select_representative,
)
from .objectives import mcc, modularity, nmi, nr_objectives, symmetrize
from .stats import rank_sum_test

__version__ = "0.1.0"

__all__ = [
    "CdRates", "CdResult", "cd_dynamic_step", "cd_preoptimize", "cd_variation",
    "NrProblem", "load_problem", "make_problem", "save_problem", "simulate_eg", "simulate_rn",
    "ConfigurationError", "DimensionError", "ParseError",
    "KNOWN_NETWORKS", "Network", "load_edge_list", "load_named", "make_network",
    "NrOptimizer", "Population", "crowding_distance", "environment_selection",
    "fast_nondominated_sort", "nr_variation",
    "NcConfig", "RunResult", "knowledge_transfer_cd_to_nr", "run_network_collaborator",
    "run_nr2cd", "select_representative",
    "mcc", "modularity", "nmi", "nr_objectives", "symmetrize", "rank_sum_test",
]
