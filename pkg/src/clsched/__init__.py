"""clsched: interference-avoidance and network-coded scheduling for
layered multi-pair networks under 1-local view, with symbolic and
bit-exact verification of the resulting schedules."""

from .network import (
    ChannelGain,
    FamilyTag,
    LayeredNetwork,
    build_network,
)
from .expansion import ExpandedNode, RouteExpandedGraph, expand, pair_neighbors
from .coloring import (
    ColorAssignment,
    ValidityReport,
    InterfererSet,
    achievable_alpha,
    check_coloring,
    effective_receive_set,
    interferers,
    tdma_coloring,
)
from .channel import (
    MODE_DETERMINISTIC,
    MODE_GAUSSIAN,
    block_simulate,
    deterministic_simulate,
    random_trials,
    shift_apply,
    symbolic_verify,
)
from .search import (
    SearchOutcome,
    search_end_to_end,
    search_mcl,
    search_mil,
)
from .topologies import (
    K22KPattern,
    gen_folded_single,
    gen_folded_two_layer,
    gen_k22k,
    gen_nested,
    gen_random,
    is_non_interfering_k22k,
)
from .bounds import (
    BoundResult,
    GainReport,
    construct_folded_single_coloring,
    construct_folded_two_layer_coloring,
    construct_nested_schedule,
    construct_thm2_coloring,
    gain_report,
    upper_bound,
    witness_lemma1,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
