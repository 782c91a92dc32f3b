"""Exception hierarchy for clsched.

Validation errors (bad inputs, malformed files) and verification errors
(a schedule that does not do what it claims) are kept in separate branches
so the CLI can map them to distinct exit codes.
"""

from __future__ import annotations


class ClschedError(Exception):
    """Base class for all clsched errors."""


# --- network construction / validation -------------------------------------

class NetworkError(ClschedError):
    """Invalid network description."""


class CrossLayerEdge(NetworkError):
    """An edge skips a layer or points backwards."""


class LayerMismatch(NetworkError):
    """Source and destination layers disagree in size, or K = 0."""


class DanglingGain(NetworkError):
    """A gain was supplied for an edge that does not exist."""


class DuplicateEdge(NetworkError):
    """The same ordered node pair appears twice in the edge list."""


class MixedGainKinds(NetworkError):
    """Deterministic and Gaussian gains mixed in one network."""


class GainExceedsQ(ClschedError):
    """A deterministic gain is negative or larger than the bit width q."""


# --- topology generators -----------------------------------------------------

class BadParams(ClschedError):
    """Generator parameters outside their legal range."""


class BadPattern(BadParams):
    """A K x 2 x ... x 2 x K connectivity pattern references bad layers/relays."""


class NotK22K(ClschedError):
    """Operation requires a K x 2 x ... x 2 x K network."""


class UnroutableAfterRetries(ClschedError):
    """Random generator failed to produce a fully routable network."""


class UnroutablePair(ClschedError):
    """An S-D pair has no route, so no schedule can serve it."""


class UnsupportedM(ClschedError):
    """Two-layer folded-chain construction only covers m in {1, 2, K-1, K}."""


class NoCrossPath(ClschedError):
    """Witness construction needs a route S_i -> D_j with i != j."""


# --- coloring ---------------------------------------------------------------

class MalformedAssignment(ClschedError):
    """Color index out of range, or an expanded node has no entry."""


class InvalidColoring(ClschedError):
    """A color assignment that fails the validity conditions."""


class BudgetExhausted(ClschedError):
    """Backtracking search ran out of its node-expansion budget."""


# --- simulation / verification ----------------------------------------------

class VerificationError(ClschedError):
    """Base class for signal-level verification failures."""


class ResidualInterference(VerificationError):
    """A foreign symbol survives with nonzero coefficient at some node."""


class MissingDesired(VerificationError):
    """The desired symbol arrives with coefficient != 1."""


class NoiseBudgetExceeded(VerificationError):
    """Accumulated noise terms exceed the schedule period."""


class SimultaneousTransmit(ClschedError):
    """A node would transmit for two pairs in the same time instant."""


class StrategyArity(ClschedError):
    """A relay strategy consumed signals outside its declared inputs."""


# --- file formats -----------------------------------------------------------

class FormatError(ClschedError):
    """Unparseable or schema-violating descriptor/coloring/trace file."""
