"""Exact stationary correlations of the multispecies PASEP on a ring via multiline queues."""

__version__ = "0.1.0"

from .qcore import DomainError, as_q, binom, fmt, multinom, parse_rational, q_factorial, q_int
from .mlq import (
    CapExceeded,
    Link,
    LinkedMLQ,
    MultilineQueue,
    SpeciesCount,
    availability_order,
    enumerate_linkings,
    enumerate_mlqs,
    link_distribution,
    project,
    rotate_linked,
    rotate_mlq,
    rotate_word,
    sample_word,
)
from .markov import (
    CorrelationTable,
    Distribution,
    GeneratorMatrix,
    build_generator,
    gillespie,
    lump,
    mlq_stationary,
    solve_stationary,
    two_point,
)
