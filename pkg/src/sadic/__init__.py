"""S-adic continued fraction toolkit.

Extended continued fraction algorithms (Sturmian, Brun, Arnoux-Rauzy,
Cassaigne), directive sequences and their fixed points, worms and their
plane projections, the abelianized prefix automaton, Rauzy-fractal
approximation with certified ball bounds, Lyapunov-exponent estimation
for the associated matrix cocycles, torus-translation coding and the
induction/renormalization scheme.
"""

__version__ = "0.1.0"

from .words import Substitution, DirectiveSequence, word_from_str, word_to_str
from .algorithms import (
    Direction,
    Algorithm,
    get_algorithm,
    step,
    directive_sequence,
    perron_direction,
)

__all__ = [
    "Substitution",
    "DirectiveSequence",
    "word_from_str",
    "word_to_str",
    "Direction",
    "Algorithm",
    "get_algorithm",
    "step",
    "directive_sequence",
    "perron_direction",
]
