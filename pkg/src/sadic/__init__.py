"""Invariant measures on S-adic subshifts: incidence algebra, letter cones,
cylinder-measure reconstruction and a brute-force frequency oracle."""

from .cones import ConeReport, check_thin, cone_generators, estimate_cone_dim, find_stabilization_level
from .directive import (DirectiveSequence, check_everywhere_growing, check_invertible_levels,
                        min_image_length, telescope)
from .errors import (ConvergenceError, InfeasibleError, InvalidArgumentError, InvalidStateError,
                     NotApplicableError, ResourceLimitError, SadicError)
from .measures import (AmbiguityReport, CylinderEstimate, MeasureTower, cylinder_measure, pushforward,
                       total_mass, unique_tower_from_letters, zeta)
from .morphisms import (Alphabet, IntMatrix, Morphism, Word, apply, compose, count_letter,
                        count_occurrences, incidence_matrix)
from .oracle import ExpansionBudget, empirical_frequency, expand, perron_frequencies
from .presets import PRESETS, preset

__version__ = "0.1.0"
