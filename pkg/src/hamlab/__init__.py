"""Edge-process laboratory for Hamiltonicity on dense host graphs."""

from .exceptions import (FinderFailureError, GenerationFailedError, HamLabError,
                         InvalidParameterError, InvalidRotationError,
                         InvalidStateError, NoHittingTimeError,
                         OracleUnavailableError, ParseError)
from .hamiltonicity import (HamCertificate, PathSystem, count_boosters,
                            endpoint_set, exact_hamiltonian, exact_longest_path,
                            find_hamilton, rotate, verify_posa_condition)
from .hostgraph import (HostGraph, generate_complete, generate_dirac_profile,
                        generate_regular, load_edge_list, save_edge_list,
                        validate_min_degree)
from .process import (ProcessTrace, SnapshotGraph, blue_subgraph, build_auxiliary,
                      default_omega, hitting_time_hamiltonian,
                      hitting_time_min_degree, load_trace, sample_gnp,
                      sample_trace, save_trace, snapshot)
from .structure import (EventReport, VertexClasses, check_connected,
                        check_expansion, check_red_surplus, check_size_events,
                        check_small_structures, check_sparse_sets, classify,
                        maximum_density_subgraph, neighborhood)
from .threshold import (DegreeProfile, ThresholdSolution, check_window_bounds,
                        corollary_probability, expected_low_degree_count,
                        p_from_c, regular_closed_form, solve_p0)

__version__ = "0.1.0"
