"""Equivariant Gromov-Hausdorff machinery for finite metric spaces with finite isometry groups."""

from .metric import (TOL, FiniteMetricSpace, IsometryGroup, StructuralError, ValidationReport,
                     isometry_group, subgroup_closure, trivial_group, uniform_metric,
                     validate_space)
from .triples import (ApproxTriple, CeilingViolation, CertificateReport, DiagramSpec,
                      PreconditionError, almost_inverse, compose_triples, diagram_defect,
                      identity_triple, inverse_certificate, map_order, perturb_theta,
                      theta_as_approximation, triple_order)
from .solver import (DistanceCertificate, SearchConfig, basepoint_repair, best_theta_for_f,
                     egh_distance, pullback_action)
from .smoothing import (BumpSpec, EmbeddedGroup, NetSpec, default_embedding, greedy_net,
                        smooth_theta)
from .quotients import (ConvergenceScenario, QuotientSpace, coset_space, induced_coset_map,
                        orbit_space, perturb_space, run_scenario, spread_theta)

__version__ = "0.1.0"
