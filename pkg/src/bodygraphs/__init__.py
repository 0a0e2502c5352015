"""Contact, unit-distance and intersection graphs of translates of a
centrally symmetric convex body."""

from .bodies import (DegenerateBody, InvalidBody, Relation, SingularMap,
                     SymmetricBody, apply_linear, body_from_spec, body_to_spec,
                     disk_body, ellipse_body, has_urtc, regular_polygon,
                     square_body, symmetrize, translate_relation)
from .contact_witness import (AttachFailed, BeamTooShort, ContactWitness,
                              assemble_witness, auto_tune_k, build_ring_graph,
                              max_beam_extent, normalize_frame,
                              required_direction_count, signature_pin_identity,
                              standard_lattice, verify_rigidity)
from .graphs import (EmbeddedGraph, GraphKind, ManySolutions, NotCompatible,
                     NotTouching, PairTooClose, PointSet, build_eps_overlap,
                     build_graph, close_pairs, equidistant_points,
                     is_compatible, third_points)
from .intersection_witness import (Assembly, DepthTooSmall, NestedGadget,
                                   NoConvergence, RadialGadget, build_assembly,
                                   build_nested, build_radial, extract_overlap,
                                   perturb_and_check, refine_to_contact,
                                   standard_host, verify_alpha,
                                   verify_center_bounds, verify_nesting,
                                   verify_triangle_free, winding_fraction)
from .lattice import (Lattice, NotRigid, hexagon_sandwich_check,
                      is_lattice_unique, junction_point, lattice_disk,
                      lattice_distance, lattice_from, lattice_hull_body,
                      lattice_ring, reconstruct_map)
from .separation import (DirectionSet, SeparationCertificate, find_separation,
                         fit_linear_map, mapped_signatures,
                         signature_deviation, top_deviation_angles)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
