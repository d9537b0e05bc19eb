"""Special-symbol presentations and boundary coding for relatively hyperbolic groups.

Modules
-------
graphs         finite graphs, coned-off Cayley balls, distances, four-point delta
geometry       angles, circuits, fineness, cones, large-angle triangles, visibility
cocycles       radial and Busemann cocycles, gradient lines, restriction letters
sft            cylinders, local admissibility, enumeration, the shift action
presentations  finite groups, products, finite-index lifts, the nerve check
boundary       the boundary subshift: alphabet, cylinder, encode, globalise, Pi
"""
from .graphs import (INF, Graph, build_coned_cayley_ball, build_test_graph, delta_estimate, distance, geodesics,
                     gromov_product)
from .geometry import (angle, circuit_angle_bound_check, circuits_through, cone, fineness_certificate,
                       check_large_angle_triangle, path_max_angle, visibility_ray)
from .cocycles import busemann_cocycle, gradient_lines, radial_cocycle, restrict, verify_cocycle_axioms
from .sft import (NO_SYMBOL, Alphabet, Configuration, Cylinder, Presentation, act, enumerate_admissible,
                  is_locally_admissible, pi_window, special_symbol_count, z_example_subshift)
from .presentations import (check_generation, finite_group_presentation, finite_index_presentation,
                            poly_hyperbolic_compose, product_presentation)
from .boundary import (encode, expansivity_witness, free_product_instance, globalise, hyperbolic_presentation,
                       pi_map, trace_gradient)

__version__ = "0.1.0"

__all__ = [
    "INF", "Graph", "build_coned_cayley_ball", "build_test_graph", "delta_estimate", "distance", "geodesics",
    "gromov_product",
    "angle", "circuit_angle_bound_check", "circuits_through", "cone", "fineness_certificate",
    "check_large_angle_triangle", "path_max_angle", "visibility_ray",
    "busemann_cocycle", "gradient_lines", "radial_cocycle", "restrict", "verify_cocycle_axioms",
    "NO_SYMBOL", "Alphabet", "Configuration", "Cylinder", "Presentation", "act", "enumerate_admissible",
    "is_locally_admissible", "pi_window", "special_symbol_count", "z_example_subshift",
    "check_generation", "finite_group_presentation", "finite_index_presentation", "poly_hyperbolic_compose",
    "product_presentation",
    "encode", "expansivity_witness", "free_product_instance", "globalise", "hyperbolic_presentation", "pi_map",
    "trace_gradient",
]
