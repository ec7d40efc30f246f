# Do not delete this file. It tells python that hspheres is a module you can import from.
#public facing functions should be imported here so they can be used directly
name = "hspheres"
__version__ = '0.1.0'
from .profile import ShootingParams, SolverConfig, ProfileCurve, Termination
from .profile import integrate_profile, conserved_residual, apply_scaling, reflect_profile
from .analysis import CurveClass, EndpointData, classify, endpoint_extrapolate
from .analysis import curvature_fields, rme_residual, el_residual
from .search import scan, bracket_and_refine, find_spheres, asymmetric_pair_search
from .surface import Cap, ClosedSurface, glue, symmetric_surface, regularity_report
from .surface import surface_integral, rescaling_integral, helfrich_energy, revolve_mesh
from .discoid import DiscoidSpec, discoid_profile, discoid_H, discoid_el_residual, boundary_flux
