"""Special Killing forms on T(1,1) from toric data, verified numerically.

The package builds the Sasaki-Einstein geometry of T(1,1) and its Calabi-Yau
cone (the conifold), derives complex coordinates from the toric symplectic
potential, constructs the candidate Killing forms, and checks every defining
identity pointwise with forward-mode automatic differentiation.
"""

from .chart import Chart, ChartPoint, cone_chart, sample_points, t11_chart
from .exterior import (DiffForm, ScalarField, VectorField, codifferential,
                       exterior_derivative, hodge_star, interior_product,
                       musical_flat, wedge)
from .killing import (KillingCandidate, StackelKillingTensor, all_candidates,
                      canonical_forms, cone_lift, contact_form_t11,
                      extract_base_form, holomorphic_volume_form,
                      re_im_psi_closed_forms, reeb_field_t11, stackel_killing)
from .metric import (MetricField, christoffel, cone_metric,
                     covariant_derivative_form, einstein_residual, ricci,
                     t11_metric)
from .potential import (SymplecticPotential, complex_coords_t11, eval_G,
                        grad_G, hessian_G, legendre_F, reeb_search,
                        ricci_flat_residual)
from .report import ResidualReport
from .toric import (ToricData, UnimodularTransform, apply_transform,
                    conifold_toric_data, facet_functions, in_cone_interior,
                    is_gorenstein, momentum_map_t11)
from .verify import (GeodesicTrajectory, cky_residual,
                     conserved_quantity_drift, geodesic_flow, kahler_checks,
                     killing_yano_residual, parallel_residual,
                     special_killing_fit)

__version__ = "0.1.0"
