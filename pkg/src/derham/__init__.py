"""derham: computational exterior calculus around the regularized Poincare
and Bogovskii integral operators on differential forms in R^n."""

__version__ = "0.1.0"

from .exterior import (Blade, ExtElement, all_blades, contract, hodge_star,
                       inner, wedge)
from .polynomials import RationalPoly
from .forms import (PolyForm, QSpaceSpec, coderivative, exterior_d, koszul,
                    pullback_dilation, q_complex_3d, qspace_membership,
                    form_from_json, form_to_json)
from .bumps import ThetaBump, make_radial_bump, make_tensor_bump, theta_pair
from .poincare import (PoincareContext, check_qspace_preservation,
                       homotopy_defect_R, poincare_R, poincare_unregularized,
                       starlike_solve)
from .sampled import SampledForm, poly_bump_form, poly_plateau_form
from .bogovskii import (BogovskiiContext, adjoint_pairings, bogovskii_T,
                        homotopy_residual_T, kernel_G, kernel_G_homogeneous,
                        poincare_R_numeric)
from .symbol import SymbolProbe, decay_scan, k1hat, smooth_part_k0
from .glue import (Box, BoxUnionDomain, CoverContext, composite_R, composite_T,
                   l_domain_cover, remainder_K, remainder_L, single_box_cover,
                   u_domain_cover)
from .suites import run_suite
