"""Numerical toolkit for U(2)-invariant asymptotically Euclidean Kahler
metrics on C^2: metric and curvature data from radial potentials, ADM mass
by independent routes, and verification of the mass inequality on three
explicit families.
"""

from .curvature import (
    CurvatureSample,
    ricci_eigenvalues,
    ricci_lower_bound,
    riemannian_scalar,
    scalar_curvature,
)
from .errors import (
    EvaluationError,
    ExactlyFlat,
    ExtrapolationUnreliable,
    GrammarError,
    InvalidDensity,
    KahlerAEError,
    NotIntegrable,
    NotKaehlerHere,
    ToleranceFailure,
    UnsupportedPair,
)
from .expressions import Expr
from .families import (
    FamilySpec,
    closed_form_oracle,
    euclidean_profile,
    family_report,
    make_profile,
    sweep,
)
from .jets import Jet, jet_lift
from .mass import (
    MassReport,
    adm_flux_at_radius,
    adm_mass,
    mass_inequality_report,
    mass_scalar_integral,
    theorem11_rhs,
)
from .mongeampere import VolumeDensity, solve_potential, verify_volume
from .profiles import (
    DecayEstimate,
    MetricSample,
    RadialProfile,
    check_positivity,
    estimate_decay,
    metric_matrix,
    profile_from_json,
    profile_to_json,
    real_metric_tensor,
)
from .quadrature import QuadratureSpec, integrate, integrate_2d
from .realgeom import (
    ConnectionSample,
    christoffels,
    coordinate_hessian_norms,
    radial_length,
)

__version__ = "0.1.0"
