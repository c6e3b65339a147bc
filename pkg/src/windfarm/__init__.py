"""Wind-farm monitoring toolkit.

Subpackages cover wind/turbine modeling, UAV kinematics, quantized recurrent
wind forecasting, yaw set-point control, and wind-aware inspection routing.
"""

__version__ = "0.1.0"

from .wind import (  # noqa: F401
    WindVector,
    WindAngles,
    WindDecomposition,
    TurbineSpec,
    wind_vector,
    met_to_polar,
    polar_to_met,
    effective_wind,
    turbine_power,
    default_cp,
    ConstantCp,
    AnalyticCp,
)
from .kinematics import (  # noqa: F401
    UavSpec,
    VelocityTriangle,
    FlyingRange,
    ground_velocity,
    flight_time,
    drifted_center,
    in_effective_range,
)
from .routing import (  # noqa: F401
    RoutePlan,
    build_time_matrix,
    cluster_assign,
    plan_inspection,
    solve_atsp_exact,
    solve_atsp_heuristic,
    split_route,
)
from .yaw import YawDecision, energy_over_horizon, optimize_yaw, realized_power  # noqa: F401
