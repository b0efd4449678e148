"""Relativistic collapse geometry, photon-pair experiment planning and
Monte Carlo of double measurements on one uncollapsed entangled pair."""

__version__ = "0.1.0"

from .spacetime import (C, Boost, Event, Interval, boost_event, interval,  # noqa: E402
                        inverse_boost, stable_gamma_quantities)
from .collapse_geometry import (BackwardLightCone, Bounds, CollapseLine,  # noqa: E402
                                MeasurementSpec, ObserverFrame, PreferredFrame, Region,
                                RegionKind, UnsupportedScopeError, boost_measurement,
                                classify_point, collapse_line, collapse_speed, region_map,
                                second_measurement_allowed, window_duration)
from .planner import (ExperimentParams, ExperimentPlan, detection2_event,  # noqa: E402
                      detector2_worldline, feasibility, plan, point_A, source_placement)
from .two_photon import (FinalStateRule, JointDensity, Polarization,  # noqa: E402
                         PolarizationState, TwoPhotonAmplitude, density_correlated,
                         density_factorized, density_grid, energy_sum_residual, entangled_pair_state,
                         mean_energy, project_polarization)
from .simulation import (MeasurementModel, SimulationConfig, SimulationReport,  # noqa: E402
                         compare, run)
