from .config import Experiment, ExperimentConfig
from .counting import ORACLES, CountOracle, count_rational_points
from .experiments import orbit_census, run, run_count, run_height_scaling, run_nt_scaling

__all__ = ["Experiment", "ExperimentConfig", "ORACLES", "CountOracle", "count_rational_points",
           "orbit_census", "run", "run_count", "run_height_scaling", "run_nt_scaling"]
