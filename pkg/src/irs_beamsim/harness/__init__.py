from .config import ScenarioConfig, load_config, noise_power
from .experiment import ExperimentResult, apply_location_error, run_experiment, write_results
