"""Link-level simulator for buffer-aided cooperative MIMO relay selection."""
from .analysis import mmd_op_count, mmd_vs_qn_pep, pep_worst_case, q_function, qn_op_count
from .channel import CSIModel, draw_noise, draw_slot_channels
from .constellation import build_constellation, difference_set, enumerate_candidates
from .detection import ml_detect
from .experiment import ExperimentConfig, load_config, run_campaign, run_pep_campaign
from .protocol import Network, initialize_buffers, run_slot
from .selection import VARIANTS, d_min, decide_slot, pairwise_distance, qn_metric

__version__ = "0.1.0"
