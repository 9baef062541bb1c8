"""Simulator for chained-MZI counterfactual communication.

Propagates single-photon amplitudes through an MZI mesh, models the Zeno
protocol with heralding loss, detector efficiency, dark counts and
interferometer imperfections, and runs seeded bit/image transmission
experiments.
"""

from .backend import BACKEND
from .detection import (
    ClickProbabilities,
    NoiseParams,
    TrialRng,
    click_probabilities,
    sample_bit_transmission,
    sample_trials,
)
from .mesh import MeshCircuit, ModeState, MziNode, Role, node_unitary, propagate, total_unitary
from .messaging import (
    BitmapMessage,
    EncodingConfig,
    TransmissionReport,
    avg_bit_error,
    calibrate_p0_error,
    image_fidelity,
    optimal_m,
    transmit_message,
    violation_probability,
)
from .protocol import (
    PhotonOutcome,
    ProtocolSpec,
    build_circuit,
    chain_reflectivity,
    ideal_p1_error,
    p0_error_from_visibility,
    run_photon,
)

__version__ = "0.1.0"
