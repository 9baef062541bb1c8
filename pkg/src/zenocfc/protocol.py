"""Chained-MZI counterfactual communication circuit and per-photon outcomes.

Mode layout (W = 3):

    0  transmission channel; Alice's detector D_A sits at its end
    1  Bob's arm; D_B sits at its end
    2  Bob's out-route, emptied after every Bob column

Columns alternate beamsplitter (0,1) and Bob node (1,2), N of each.  For
logic 0 Bob's nodes are mirrors and the N beamsplitters compose to ``iX``,
sending the photon to D_B.  For logic 1 they are swaps, so Bob's arm is
emptied after each beamsplitter and the photon stays in the channel with
probability ``R**N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .mesh import HALF_PI, MeshCircuit, MziNode, Role

ALICE_MODE = 0
BOB_MODE = 1
DUMP_MODE = 2
NUM_MODES = 3

VISIBILITY_MODELS = ("worst-case", "random")


def chain_reflectivity(n: int) -> float:
    if n < 2:
        raise ValueError(f"need at least 2 beamsplitters, got N={n}")
    return math.cos(math.pi / (2 * n)) ** 2


def ideal_p1_error(n: int) -> float:
    """Probability the photon misses D_A when Bob sends 1, with perfect optics."""
    return 1.0 - chain_reflectivity(n) ** n


def visibility_offset(visibility: float) -> float:
    """Mixing-angle error whose leakage matches the visibility: sin^2 = (1-V)/2."""
    if not (0.5 < visibility <= 1.0):
        raise ValueError(f"visibility must be in (0.5, 1], got {visibility}")
    return math.asin(math.sqrt((1.0 - visibility) / 2.0))


@dataclass(frozen=True)
class ProtocolSpec:
    num_beamsplitters: int
    bob_bit: int
    visibility: float = 1.0
    swap_backscatter: float = 0.0
    ideal: bool = False
    visibility_model: str = "worst-case"
    noise_seed: int = 0

    def __post_init__(self):
        if self.num_beamsplitters < 2:
            raise ValueError(f"need at least 2 beamsplitters, got N={self.num_beamsplitters}")
        if self.bob_bit not in (0, 1):
            raise ValueError(f"bob_bit must be 0 or 1, got {self.bob_bit!r}")
        if not (0.0 <= self.visibility <= 1.0):
            raise ValueError(f"visibility must be in [0, 1], got {self.visibility}")
        if not (0.0 <= self.swap_backscatter <= 1.0):
            raise ValueError(f"swap_backscatter must be in [0, 1], got {self.swap_backscatter}")
        if self.ideal and (self.visibility != 1.0 or self.swap_backscatter != 0.0):
            raise ValueError("ideal spec requires visibility=1 and swap_backscatter=0")
        if self.visibility_model not in VISIBILITY_MODELS:
            raise ValueError(f"unknown visibility_model {self.visibility_model!r}")

    def with_bit(self, bit: int) -> "ProtocolSpec":
        return replace(self, bob_bit=bit)


@dataclass(frozen=True)
class CompiledProtocol:
    circuit: MeshCircuit
    collapse_after: tuple[int, ...]
    bob_columns: tuple[int, ...]
    dump_modes: tuple[int, ...] = (DUMP_MODE,)


def _perturb(theta: float, delta: float) -> float:
    # reflect back into [0, pi/2]; cos^2 is symmetric about both ends
    t = theta + delta
    if t < 0.0:
        t = -t
    if t > HALF_PI:
        t = math.pi - t
    return t


def build_circuit(spec: ProtocolSpec) -> CompiledProtocol:
    n = spec.num_beamsplitters
    delta = 0.0 if spec.visibility == 1.0 else visibility_offset(spec.visibility)
    if spec.visibility_model == "random" and delta:
        signs = np.random.default_rng(spec.noise_seed).choice((-1.0, 1.0), size=2 * n)
    else:
        signs = np.ones(2 * n)

    nodes: list[MziNode] = []
    for k in range(n):
        col = 2 * k
        bs = MziNode.beamsplitter(col, ALICE_MODE, n)
        if delta:
            bs = MziNode(col, ALICE_MODE, _perturb(bs.mixing_angle, signs[col] * delta), 0.0, Role.CUSTOM)
        nodes.append(bs)

        col += 1
        if spec.bob_bit == 0:
            bob = MziNode.mirror(col, BOB_MODE)
        elif spec.swap_backscatter > 0.0:
            # leaky swap: amplitude sqrt(eps) stays in Bob's arm and re-enters the chain
            bob = MziNode(col, BOB_MODE, math.acos(math.sqrt(spec.swap_backscatter)), 0.0, Role.CUSTOM)
        else:
            bob = MziNode.swap(col, BOB_MODE)
        if delta:
            bob = MziNode(col, BOB_MODE, _perturb(bob.mixing_angle, signs[col] * delta), 0.0, Role.CUSTOM)
        nodes.append(bob)

    circuit = MeshCircuit.from_nodes(NUM_MODES, nodes)
    bob_cols = tuple(range(1, 2 * n, 2))
    return CompiledProtocol(circuit, collapse_after=bob_cols, bob_columns=bob_cols)


@dataclass(frozen=True)
class PhotonOutcome:
    p_alice: float
    p_bob: float
    p_lost: float
    p_violation_amp: float

    @property
    def total(self) -> float:
        return self.p_alice + self.p_bob + self.p_lost


def run_photon(spec: ProtocolSpec) -> PhotonOutcome:
    """Propagate one photon from Alice's input, collapsing Bob's out-route.

    For logic 1 the violation term sums ``eps * |Bob-arm amplitude|^2`` at
    every Bob node, the weight that re-enters the transmission line.  For
    logic 0 it is the probability of reaching D_A, i.e. leakage back into
    Alice's laboratory.
    """
    compiled = build_circuit(spec)
    circuit = compiled.circuit
    amps = np.zeros(NUM_MODES, dtype=np.complex128)
    amps[ALICE_MODE] = 1.0
    lost = 0.0
    backscatter = 0.0
    collapse = set(compiled.collapse_after)
    bob_cols = set(compiled.bob_columns)
    for ci in range(circuit.depth):
        if spec.bob_bit == 1 and ci in bob_cols:
            backscatter += spec.swap_backscatter * abs(amps[BOB_MODE]) ** 2
        circuit.apply_columns(amps, ci, ci + 1)
        if ci in collapse:
            for m in compiled.dump_modes:
                lost += abs(amps[m]) ** 2
                amps[m] = 0.0
    p_alice = float(abs(amps[ALICE_MODE]) ** 2)
    p_bob = float(abs(amps[BOB_MODE]) ** 2)
    lost += float(np.sum(np.abs(np.delete(amps, [ALICE_MODE, BOB_MODE])) ** 2))
    violation = p_alice if spec.bob_bit == 0 else float(backscatter)
    return PhotonOutcome(p_alice, p_bob, float(lost), violation)


def p0_error_from_visibility(n: int, visibility: float, model: str = "worst-case", seed: int = 0) -> float:
    """Per-photon probability of a D_A click when Bob sends 0 through imperfect MZIs."""
    visibility_offset(visibility)  # domain check
    spec = ProtocolSpec(n, 0, visibility=visibility, visibility_model=model, noise_seed=seed)
    return run_photon(spec).p_alice
