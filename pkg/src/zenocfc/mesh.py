"""Single-photon linear optics on a programmable MZI mesh.

Each node is parameterized by its mixing angle ``theta`` (reflectivity
``R = cos(theta)**2``, the probability of staying in the incident mode) and an
external phase ``phi`` applied to the upper input.  The transfer matrix is

    U(theta, phi) = [[cos(theta) e^{i phi},  i sin(theta)],
                     [i sin(theta) e^{i phi}, cos(theta)]]

so a Mirror (theta=0) is the identity and a Swap (theta=pi/2) is ``i X``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import backend

HALF_PI = math.pi / 2
_ANGLE_SLACK = 1e-12


class Role(enum.Enum):
    MIRROR = "mirror"
    SWAP = "swap"
    BEAMSPLITTER = "beamsplitter"
    CUSTOM = "custom"


@dataclass(frozen=True)
class MziNode:
    column: int
    upper_mode: int
    mixing_angle: float
    phase: float = 0.0
    role: Role = Role.CUSTOM

    def __post_init__(self):
        if self.column < 0:
            raise ValueError(f"column must be >= 0, got {self.column}")
        if self.upper_mode < 0:
            raise ValueError(f"upper_mode must be >= 0, got {self.upper_mode}")
        if not (-_ANGLE_SLACK <= self.mixing_angle <= HALF_PI + _ANGLE_SLACK) or not math.isfinite(
            self.mixing_angle
        ):
            raise ValueError(f"mixing_angle {self.mixing_angle!r} outside [0, pi/2]")
        if self.role is Role.MIRROR and self.mixing_angle != 0.0:
            raise ValueError("Mirror nodes must have mixing_angle 0")
        if self.role is Role.SWAP and self.mixing_angle != HALF_PI:
            raise ValueError("Swap nodes must have mixing_angle pi/2")

    @classmethod
    def mirror(cls, column: int, upper_mode: int) -> "MziNode":
        return cls(column, upper_mode, 0.0, 0.0, Role.MIRROR)

    @classmethod
    def swap(cls, column: int, upper_mode: int) -> "MziNode":
        return cls(column, upper_mode, HALF_PI, 0.0, Role.SWAP)

    @classmethod
    def beamsplitter(cls, column: int, upper_mode: int, n: int) -> "MziNode":
        """Node with reflectivity cos^2(pi / 2n), as used in an n-stage chain."""
        if n < 1:
            raise ValueError(f"beamsplitter chain length must be >= 1, got {n}")
        return cls(column, upper_mode, math.pi / (2 * n), 0.0, Role.BEAMSPLITTER)

    @property
    def modes(self) -> tuple[int, int]:
        return (self.upper_mode, self.upper_mode + 1)

    @property
    def reflectivity(self) -> float:
        return math.cos(self.mixing_angle) ** 2


def node_unitary(node: MziNode) -> np.ndarray:
    theta = node.mixing_angle
    if not (-_ANGLE_SLACK <= theta <= HALF_PI + _ANGLE_SLACK):
        raise ValueError(f"mixing_angle {theta!r} outside [0, pi/2]")
    c, s = math.cos(theta), math.sin(theta)
    ph = complex(math.cos(node.phase), math.sin(node.phase))
    return np.array([[c * ph, 1j * s], [1j * s * ph, c]], dtype=np.complex128)


@dataclass(frozen=True)
class MeshCircuit:
    """Columns of MZI nodes acting on ``num_modes`` waveguides.

    Nodes inside one column act on disjoint mode pairs, so their order
    within the column does not matter.
    """

    num_modes: int
    columns: tuple[tuple[MziNode, ...], ...] = ()
    _flat: tuple = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.num_modes < 2:
            raise ValueError(f"num_modes must be >= 2, got {self.num_modes}")
        cols = tuple(tuple(col) for col in self.columns)
        object.__setattr__(self, "columns", cols)
        for ci, col in enumerate(cols):
            used: set[int] = set()
            for node in col:
                lo, hi = node.modes
                if hi >= self.num_modes:
                    raise ValueError(f"node on modes {node.modes} outside [0, {self.num_modes})")
                if lo in used or hi in used:
                    raise ValueError(f"column {ci} has overlapping nodes on mode {lo if lo in used else hi}")
                used.update((lo, hi))
        object.__setattr__(self, "_flat", tuple(_flatten(col) for col in cols))

    @classmethod
    def from_nodes(cls, num_modes: int, nodes: Sequence[MziNode]) -> "MeshCircuit":
        """Group nodes into columns by their ``column`` index."""
        if not nodes:
            return cls(num_modes, ())
        depth = max(n.column for n in nodes) + 1
        cols: list[list[MziNode]] = [[] for _ in range(depth)]
        for n in nodes:
            cols[n.column].append(n)
        return cls(num_modes, tuple(tuple(c) for c in cols))

    @property
    def depth(self) -> int:
        return len(self.columns)

    def nodes(self):
        for col in self.columns:
            yield from col

    def apply_columns(self, state: np.ndarray, start: int = 0, stop: int | None = None) -> np.ndarray:
        """Apply columns ``start:stop`` in place to a (W,) or (W, K) array."""
        stop = self.depth if stop is None else stop
        view = state.reshape(self.num_modes, -1)
        for flat in self._flat[start:stop]:
            if flat[0].shape[0]:
                backend.apply_nodes(view, *flat)
        return state


def _flatten(col):
    uppers = np.array([n.upper_mode for n in col], dtype=np.int64)
    theta = np.array([n.mixing_angle for n in col], dtype=np.float64)
    phase = np.array([n.phase for n in col], dtype=np.float64)
    return (uppers, np.cos(theta), np.sin(theta), np.cos(phase), np.sin(phase))


@dataclass(frozen=True)
class ModeState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1:
            raise ValueError("amplitudes must be a 1-d vector")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, num_modes: int, mode: int) -> "ModeState":
        v = np.zeros(num_modes, dtype=np.complex128)
        v[mode] = 1.0
        return cls(v)

    @property
    def num_modes(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def propagate(circuit: MeshCircuit, input: ModeState) -> ModeState:
    if input.num_modes != circuit.num_modes:
        raise ValueError(f"state has {input.num_modes} modes, circuit has {circuit.num_modes}")
    work = np.array(input.amplitudes, dtype=np.complex128)
    circuit.apply_columns(work)
    return ModeState(work)


def total_unitary(circuit: MeshCircuit) -> np.ndarray:
    u = np.eye(circuit.num_modes, dtype=np.complex128)
    circuit.apply_columns(u)
    return u
