"""Compare the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from zenocfc import _fallback, _rng
from zenocfc.protocol import ProtocolSpec, build_circuit

try:
    from zenocfc import _kernels
except ImportError:
    _kernels = None


def click_case(trials, m, p):
    keys = _rng.stream_keys(1, np.arange(trials, dtype=np.uint64))
    offsets = np.zeros(trials, dtype=np.uint64)
    probs = np.full(trials, p)
    return lambda mod: mod.any_click(keys, offsets, m, probs)


def optics_case(n, batch):
    circuit = build_circuit(ProtocolSpec(n, 0, visibility=0.999)).circuit
    flat = [f for f in circuit._flat if f[0].shape[0]]

    def run(mod):
        state = np.zeros((circuit.num_modes, batch), dtype=np.complex128)
        state[0] = 1.0
        for f in flat:
            mod.apply_nodes(state, *f)

    return run


CASES = {
    "clicks 1e5 x M=320, p=0.0178": click_case(100_000, 320, 0.0178),
    "clicks 1e5 x M=320, p=1.35e-4": click_case(100_000, 320, 1.35e-4),
    "clicks 1024 x M=500, p=0.0178": click_case(1024, 500, 0.0178),
    "optics N=6, 1 state": optics_case(6, 1),
    "optics N=50, 4096 states": optics_case(50, 4096),
}


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    mods = [("python", _fallback)] + ([("compiled", _kernels)] if _kernels else [])
    print(f"{'case':34s} " + " ".join(f"{name:>12s}" for name, _ in mods) + "   speedup")
    for label, fn in CASES.items():
        times = []
        for _, mod in mods:
            number = 1
            while True:
                t = timeit.timeit(lambda: fn(mod), number=number)
                if t > 0.2 or number >= 10_000:
                    break
                number *= 4
            best = min(timeit.repeat(lambda: fn(mod), number=number, repeat=args.repeat)) / number
            times.append(best)
        speed = f"{times[0] / times[1]:8.1f}x" if len(times) == 2 else ""
        print(f"{label:34s} " + " ".join(f"{t * 1e3:10.3f}ms" for t in times) + f"  {speed}")


if __name__ == "__main__":
    main()
