"""Compare the compiled and pure-Python search kernels.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Both backends must return identical results; the script exits nonzero otherwise.
"""

from __future__ import annotations

import argparse
import random
import sys
import time

from hltrees import kernels


def _random_mem(b: int, height: int, p: float, rng: random.Random) -> list:
    return [bytearray(1 if rng.random() < p else 0 for _ in range(b**n)) for n in range(height)]


def _cases(seed: int) -> list:
    rng = random.Random(seed)
    cases = []
    for b, h, ls in [(2, 10, (1, 4, 7, 9)), (3, 7, (0, 2, 4, 6)), (2, 12, (0, 3, 6, 9, 11))]:
        mems = [_random_mem(b, h, 0.7, rng) for _ in range(20)]
        cases.append((f"d1_least b={b} h={h} L={ls} x20", "d1", (b, ls, mems)))
    cases.append(("adversary_d1 b=2 k=2 L=(1,2,3,4) eps=1/2", "adv", (2, 2, (1, 2, 3, 4), [1, 2, 4, 8])))
    cases.append(("adversary_d1 b=2 k=3 L=(0,1,2,3) eps=1/2", "adv", (2, 3, (0, 1, 2, 3), [1, 1, 2, 4])))
    return cases


def _run(mod, kind, payload):
    if kind == "d1":
        b, ls, mems = payload
        return [mod.d1_least(m, b, ls) for m in mems]
    b, k, levels, need = payload
    status, ce, units = mod.adversary_d1(b, k, levels, need, 10**9)
    return status, [tuple(x) for x in ce] if ce else ce, units


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    backends = {"python": kernels.backend("python")}
    try:
        backends["cython"] = kernels.backend("cython")
    except ImportError:
        print("compiled extension not built; timing the Python kernels only")

    mismatch = False
    print(f"{'case':48} " + " ".join(f"{n:>10}" for n in backends) + "   speedup")
    for name, kind, payload in _cases(args.seed):
        times, results = {}, {}
        for bname, mod in backends.items():
            best = float("inf")
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                results[bname] = _run(mod, kind, payload)
                best = min(best, time.perf_counter() - t0)
            times[bname] = best
        same = len({repr(r) for r in results.values()}) == 1
        mismatch |= not same
        speed = f"{times['python'] / times['cython']:8.1f}x" if "cython" in times else "       -"
        row = " ".join(f"{times[n] * 1e3:8.2f}ms" for n in backends)
        print(f"{name:48} {row} {speed}{'' if same else '  MISMATCH'}")
    return 1 if mismatch else 0


if __name__ == "__main__":
    sys.exit(main())
