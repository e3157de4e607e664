#!/usr/bin/env python3
"""Time the compiled kernels against the pure-Python fallback.

Usage:  python3 benchmarks/bench_kernels.py [--target 0.4]

The backend is frozen at import time (QLEV_PURE_PYTHON), so this script
spawns one worker subprocess per backend and compares the medians:

    $ python3 benchmarks/bench_kernels.py
    case                                  compiled        pure      speedup
    airy_pair x4                           11.4 us     181.3 us        15.9x
    ...

Repetition counts adapt to the measured cost so a slow fallback never
stalls the run; --target sets the time budget per case per backend.
"""

import argparse
import json
import os
import subprocess
import sys
import time

CASES = [
    "airy_pair x4",
    "ci_pair x4",
    "reflection_amplitude",
    "round_trip_factor",
]


def _per_call(fn, target: float) -> float:
    fn()  # warm up (imports, caches)
    t0 = time.perf_counter()
    fn()
    once = time.perf_counter() - t0
    reps = max(1, min(5000, int(target / max(once, 1e-9))))
    best = float("inf")
    for _ in range(3):
        t0 = time.perf_counter()
        for _ in range(reps):
            fn()
        best = min(best, (time.perf_counter() - t0) / reps)
    return best


def run_worker(target: float) -> None:
    from qlev import backend
    from qlev.potential import PhysicalSetup, load_preset
    from qlev.scatter import reflection_amplitude, round_trip_factor

    setup = PhysicalSetup()
    model = load_preset("perfect-mirror").model("v4")
    zs = [-8.0 + 0.0j, -2.3 + 0.4j, 3.0 - 1.0j, 7.5 + 6.0j]
    k = backend.kernels
    timings = {
        "airy_pair x4": _per_call(
            lambda: [k.airy_pair_kernel(z) for z in zs], target
        ),
        "ci_pair x4": _per_call(
            lambda: [k.ci_pair_kernel(z) for z in zs], target
        ),
        "reflection_amplitude": _per_call(
            lambda: reflection_amplitude(setup, model, energy=5.0 * setup.eps_g),
            target,
        ),
        "round_trip_factor": _per_call(
            lambda: round_trip_factor(setup, model, 2.3 * setup.eps_g), target
        ),
    }
    print(json.dumps({"compiled": backend.IS_COMPILED, "timings": timings}))


def run_backend(pure: bool, target: float) -> dict:
    env = dict(os.environ)
    env.pop("QLEV_PURE_PYTHON", None)
    if pure:
        env["QLEV_PURE_PYTHON"] = "1"
    proc = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--worker", "--target", str(target)],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    out = json.loads(proc.stdout.splitlines()[-1])
    if out["compiled"] == pure:
        raise RuntimeError(
            "worker picked the wrong backend (is the extension built?)"
        )
    return out["timings"]


def _fmt(seconds: float) -> str:
    if seconds < 1e-3:
        return f"{seconds * 1e6:9.1f} us"
    if seconds < 1.0:
        return f"{seconds * 1e3:9.2f} ms"
    return f"{seconds:9.3f} s "


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    ap.add_argument("--target", type=float, default=0.4,
                    help="time budget per case per backend, seconds")
    args = ap.parse_args()
    if args.worker:
        run_worker(args.target)
        return

    fast = run_backend(pure=False, target=args.target)
    slow = run_backend(pure=True, target=args.target)
    print(f"{'case':<28s}{'compiled':>12s}{'pure':>12s}{'speedup':>10s}")
    for case in CASES:
        ratio = slow[case] / fast[case]
        print(f"{case:<28s}{_fmt(fast[case]):>12s}{_fmt(slow[case]):>12s}{ratio:9.1f}x")


if __name__ == "__main__":
    main()
