"""Compare the compiled engine with the pure-Python fallback.

Runs the same W scenario in two subprocesses, one with BJFRONT_NO_JIT=1,
and prints wall times (warm: compile time is measured separately) and
whether the two front tables agree bit for bit.

    python3 benchmarks/bench_jit.py [--t-end 800] [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import hashlib, json, sys, time
t0 = time.perf_counter()
from bjfront import JIT_ENABLED
from bjfront.scenarios import w_scenario
from bjfront.tracking import run_until
t_end, repeat = float(sys.argv[1]), int(sys.argv[2])
sim, _ = w_scenario()
run_until(sim, t_end)
first = time.perf_counter() - t0
best = float("inf")
for _ in range(repeat):
    t = time.perf_counter()
    sim, _ = w_scenario()
    run_until(sim, t_end)
    best = min(best, time.perf_counter() - t)
n = sim.n_rows
digest = hashlib.sha256(sim.fd[:n].tobytes() + sim.fi[:n].tobytes()).hexdigest()
print(json.dumps({"jit": JIT_ENABLED, "first": first, "best": best,
                  "events": sim.n_events, "digest": digest}))
"""


def run(no_jit, t_end, repeat):
    env = dict(os.environ)
    if no_jit:
        env["BJFRONT_NO_JIT"] = "1"
    else:
        env.pop("BJFRONT_NO_JIT", None)
    out = subprocess.run([sys.executable, "-c", CHILD, str(t_end), str(repeat)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--t-end", type=float, default=800.0)
    ap.add_argument("--repeat", type=int, default=3)
    a = ap.parse_args()
    jit = run(False, a.t_end, a.repeat)
    py = run(True, a.t_end, a.repeat)
    for name, r in (("numba", jit), ("python", py)):
        print(f"{name:7s} first run {r['first']:8.3f} s  warm {r['best']:8.4f} s  "
              f"events {r['events']}")
    print(f"speed-up (warm): {py['best'] / jit['best']:.1f}x")
    print("identical front tables:", jit["digest"] == py["digest"])


if __name__ == "__main__":
    main()
