#!/usr/bin/env python3
"""One experiment end to end: gen, preprocess, analyze, attack, report.

Everything lands in an output directory with per-stage artifact files and a
hash per stage, so re-running the same config is a no-op.  The same flow is
available as `lwelab run --config <file>`.
"""

import tempfile
from pathlib import Path

from lwelab.pipeline import parse_config, run_experiment

CONFIG = """
lwe.n = 16
lwe.q = 521
lwe.sigma_e = 1.0
secret.dist = ternary
secret.h = 2
secret.seed = 1
samples.seed = 2
reduction.beta1 = 4
reduction.beta2 = 6
reduction.delta1 = 0.96
reduction.delta2 = 0.99
reduction.max_tours = 3
reduction.target_count = 256
reduction.seed = 3
tokens.export = true
recovery.oracle = cheat
recovery.h_max = 3
recovery.seed = 4
out = demo-run
"""

cfg = parse_config(CONFIG)
print(f"experiment: n={cfg.n}, q={cfg.q}, {cfg.dist.value} secret h={cfg.h}, "
      f"oracle={cfg.oracle}")

out = Path(tempfile.mkdtemp()) / "demo-run"
report = run_experiment(cfg, out_dir=out)
print(f"\nstage timings (total {report.total_seconds:.1f}s):")
for stage in report.stages:
    print(f"  {stage.name:<14} {stage.status:<7} {stage.seconds:6.2f}s  "
          + " ".join(f"{k}={v}" for k, v in list(stage.details.items())[:3]))

print("\nartifacts in", out)
for f in sorted(p.name for p in out.iterdir()):
    print("  ", f)

again = run_experiment(cfg, out_dir=out)
print(f"\nre-run with the same config: "
      f"{sum(s.status == 'cached' for s in again.stages)}/{len(again.stages)} "
      f"stages cached, {again.total_seconds:.2f}s")
