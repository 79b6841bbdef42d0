"""Seeded Monte Carlo experiments with CSV and JSON output.

The same runs are available from the shell, for example
``hyperdrones isolation-sweep --n 400 800 --d-r 3 --theta 1 --c 1 --reps 20``.
"""
from hyperdrones import ExperimentConfig, run, write_outputs

cfg = ExperimentConfig("isolation-sweep", n_values=[400, 800, 1600], d_r=3.0, theta=1.0, c=1.0,
                       replications=20, seed=7, out="demo-results")
result = run(cfg)
for params in result.param_sets():
    measured = result.per_rep("isolated_fraction", params).mean()
    bound = result.metric("bound_sum", params)[0].value
    print(f"{params}: measured {measured:.4f}, bound {bound:.4f}")

print("wrote", write_outputs(result))
print("rerun identical:", run(cfg).csv_text() == result.csv_text())
