"""Mean coherence and success probability across sweep times for random QUBOs.

A scaled-down ensemble (5 instances, 8 sweep times) through the same
orchestrator the CLI uses; writes qubo_hierarchy.csv and two SVG figures.
The full-size study is `cdqc run` with a larger config.

Run: python3 demos/qubo_hierarchy.py
"""

from pathlib import Path

from cdqc.experiment import ExperimentConfig, format_summary, run_experiment
from cdqc.plots import plot_results

here = Path(__file__).parent
cfg = ExperimentConfig(
    family="RandomQubo", n_qubits=6, ensemble_size=5, seed_base=0,
    t_delta={"min": 0.01, "max": 100, "points": 8},
    output=str(here / "qubo_hierarchy.csv"),
)
result = run_experiment(cfg)
print(format_summary(result.summary))
for kind in ("cp-vs-tdelta", "cp-vs-success"):
    print("wrote", plot_results(cfg.output, kind, here / f"qubo_{kind}.svg"))
