# All seven adaptation strategies on a synthetic 77-project set, K = 1..3.

from mteba import synthetic
from mteba.adaptation import STRATEGIES, EstimationStrategy
from mteba.evaluation import boxplot_stats, run_experiment, wilcoxon_signed_rank

d = synthetic.make_dataset(77, seed=0)

print(f"{'strategy':<10}{'K':>3}{'MMRE%':>8}{'MdMRE%':>8}{'PRED%':>8}")
reports = {}
for name in STRATEGIES:
    for k in (1, 2, 3):
        s = EstimationStrategy(name, k)
        if (s.name, s.k) in reports:  # r-eba always runs with one analogy
            continue
        rep = run_experiment(d, s, seed=0)
        reports[s.name, s.k] = rep
        print(f"{s.name:<10}{s.k:>3}{100 * rep.mmre:>8.1f}{100 * rep.mdmre:>8.1f}{rep.pred25:>8.1f}")

# paired test on absolute residuals; negative z favours the first argument
mt, eba = reports["mt-eba", 2], reports["eba", 2]
res = wilcoxon_signed_rank(mt.residuals, eba.residuals)
print(f"\nmt-eba vs eba (K=2): z = {res.z:.2f}, p = {res.p:.4f}")

b = boxplot_stats(mt.residuals)
print("mt-eba residual box:", round(b.q1), round(b.median), round(b.q3), "outliers", len(b.outliers))
