"""Small versions of the two simulation studies, summarized by variant."""

from mixdist.simulation import run_retrieval, run_variable_effects, summarize

effects = run_variable_effects(reps=5, n=200, seed=0)
print("relative distance effect of each variable (median over replications)")
for s in summarize([r for r in effects if r["metric"] == "rel_distance"]):
    if s["variant"] in ("gower", "unbiased_independent", "naive"):
        print(f"  {s['variant']:<22} {s['variable']:<5} {s['median']:.3f}")

retrieval = run_retrieval(reps=5, n=200, qs=(2, 5), seed=0)
print("\nalienation from the planted configuration")
for s in summarize(retrieval, by=("variant", "q")):
    print(f"  {s['variant']:<24} q={s['q']}  median {s['median']:.3f}  iqr {s['iqr']:.3f}")
