"""
Replaying a recorded evaluation
===============================

The shipped run configuration pairs two mock models with the three prompt
modes over the twelve benchmark items. Every completion is in the recorded
cache, so this runs offline and gives the same numbers every time.
"""

import tempfile

from sdvbench import DATA_DIR
from sdvbench.runner import (
    RunConfig,
    ablate,
    aggregate,
    compare,
    render_report,
    run,
    save_results,
    select,
    significance_table,
)

cfg = RunConfig.load(DATA_DIR / "run.json")
ctx, bench = cfg.context(offline=True)
results = run(cfg.matrix(bench), ctx)
print(len(results), "results;", ctx.gateway.provider_calls, "provider calls")

# per-cell details survive: attempts used and whether the final answer parsed
retried = [r for r in results if r.attempts > 1]
print(len(retried), "cells needed more than one attempt")

rows = aggregate(results)
pv = significance_table(results, rows, mode="baseline")
print(render_report(rows, "md", pvalues=pv))

# a single paired comparison
few = select(results, "mock-a", "few-shot")
zero = select(results, "mock-a", "zero-shot")
print(compare(few, zero, test="wilcoxon", metric="codebleu", label="few-shot vs zero-shot"))

# which prompt sections carry the score
abl = ablate(cfg.ablation_model(), cfg.ablation_subsets(), bench, ctx, cfg.weights)
print(render_report(abl, "md", key_names=("prompt",)))

with tempfile.TemporaryDirectory() as out:
    print("saved to", save_results(results, out))
