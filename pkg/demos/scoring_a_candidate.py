"""
Scoring generated code against a reference
==========================================

One shipped reference solution, three candidates: an exact copy, a copy
with every identifier renamed, and a script that ignores the signal API.
"""

from sdvbench import DATA_DIR, load_benchmark
from sdvbench.metrics import HashEmbedder, score_pair

bench = load_benchmark(DATA_DIR / "benchmark")
item = bench.items[0]
reference = item.reference_solution
print(item.key, "-", item.user_prompt.splitlines()[0])

renamed = reference.replace("self.Vehicle", "self.car").replace("Vehicle", "Car")
unrelated = "import time\nfrom car_sdk import Car\n\ncar = Car()\ncar.write('lights', True)\ntime.sleep(1)\n"
broken = "if speed > 50\n    car.write('lights', True)\n"

emb = HashEmbedder(dim=256)
for name, cand in [("copy", reference), ("renamed", renamed), ("unrelated", unrelated), ("broken", broken)]:
    rep = score_pair(cand, reference, embedder=emb)
    cb = rep.codebleu
    print(f"{name:<10} CodeBLEU {cb.composite:.3f} "
          f"(ngram {cb.ngram:.2f}, weighted {cb.weighted_ngram:.2f}, syntax {cb.syntax:.2f}, dataflow {cb.dataflow:.2f}) "
          f"CodeBERT {rep.codebert.f1:.3f}  ROUGE-L {rep.rouge_l.f:.3f}  ChrF {rep.chrf.score:.3f}"
          + ("  [candidate did not parse]" if rep.candidate_parse_failed else ""))

# the composite is a plain weighted sum; with the default quarter weights
from sdvbench.metrics import CodeBleuWeights, combine

print(combine(0.8, 0.6, 0.79, 0.53, CodeBleuWeights()))
