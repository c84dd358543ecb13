"""
Three ways to prompt
====================

The shipped prompt bundle assembled in each mode, plus a few hand-picked
section subsets like the ones the ablation study uses.
"""

from sdvbench import DATA_DIR, load_bundle, load_catalog
from sdvbench.prompts import PromptConfig, PromptError, assemble, estimate_tokens

catalog = load_catalog(DATA_DIR / "catalog.json")
bundle = load_bundle(DATA_DIR / "prompt_bundle")
print("sections in the bundle:", bundle.section_ids)
print("exemplars:", [e.id for e in bundle.exemplars])

for mode in ("few-shot", "zero-shot", "original"):
    p = assemble(PromptConfig.of(mode), catalog, bundle)
    print(f"{mode:<10} sections={list(p.section_ids)} ~{estimate_tokens(p.rendered_text)} tokens "
          f"sha256={p.fingerprint[:12]}")

# the API listing section is generated from the catalog
zero = assemble(PromptConfig.of("zero-shot"), catalog, bundle)
listing = next(s for s in zero.sections if s.id == "api")
print(listing.body.split("\n\n")[0])

# keeping only some sections; zero-shot silently drops exemplars
for subset in (["api"], ["intro", "examples"], ["examples"]):
    for mode in ("few-shot", "zero-shot"):
        try:
            p = assemble(PromptConfig.of(mode, subset), catalog, bundle)
            print(mode, subset, "->", list(p.section_ids))
        except PromptError as exc:
            print(mode, subset, "->", exc)

# a single exemplar
one = assemble(PromptConfig.of("few-shot", exemplars=["rain_wipers"]), catalog, bundle)
print(one.rendered_text.count("### Example:"), "example rendered")
