"""
A walk through the code analyzer
================================

Tokens, the parse tree, depth-one subtrees and def-use edges for a small
vehicle script. These are the pieces the syntax and dataflow halves of
CodeBLEU are built from.
"""

from sdvbench.analysis import extract_dataflow, extract_subtrees, metric_tokens, parse, tokenize

source = '''\
speed = (await self.Vehicle.Speed.get()).value
limit = 50
if speed > limit:
    await self.Vehicle.Body.Horn.IsActive.set(True)
else:
    limit = limit + 5
print(limit)
'''

# raw tokens carry layout (NEWLINE, INDENT, DEDENT) and comments
for tok in tokenize(source)[:12]:
    print(f"{tok.kind.name:<10} {tok.text!r}")

# the metric view drops layout and comments
print(metric_tokens(source)[:15])

# the tree, as an indented outline
tree = parse(source)
print(tree.pretty())

# every node with children becomes one "Parent(Child, Child)" label
for label, count in sorted(extract_subtrees(tree).items()):
    print(count, label)

# def-use edges; variable names are replaced by first-definition order
graph = extract_dataflow(tree)
print("\n".join(graph.describe()))

# renaming does not change the edge keys
renamed = source.replace("speed", "v").replace("limit", "cap")
print(extract_dataflow(parse(renamed)).edge_keys() == graph.edge_keys())

# malformed input is a value, not an exception
err = parse("if speed > 50\n    pass\n")
print(type(err).__name__, err.line, err.column, err.message)
