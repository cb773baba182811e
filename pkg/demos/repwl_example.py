"""Build the small RepWL graph (block length 2, threshold 3) and print its
nodes and edges."""
from busybeaver.repwl import repwl_graph

tm = "0RB0LC_1LA1RB_1RD0RE_1LC1LA_---0LD"
res = repwl_graph(tm, 2, 3, keep_edges=True)
print(tm, res.verdict.kind, f"{len(res.nodes)} nodes")
for node, edges in res.edges.items():
    for kind, succ, steps in edges:
        print(f"  {node.show(3):40s} --{kind}/{steps}--> {succ.show(3)}")
