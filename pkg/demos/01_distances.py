"""Text and graph distances on a hand-built six-document corpus.

Builds the same tiny graph the test suite uses and walks through the two
primitive distances everything else is made of: cosine distance between
tf-idf-style vectors and diameter-normalized directed graph distance.
"""

from diverso import Document, DocumentGraph, TermVector, graph_distance, text_distance

# six documents: 0..5, unit edges 0->1, 0->2, 1->3, 2->3, 3->4, 4->5
vectors = [
    {"a": 1.0},
    {"a": 1.0},
    {"b": 1.0},
    {"a": 1.0, "b": 1.0},
    {"c": 1.0},
    {"a": 1.0, "c": 1.0},
]
edges = [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (4, 5)]

docs = [
    Document(id=i, key=str(i), title=f"doc {i}", vector=TermVector(v))
    for i, v in enumerate(vectors)
]
for u, v in edges:
    docs[u].out_links.append(v)
graph = DocumentGraph(docs)

print(f"graph: {graph.vertex_count} vertices, {graph.edge_count} edges")
print(f"computed diameter: {graph.diameter}")
print()

# identical vectors are at distance 0, disjoint supports at distance 1
print("text distances from doc 0:")
for v in range(1, 6):
    d = text_distance(docs[0].vector, docs[v].vector)
    print(f"  d_text(0, {v}) = {d:.6f}")
print()

# graph distance normalizes path weight by the diameter and caps at 1;
# unreachable pairs (the graph is directed) are maximally distant
print("graph distances:")
print(f"  d_graph(0, 1) = {graph_distance(graph, 0, 1):.2f}   (1 hop / diameter 4)")
print(f"  d_graph(0, 5) = {graph_distance(graph, 0, 5):.2f}   (4 hops / diameter 4)")
print(f"  d_graph(1, 2) = {graph_distance(graph, 1, 2):.2f}   (unreachable)")
print(f"  d_graph(3, 3) = {graph_distance(graph, 3, 3):.2f}   (self)")
