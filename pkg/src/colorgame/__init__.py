"""Simulation laboratory for the graph coloring game on dense random graphs."""

from colorgame.graph import Graph, bipartite_minus_matching, gen_gnp, parse_graph, serialize_graph

__all__ = [
    "Graph",
    "bipartite_minus_matching",
    "gen_gnp",
    "parse_graph",
    "serialize_graph",
]
