from .graph import Graph, load_edge_list, connected_components
from .centrality import CentralityVector, current_flow_betweenness, clamp
from .linegraph import WeightedLineGraph, build_line_graph, weight_edges, size_estimate
