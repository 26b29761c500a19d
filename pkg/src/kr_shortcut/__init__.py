"""Shortcut partitions of K_r-minor-free graphs and their applications.

Modules: ``graph`` (graphs, shortest paths, I/O), ``cop`` (buffered cop
decomposition), ``partition`` (shortcut partition), ``scattering``
(scattering partitions and Steiner point removal), ``treecover`` and
``oracle`` (tree covers and the distance oracle built on them).
"""
from .cop import CopDecomposition, InvariantViolation, build_decomposition, dom, expansion_bags
from .graph import GraphError, ParseError, PathWitness, WeightedGraph, load_edge_list
from .oracle import Oracle, build_oracle
from .partition import Clustering, build_partition, build_partition_eps, cluster_graph, path_cost
from .report import Report
from .scattering import TerminalMinor, scattered_path, scattering_from_shortcut, spr_solve
from .treecover import TreeCover, build_tree_cover

__version__ = "0.1.0"
