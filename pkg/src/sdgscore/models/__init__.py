from .brf import BalancedRandomForest, train_brf, predict_brf
from .gcn import GcnConfig, GcnModel, train_gcn, predict_gcn, gcn_forward, normalized_adjacency
from .rgcn import RgcnConfig, RgcnModel, train_rgcn, predict_rgcn
from .cluster import ClusterAssignment, cluster_graph, propagate_cluster_labels

__all__ = [
    "BalancedRandomForest", "train_brf", "predict_brf",
    "GcnConfig", "GcnModel", "train_gcn", "predict_gcn", "gcn_forward",
    "normalized_adjacency",
    "RgcnConfig", "RgcnModel", "train_rgcn", "predict_rgcn",
    "ClusterAssignment", "cluster_graph", "propagate_cluster_labels",
]
