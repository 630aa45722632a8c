from gimtp.graph.adjacency import (
    DynamicAdjacency,
    RiskForce,
    build_adjacency,
    combine,
    distance_adjacency,
    dynamic_adjacency,
    neighborhood_adjacency,
    pairwise_forces,
    risk_adjacency,
    risk_force,
)

__all__ = [
    "DynamicAdjacency",
    "RiskForce",
    "build_adjacency",
    "combine",
    "distance_adjacency",
    "dynamic_adjacency",
    "neighborhood_adjacency",
    "pairwise_forces",
    "risk_adjacency",
    "risk_force",
]
