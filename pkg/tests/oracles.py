"""Reference oracles used by the tests."""

from fuzzhyper.reference import (
    hausdorff_by_fattening,
    graph_points,
    graph_distance_oracle,
    level_mask,
    sup_level_distance,
    skorokhod_grid_oracle,
    all_grid_memberships,
    unshadowed_chain,
    mixing_by_lengths,
)

__all__ = [
    "hausdorff_by_fattening",
    "graph_points",
    "graph_distance_oracle",
    "level_mask",
    "sup_level_distance",
    "skorokhod_grid_oracle",
    "all_grid_memberships",
    "unshadowed_chain",
    "mixing_by_lengths",
]
