"""NEBBSIM Topology - network shapes and dimension-order routing."""

from nebbsim.topology.shape import NetworkShape, NodeMap, TopologyKind
from nebbsim.topology.routing import RouteStep, dor_route, hops, lookahead_route, route_path

__all__ = [
    "NetworkShape",
    "NodeMap",
    "TopologyKind",
    "RouteStep",
    "dor_route",
    "hops",
    "lookahead_route",
    "route_path",
]
