"""
NEBBSIM Topology - Dimension-ordered routing and dateline VC classes.
"""

from dataclasses import dataclass
from typing import List, Optional

from nebbsim.core.ports import TRANSIT_PORTS, Direction
from nebbsim.topology.shape import NetworkShape, TopologyKind


@dataclass(frozen=True)
class RouteStep:
    out_port: int
    dateline_crossed: bool = False


def _ring_direction(shape: NetworkShape, cur: int, dst: int) -> bool:
    """True for the positive direction along one dimension."""
    if shape.kind is TopologyKind.RING:
        return True
    if shape.kind is TopologyKind.MESH:
        return dst > cur
    forward = (dst - cur) % shape.k
    return 2 * forward <= shape.k


def crosses_dateline(shape: NetworkShape, position: int, positive: bool) -> bool:
    """Whether leaving `position` in the given direction uses the wraparound link."""
    if not shape.wraps:
        return False
    return position == shape.k - 1 if positive else position == 0


def dor_route(shape: NetworkShape, current_router: int, dest_node: int) -> RouteStep:
    """X first, then Y; the local port once at the destination router."""
    dest_router, slot = shape.attach(dest_node)
    if current_router == dest_router:
        return RouteStep(TRANSIT_PORTS + slot)
    cx, cy = shape.coords(current_router)
    dx, dy = shape.coords(dest_router)
    if cx != dx:
        positive = _ring_direction(shape, cx, dx)
        direction = Direction.X_PLUS if positive else Direction.X_MINUS
        return RouteStep(direction.value, crosses_dateline(shape, cx, positive))
    positive = _ring_direction(shape, cy, dy)
    direction = Direction.Y_PLUS if positive else Direction.Y_MINUS
    return RouteStep(direction.value, crosses_dateline(shape, cy, positive))


def lookahead_route(shape: NetworkShape, next_router: int, dest_node: int) -> RouteStep:
    """Route computed one hop ahead, at the router the flit reaches next."""
    return dor_route(shape, next_router, dest_node)


def route_path(shape: NetworkShape, source_node: int, dest_node: int) -> List[int]:
    """Routers visited from source to destination, both included."""
    router, _ = shape.attach(source_node)
    path = [router]
    while True:
        step = dor_route(shape, router, dest_node)
        if step.out_port >= TRANSIT_PORTS:
            return path
        router = shape.neighbor(router, step.out_port)
        path.append(router)


def hops(shape: NetworkShape, source_node: int, dest_node: int) -> int:
    """Router-to-router links traversed by a packet."""
    src, _ = shape.attach(source_node)
    dst, _ = shape.attach(dest_node)
    sx, sy = shape.coords(src)
    dx, dy = shape.coords(dst)
    return _distance(shape, sx, dx) + _distance(shape, sy, dy)


def _distance(shape: NetworkShape, a: int, b: int) -> int:
    if shape.kind is TopologyKind.MESH:
        return abs(b - a)
    forward = (b - a) % shape.k
    if shape.kind is TopologyKind.RING:
        return forward
    return min(forward, shape.k - forward)


# ═══════════════════════════════════════════════════════════════════════════
# DATELINE
# ═══════════════════════════════════════════════════════════════════════════

def vc_class(vc: int, vc_count: int) -> int:
    """Lower half of the VCs is class 0, upper half class 1."""
    return 0 if vc < vc_count // 2 else 1


def dateline_vc(
    shape: NetworkShape,
    ring_position: int,
    current_vc_class: Optional[int],
    crossing: bool,
) -> int:
    """
    VC class for the next link of a ring.

    current_vc_class is None when the packet enters the ring (injection or
    dimension change), where it starts in class 0. Crossing the dateline
    promotes to class 1, and a packet never demotes within the ring.
    """
    if not 0 <= ring_position < shape.k:
        raise ValueError(f"ring position {ring_position} outside 0..{shape.k - 1}")
    if crossing:
        return 1
    return current_vc_class or 0
