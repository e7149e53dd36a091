"""
NEBBSIM Topology - Network shape.

k-ary 2-mesh, k-ary 2-torus, or a unidirectional ring of k routers, each
router concentrating c nodes. Routers are numbered row-major: y * k + x.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

from nebbsim.core.errors import ConfigurationError
from nebbsim.core.ports import TRANSIT_PORTS, Direction


class TopologyKind(Enum):
    MESH = "mesh"
    TORUS = "torus"
    RING = "ring"

    @classmethod
    def parse(cls, text: str) -> "TopologyKind":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ConfigurationError(f"unknown topology {text!r} (mesh, torus or ring)") from None


class NodeMap(Enum):
    BLOCK = "block"  # node n -> router n // c, slot n % c
    GRID = "grid"    # nodes laid out on a (k * sqrt(c))^2 grid

    @classmethod
    def parse(cls, text: str) -> "NodeMap":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ConfigurationError(f"unknown node map {text!r} (block or grid)") from None


@dataclass(frozen=True)
class NetworkShape:
    kind: TopologyKind
    k: int
    c: int = 1
    node_map: NodeMap = NodeMap.BLOCK

    def __post_init__(self):
        if self.k < 2:
            raise ConfigurationError(f"k must be >= 2, got {self.k}")
        if self.c < 1:
            raise ConfigurationError(f"concentration must be >= 1, got {self.c}")
        if self.node_map is NodeMap.GRID:
            side = math.isqrt(self.c)
            if side * side != self.c:
                raise ConfigurationError(f"grid node map needs a square concentration, got {self.c}")
            if self.kind is TopologyKind.RING:
                raise ConfigurationError("grid node map is only defined for 2-D networks")

    # ═══ sizes ═══════════════════════════════════════════════════════════

    @property
    def routers(self) -> int:
        return self.k if self.kind is TopologyKind.RING else self.k * self.k

    @property
    def nodes(self) -> int:
        return self.routers * self.c

    @property
    def ports(self) -> int:
        return TRANSIT_PORTS + self.c

    @property
    def wraps(self) -> bool:
        return self.kind is not TopologyKind.MESH

    @property
    def dimensions(self) -> int:
        return 1 if self.kind is TopologyKind.RING else 2

    # ═══ coordinates ═════════════════════════════════════════════════════

    def coords(self, router: int) -> Tuple[int, int]:
        return router % self.k, router // self.k

    def router_at(self, x: int, y: int) -> int:
        return y * self.k + x

    def attach(self, node: int) -> Tuple[int, int]:
        """(router, local slot) of a node."""
        if not 0 <= node < self.nodes:
            raise ConfigurationError(f"node {node} outside 0..{self.nodes - 1}")
        if self.node_map is NodeMap.BLOCK:
            return node // self.c, node % self.c
        s = math.isqrt(self.c)
        side = self.k * s
        gx, gy = node % side, node // side
        return self.router_at(gx // s, gy // s), (gy % s) * s + gx % s

    def node_at(self, router: int, slot: int) -> int:
        if self.node_map is NodeMap.BLOCK:
            return router * self.c + slot
        s = math.isqrt(self.c)
        x, y = self.coords(router)
        gx = x * s + slot % s
        gy = y * s + slot // s
        return gy * self.k * s + gx

    def nodes_of(self, router: int) -> List[int]:
        return [self.node_at(router, slot) for slot in range(self.c)]

    # ═══ links ═══════════════════════════════════════════════════════════

    def neighbor(self, router: int, port: int) -> Optional[int]:
        """Router reached through transit `port`, or None if the link does not exist."""
        if port >= TRANSIT_PORTS:
            return None
        direction = Direction(port)
        x, y = self.coords(router)
        if self.kind is TopologyKind.RING:
            if direction is not Direction.X_PLUS:
                return None
            return (x + 1) % self.k
        dx, dy = {
            Direction.X_PLUS: (1, 0),
            Direction.X_MINUS: (-1, 0),
            Direction.Y_PLUS: (0, 1),
            Direction.Y_MINUS: (0, -1),
        }[direction]
        nx, ny = x + dx, y + dy
        if self.kind is TopologyKind.TORUS:
            return self.router_at(nx % self.k, ny % self.k)
        if 0 <= nx < self.k and 0 <= ny < self.k:
            return self.router_at(nx, ny)
        return None

    def upstream(self, router: int, in_port: int) -> Optional[int]:
        """Router whose output `in_port ^ 1` feeds input `in_port` of `router`."""
        if in_port >= TRANSIT_PORTS:
            return None
        if self.kind is TopologyKind.RING:
            if in_port != Direction.X_MINUS.value:
                return None
            return (router - 1) % self.k
        return self.neighbor(router, in_port)

    def input_ports(self, router: int) -> List[int]:
        """Transit input ports fed by a neighbour, plus every local port."""
        fed = [p for p in range(TRANSIT_PORTS) if self.upstream(router, p) is not None]
        return fed + list(range(TRANSIT_PORTS, self.ports))

    def output_ports(self, router: int) -> List[int]:
        linked = [p for p in range(TRANSIT_PORTS) if self.neighbor(router, p) is not None]
        return linked + list(range(TRANSIT_PORTS, self.ports))

    def describe(self) -> str:
        if self.kind is TopologyKind.RING:
            return f"ring k={self.k} c={self.c}"
        return f"{self.k}x{self.k} {self.kind.value} c={self.c} ({self.node_map.value})"
