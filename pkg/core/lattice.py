"""
Lattice geometry on Z².

Sites are plain (x, y) integer tuples. LatticeBox is the centred box
Λ(r) = [-r, r]² ∩ Z² used for initial supports and restrictions, Torus is the
periodic simulation region.
"""

import math
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

from .exceptions import ContractViolation

Site = Tuple[int, int]

ORIGIN: Site = (0, 0)

# Slack when turning real half-sides such as t^(α/2) into integer radii.
RADIUS_SLACK = 1e-9


def sup_norm(site: Site) -> int:
    """Return the ∞-norm of a site."""
    return max(abs(site[0]), abs(site[1]))


def sup_distance(a: Site, b: Site) -> int:
    """Return the ∞-norm distance between two sites."""
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def site_order_key(site: Site) -> Tuple[int, int, int]:
    """Site-major enumeration key: ∞-norm shell first, then lexicographic."""
    return sup_norm(site), site[0], site[1]


@dataclass(frozen=True)
class LatticeBox:
    """
    The box Λ(r) = [-r, r]² ∩ Z².

    A negative half-side denotes the empty box.
    """

    half_side: float

    @classmethod
    def alpha_box(cls, t: float, alpha: float) -> "LatticeBox":
        """The α-box Λ^{α,t} = Λ(t^{α/2})."""
        return cls(t ** (alpha / 2.0))

    @property
    def radius(self) -> int:
        """Largest integer ∞-norm inside the box, -1 when empty."""
        if self.half_side < 0:
            return -1
        return int(math.floor(self.half_side + RADIUS_SLACK))

    def contains(self, site: Site) -> bool:
        return sup_norm(site) <= self.radius

    def contains_norm(self, norm: int) -> bool:
        return norm <= self.radius

    def site_count(self) -> int:
        """Number of lattice sites #Λ."""
        r = self.radius
        return 0 if r < 0 else (2 * r + 1) ** 2

    def sites(self) -> List[Site]:
        """All sites of the box in site-major enumeration order."""
        r = self.radius
        sites = [(x, y) for x in range(-r, r + 1) for y in range(-r, r + 1)]
        sites.sort(key=site_order_key)
        return sites


@dataclass(frozen=True)
class Torus:
    """
    Periodic rectangular region of Z².

    Covers x_min <= x < x_min + width and y_min <= y < y_min + height;
    positions leaving the rectangle wrap around.
    """

    x_min: int
    y_min: int
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ContractViolation(f"torus needs positive extent, got {self.width}x{self.height}")

    @classmethod
    def around(cls, radius: int) -> "Torus":
        """The torus whose fundamental domain is Λ(radius)."""
        radius = int(radius)
        if radius < 0:
            raise ContractViolation(f"torus radius must be non-negative, got {radius}")
        return cls(-radius, -radius, 2 * radius + 1, 2 * radius + 1)

    def wrap(self, site: Site) -> Site:
        return (
            (site[0] - self.x_min) % self.width + self.x_min,
            (site[1] - self.y_min) % self.height + self.y_min,
        )

    def contains(self, site: Site) -> bool:
        return (self.x_min <= site[0] < self.x_min + self.width
                and self.y_min <= site[1] < self.y_min + self.height)

    def site_count(self) -> int:
        return self.width * self.height

    def sites(self) -> Iterator[Site]:
        for x in range(self.x_min, self.x_min + self.width):
            for y in range(self.y_min, self.y_min + self.height):
                yield (x, y)


def simulation_radius(t: float, buffer: float = 3.0) -> int:
    """Radius ⌈B·√t·log t⌉ of the default coalescent simulation region."""
    return int(math.ceil(buffer * math.sqrt(t) * math.log(t)))


def rebirth_radius(t: float, alpha: float, u_max: float, buffer: float = 3.0) -> int:
    """Radius ⌈t^{α/2} + B·t^{u_max/2}⌉ of the rebirth simulation region."""
    return int(math.ceil(t ** (alpha / 2.0) + buffer * t ** (u_max / 2.0)))


def wrap_site(region: Optional[Torus], site: Site) -> Site:
    """Wrap a site into the region; the unbounded lattice leaves it alone."""
    return site if region is None else region.wrap(site)
