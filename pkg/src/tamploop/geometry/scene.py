"""Planar tabletop scene: disc objects and locations, segment arms.

Geometry is 2-D. A robot arm is a segment from its base to the current tool
point, carrying a clearance radius; reach is a disc around the base.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from ..pddl.model import Atom

Vec = tuple[float, float]


def dist(a: Vec, b: Vec) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


@dataclass(frozen=True)
class RobotModel:
    name: str
    base: Vec
    reach: float
    clearance: float = 0.04
    gripper: str = "empty"


@dataclass(frozen=True)
class LocationModel:
    name: str
    center: Vec
    radius: float
    workspace: bool = False
    tool_holder: bool = False


@dataclass(frozen=True)
class ObjectModel:
    name: str
    position: Vec
    radius: float
    kind: str = "food"  # food | tool


class SceneError(ValueError):
    pass


@dataclass(frozen=True)
class SceneModel:
    robots: dict[str, RobotModel] = field(default_factory=dict)
    locations: dict[str, LocationModel] = field(default_factory=dict)
    objects: dict[str, ObjectModel] = field(default_factory=dict)

    def validate(self) -> None:
        if not self.robots:
            raise SceneError("scene has no robots")
        max_obj = max((o.radius for o in self.objects.values()), default=0.0)
        for r in self.robots.values():
            if r.reach <= 0 or r.clearance <= 0:
                raise SceneError(f"robot {r.name}: radii must be positive")
            if r.reach <= max_obj:
                raise SceneError(f"robot {r.name}: reach must exceed object radii")
        for l in self.locations.values():
            if l.radius <= 0:
                raise SceneError(f"location {l.name}: radius must be positive")
        held = {r.gripper for r in self.robots.values() if r.gripper != "empty"}
        for o in self.objects.values():
            if o.radius <= 0:
                raise SceneError(f"object {o.name}: radius must be positive")
            if o.name in held:
                continue
            containing = [l.name for l in self.locations.values()
                          if dist(o.position, l.center) <= l.radius]
            if len(containing) != 1:
                raise SceneError(
                    f"object {o.name} must lie within exactly one location "
                    f"footprint, found {containing or 'none'}")

    def location_of(self, obj: str) -> str | None:
        o = self.objects.get(obj)
        if o is None:
            return None
        for l in self.locations.values():
            if dist(o.position, l.center) <= l.radius:
                return l.name
        return None

    def moved(self, obj: str, position: Vec) -> "SceneModel":
        objects = dict(self.objects)
        objects[obj] = ObjectModel(obj, position, objects[obj].radius,
                                   objects[obj].kind)
        return SceneModel(self.robots, self.locations, objects)

    def to_dict(self) -> dict:
        return {
            "robots": {n: {"base": list(r.base), "reach": r.reach,
                           "clearance": r.clearance, "gripper": r.gripper}
                       for n, r in sorted(self.robots.items())},
            "locations": {n: {"center": list(l.center), "radius": l.radius,
                              "workspace": l.workspace, "tool_holder": l.tool_holder}
                          for n, l in sorted(self.locations.items())},
            "objects": {n: {"position": list(o.position), "radius": o.radius,
                            "kind": o.kind}
                        for n, o in sorted(self.objects.items())},
        }

    @staticmethod
    def from_dict(data: dict) -> "SceneModel":
        robots = {n: RobotModel(n, tuple(v["base"]), v["reach"],
                                v.get("clearance", 0.04), v.get("gripper", "empty"))
                  for n, v in data.get("robots", {}).items()}
        locations = {n: LocationModel(n, tuple(v["center"]), v["radius"],
                                      v.get("workspace", False),
                                      v.get("tool_holder", False))
                     for n, v in data.get("locations", {}).items()}
        objects = {n: ObjectModel(n, tuple(v["position"]), v["radius"],
                                  v.get("kind", "food"))
                   for n, v in data.get("objects", {}).items()}
        scene = SceneModel(robots, locations, objects)
        scene.validate()
        return scene

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True)
                              + "\n", encoding="utf-8")

    @staticmethod
    def load(path: str | Path) -> "SceneModel":
        return SceneModel.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def reachability_facts(scene: SceneModel) -> list[Atom]:
    """Statically derivable (CanNotReach robot obj loc) facts.

    A triple is out of reach when the location center lies beyond the robot's
    reach disc; the object argument ranges over all movable scene objects.
    """
    facts = []
    for rname, robot in sorted(scene.robots.items()):
        for lname, loc in sorted(scene.locations.items()):
            if dist(robot.base, loc.center) > robot.reach:
                for oname in sorted(scene.objects):
                    facts.append(Atom("CanNotReach", (rname, oname, lname)))
    return facts
