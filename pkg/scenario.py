"""
JSON and CSV documents: complexes, lattices, vertex functions and scenarios
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import pandas as pd

from exceptions import MalformedInput
from forms import VertexFunction
from lattice import LatticeDomain
from logger import get_logger
from planar_complex import PlanarComplex

log = get_logger("scenario")

PathLike = Union[str, Path]


def read_json(path: PathLike) -> Dict[str, Any]:
    try:
        with open(path, "r") as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise MalformedInput(f"File not found: {path}") from e
    except json.JSONDecodeError as e:
        raise MalformedInput(f"{path} is not valid JSON: {e}") from e


def write_json(data: Any, path: PathLike) -> Path:
    output_path = Path(path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    with open(output_path, "w") as f:
        json.dump(data, f, indent=2)
    log.debug(f"Wrote {output_path}")
    return output_path


def write_table(rows: Union[pd.DataFrame, List[Dict]], path: PathLike) -> Path:
    """CSV for ``.csv`` paths, JSON records otherwise"""
    frame = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(rows)
    output_path = Path(path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    if output_path.suffix.lower() == ".csv":
        frame.to_csv(output_path, index=False)
    else:
        with open(output_path, "w") as f:
            json.dump(frame.to_dict(orient="records"), f, indent=2)
    return output_path


@dataclass(eq=False)
class Scenario:
    """A vertex function on either a lattice or a general planar complex"""
    u: VertexFunction
    lattice: Optional[LatticeDomain] = None
    planar: Optional[PlanarComplex] = None
    profile: Optional[str] = None
    name: str = "scenario"

    def __post_init__(self):
        if (self.lattice is None) == (self.planar is None):
            raise MalformedInput("A scenario needs exactly one of a lattice or a complex")

    @property
    def complex(self) -> PlanarComplex:
        return self.lattice.complex if self.lattice is not None else self.planar

    def with_u(self, u: VertexFunction) -> "Scenario":
        return Scenario(u=u, lattice=self.lattice, planar=self.planar, profile=self.profile, name=self.name)

    def to_dict(self) -> Dict:
        data: Dict[str, Any] = {"u": self.u.to_dict()}
        if self.lattice is not None:
            data["lattice"] = self.lattice.to_dict()
        else:
            data["complex"] = self.planar.to_dict()
        if self.profile:
            data["profile"] = self.profile
        return data

    @classmethod
    def from_dict(cls, data: Dict, name: str = "scenario") -> "Scenario":
        if not isinstance(data, dict):
            raise MalformedInput("Scenario document must be a JSON object")
        if "lattice" in data:
            lattice, planar = LatticeDomain.from_dict(data["lattice"]), None
        elif "complex" in data:
            lattice, planar = None, PlanarComplex.from_dict(data["complex"])
        else:
            raise MalformedInput("Scenario document has neither 'lattice' nor 'complex'")
        u = VertexFunction.from_dict(data["u"]) if "u" in data else VertexFunction({})
        return cls(u=u, lattice=lattice, planar=planar, profile=data.get("profile"), name=name)


def load_scenario(path: PathLike) -> Scenario:
    return Scenario.from_dict(read_json(path), name=Path(path).stem)


def save_scenario(scenario: Scenario, path: PathLike) -> Path:
    return write_json(scenario.to_dict(), path)


def load_lattice(path: PathLike) -> LatticeDomain:
    """A lattice document, or the lattice of a scenario document"""
    data = read_json(path)
    return LatticeDomain.from_dict(data["lattice"] if "lattice" in data else data)


def load_complex(path: PathLike) -> PlanarComplex:
    """A complex document, or the complex of a scenario or lattice document"""
    data = read_json(path)
    if "lattice" in data:
        return LatticeDomain.from_dict(data["lattice"]).complex
    if "complex" in data:
        return PlanarComplex.from_dict(data["complex"])
    if "cells" in data:
        return LatticeDomain.from_dict(data).complex
    return PlanarComplex.from_dict(data)
