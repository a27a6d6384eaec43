"""
JSON instance files.

Graph instance::

    {"name": "K3", "vertices": 3,
     "edges": [{"id": "e1", "u": 0, "v": 1, "dist": {"type": "exp", "rate": 1.0}}, ...]}

Matroid instance::

    {"type": "graphic", "graph": <graph instance>}
    {"type": "uniform", "k": 2, "n": 4, "rates": [1.0, 2.0, 3.0, 4.0]}
    {"type": "binary", "columns": [[1, 0, 0], ...], "rates": [...]}

Malformed JSON and wrong shapes raise InstanceParseError; well-formed files
describing invalid instances raise the InvalidInstanceError family.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any

from core.distributions import Discrete, Exponential, Instance, WeightDistribution
from core.exceptions import DistributionError, InstanceParseError
from core.graph import Edge, MultiGraph
from core.matroid import (
    BinaryMatroid,
    GraphicMatroid,
    IMatroidOracle,
    MatroidInstance,
    UniformMatroid,
)

logger = logging.getLogger(__name__)


# ============================================================================
# Field access
# ============================================================================


def _loads(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceParseError(f"{source}: {e.msg}", line=e.lineno, column=e.colno) from e


def _read(path: Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise InstanceParseError(f"{path}: not valid UTF-8") from e
    except OSError as e:
        raise InstanceParseError(f"cannot read {path}: {e.strerror or e}") from e


def _field(obj: Any, key: str, kind: type | tuple[type, ...], where: str) -> Any:
    if not isinstance(obj, dict):
        raise InstanceParseError(f"{where} must be an object")
    if key not in obj:
        raise InstanceParseError(f"{where} is missing {key!r}")
    value = obj[key]
    # bool is an int subclass
    if isinstance(value, bool) or not isinstance(value, kind):
        raise InstanceParseError(f"{where}.{key} has the wrong type")
    return value


def _number(obj: Any, key: str, where: str) -> float:
    value = float(_field(obj, key, (int, float), where))
    if not math.isfinite(value):
        raise DistributionError(f"{where}.{key} is not finite")
    return value


# ============================================================================
# Graph instances
# ============================================================================


def parse_distribution(obj: Any, where: str = "dist") -> WeightDistribution:
    kind = _field(obj, "type", str, where)
    if kind == "exp":
        return Exponential(_number(obj, "rate", where))
    if kind == "discrete":
        atoms = _field(obj, "atoms", list, where)
        parsed = []
        for i, atom in enumerate(atoms):
            if (
                not isinstance(atom, list)
                or len(atom) != 2
                or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in atom)
            ):
                raise InstanceParseError(f"{where}.atoms[{i}] must be a [value, probability] pair")
            parsed.append((float(atom[0]), float(atom[1])))
        return Discrete(tuple(parsed))
    raise InstanceParseError(f"{where}.type must be 'exp' or 'discrete', got {kind!r}")


def instance_from_dict(data: Any) -> Instance:
    """Build an Instance from the parsed graph instance object."""
    name = data.get("name", "") if isinstance(data, dict) else ""
    if not isinstance(name, str):
        raise InstanceParseError("instance.name has the wrong type")
    n = _field(data, "vertices", int, "instance")
    records = _field(data, "edges", list, "instance")
    edges = []
    dist = {}
    for i, record in enumerate(records):
        where = f"edges[{i}]"
        eid = _field(record, "id", str, where)
        u = _field(record, "u", int, where)
        v = _field(record, "v", int, where)
        edges.append(Edge(eid, u, v))
        dist[eid] = parse_distribution(_field(record, "dist", dict, where), f"{where}.dist")
    graph = MultiGraph(n=n, edges=tuple(edges), name=name)
    return Instance(graph, dist, name=name)


def instance_to_dict(inst: Instance) -> dict[str, Any]:
    return {
        "name": inst.name,
        "vertices": inst.graph.n,
        "edges": [
            {"id": edge.id, "u": edge.u, "v": edge.v, "dist": inst.dist[edge.id].to_dict()}
            for edge in inst.graph.edges
        ],
    }


def loads_instance(text: str, source: str = "<string>") -> Instance:
    return instance_from_dict(_loads(text, source))


def load_instance(path: Path) -> Instance:
    """
    Load a graph instance file.

    Raises:
        InstanceParseError: if the file is unreadable or not a graph instance
        InvalidInstanceError: if the described instance is invalid
    """
    inst = loads_instance(_read(path), str(path))
    logger.info(
        f"Loaded instance {inst.name or path}: {inst.graph.n} vertices, "
        f"{inst.graph.edge_count} edges"
    )
    return inst


def dumps_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2) + "\n"


def dump_instance(inst: Instance, path: Path) -> None:
    Path(path).write_text(dumps_instance(inst), encoding="utf-8")


# ============================================================================
# Matroid instances
# ============================================================================


def _rate_list(data: Any, size: int, where: str) -> list[float]:
    rates = _field(data, "rates", list, where)
    if len(rates) != size:
        raise InstanceParseError(f"{where}.rates has {len(rates)} entries, expected {size}")
    for i, rate in enumerate(rates):
        if isinstance(rate, bool) or not isinstance(rate, (int, float)):
            raise InstanceParseError(f"{where}.rates[{i}] must be a number")
    return [float(rate) for rate in rates]


def matroid_instance_from_dict(data: Any) -> MatroidInstance:
    kind = _field(data, "type", str, "matroid")
    name = data.get("name", "")
    if not isinstance(name, str):
        raise InstanceParseError("matroid.name has the wrong type")
    if kind == "graphic":
        inst = instance_from_dict(_field(data, "graph", dict, "matroid"))
        inst.require_exponential("graphic matroid instance")
        return MatroidInstance(GraphicMatroid(inst.graph), inst.rates(), name=name or inst.name)
    if kind == "uniform":
        matroid: IMatroidOracle = UniformMatroid(
            _field(data, "k", int, "matroid"), _field(data, "n", int, "matroid")
        )
    elif kind == "binary":
        columns = _field(data, "columns", list, "matroid")
        if not all(isinstance(column, list) for column in columns):
            raise InstanceParseError("matroid.columns must be a list of 0/1 lists")
        matroid = BinaryMatroid.from_vectors(columns, label=name or "binary")
    else:
        raise InstanceParseError(
            f"matroid.type must be 'graphic', 'uniform' or 'binary', got {kind!r}"
        )
    rates = _rate_list(data, matroid.size, "matroid")
    return MatroidInstance(matroid, dict(zip(matroid.ground_set, rates, strict=True)), name=name)


def matroid_instance_to_dict(inst: MatroidInstance) -> dict[str, Any]:
    m = inst.matroid
    if isinstance(m, GraphicMatroid):
        graph = Instance.exponential(m.graph, inst.rates, name=m.graph.name)
        return {"type": "graphic", "name": inst.name, "graph": instance_to_dict(graph)}
    rates = [inst.rates[x] for x in m.ground_set]
    if isinstance(m, UniformMatroid):
        return {"type": "uniform", "name": inst.name, "k": m.k, "n": m.n, "rates": rates}
    if isinstance(m, BinaryMatroid):
        height = max((column.bit_length() for column in m.columns), default=0)
        columns = [[column >> bit & 1 for bit in range(height)] for column in m.columns]
        return {"type": "binary", "name": inst.name, "columns": columns, "rates": rates}
    raise TypeError(f"cannot serialize matroid of type {type(m).__name__}")


def load_matroid_instance(path: Path) -> MatroidInstance:
    """Load a matroid instance file; errors as in :func:`load_instance`."""
    inst = matroid_instance_from_dict(_loads(_read(path), str(path)))
    logger.info(f"Loaded matroid instance {inst.name or path}: {inst.matroid.size} elements")
    return inst


def dump_matroid_instance(inst: MatroidInstance, path: Path) -> None:
    text = json.dumps(matroid_instance_to_dict(inst), indent=2) + "\n"
    Path(path).write_text(text, encoding="utf-8")
