"""Scenario files: schema, unit conversion and YAML round-trip.

Files carry the field units of the experiment table (kW, mF, kV); all
internal computation is SI (W, F, V, rad/s). Cost coefficients are given
in $/kW^2h and mapped to the controller's working scale by
``cost_scale`` (see DEFAULT_COST_SCALE).
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np
import yaml

from .errors import ScenarioError
from .grid import CommGraph, GridTopology
from .inverter import InverterParams
from .network import NetworkParams

# Working scale for the cost coefficients in the controller dynamics.
# Only ratios of the q_i affect the dispatch and the sharing, but the
# absolute scale sets the secondary-loop gain. The raw $/kW^2h figures
# make the integral action far too slow in SI watts, while a full
# kW->W rescaling (1e-6) makes the xi dynamics orders of magnitude
# stiffer than the default step supports. The default below reproduces
# a smooth seconds-scale regulation consistent with the reported
# maximum ROCOF, and is configurable per scenario.
DEFAULT_COST_SCALE = 0.1

PRIMARY = "primary"
SECONDARY = "secondary"


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step RK4 settings."""

    h: float = 5e-5         # s
    t_end: float = 20.0     # s
    record_every: int = 20  # decimation of recorded samples
    omega_min: float = 1.0  # rad/s domain guard

    def __post_init__(self):
        if self.h <= 0 or self.t_end <= 0:
            raise ScenarioError("integrator: h_s and t_end_s must be positive")
        if self.record_every < 1:
            raise ScenarioError("integrator: record_every must be >= 1")


@dataclass(frozen=True)
class LoadEvent:
    """Scheduled load step: the node's load becomes new_load (absolute, W)."""

    time: float
    node: int       # 0-based
    new_load: float


@dataclass
class Scenario:
    """Fully validated scenario in SI units."""

    topology: GridTopology
    inverters: list
    params: NetworkParams
    loads: np.ndarray          # W
    q_cost: np.ndarray         # raw file values, $/kW^2h
    cost_scale: float
    mode: str
    comm: CommGraph = None     # secondary mode only
    p_m_star: np.ndarray = None  # W, primary mode only
    events: list = field(default_factory=list)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    f_nominal: float = 50.0

    @property
    def q_eff(self):
        """Cost diagonal at the controller's working scale."""
        return self.q_cost * self.cost_scale

    @property
    def n(self):
        return self.topology.n


def _require(mapping, key, where):
    if key not in mapping:
        raise ScenarioError(f"{where}: missing field '{key}'")
    return mapping[key]


def _node_array(nodes, key, where="topology.nodes"):
    out = []
    for idx, node in enumerate(nodes):
        val = _require(node, key, f"{where}[{idx}]")
        try:
            out.append(float(val))
        except (TypeError, ValueError):
            raise ScenarioError(f"{where}[{idx}].{key}: not a number: {val!r}")
    return np.array(out)


def from_dict(doc) -> Scenario:
    """Build a Scenario from a parsed scenario document."""
    if not isinstance(doc, dict):
        raise ScenarioError("scenario root must be a mapping")

    nominal = doc.get("nominal", {})
    f_hz = float(nominal.get("f_hz", 50.0))
    if f_hz not in (50.0, 60.0):
        raise ScenarioError(f"nominal.f_hz: expected 50 or 60, got {f_hz}")
    omega_star = 2.0 * math.pi * f_hz

    topo_doc = _require(doc, "topology", "scenario")
    nodes = _require(topo_doc, "nodes", "topology")
    if not nodes:
        raise ScenarioError("topology.nodes: at least one node required")
    n = len(nodes)

    vmag = _node_array(nodes, "vmag_V")
    v_dc = _node_array(nodes, "v_dc_star_kV") * 1e3
    c_dc = _node_array(nodes, "c_dc_mF") * 1e-3
    g_dc = _node_array(nodes, "g_dc_S")
    q_cost = _node_array(nodes, "q_cost")
    loads = _node_array(nodes, "p_load_kW") * 1e3

    edges, reactance = [], []
    for idx, e in enumerate(topo_doc.get("edges", [])):
        i = int(_require(e, "i", f"topology.edges[{idx}]"))
        j = int(_require(e, "j", f"topology.edges[{idx}]"))
        x = float(_require(e, "reactance_ohm", f"topology.edges[{idx}]"))
        if x <= 0:
            raise ScenarioError(
                f"topology.edges[{idx}] ({i},{j}): reactance_ohm must be positive")
        edges.append((i - 1, j - 1))
        reactance.append(x)
    topology = GridTopology(n=n, edges=edges, reactance=reactance, vmag=vmag)

    inverters = [InverterParams(c_dc=c_dc[i], g_dc=g_dc[i], v_dc_star=v_dc[i],
                                omega_star=omega_star) for i in range(n)]

    ctrl = doc.get("controller", {})
    mode = ctrl.get("mode", SECONDARY)
    if mode not in (PRIMARY, SECONDARY):
        raise ScenarioError(f"controller.mode: expected primary|secondary, got {mode!r}")
    d_tilde = ctrl.get("d_tilde", 0.0)
    d_tilde = np.full(n, float(d_tilde)) if np.isscalar(d_tilde) else \
        np.asarray(d_tilde, dtype=float)
    if len(d_tilde) != n:
        raise ScenarioError("controller.d_tilde: scalar or one value per node")
    cost_scale = float(ctrl.get("cost_scale", DEFAULT_COST_SCALE))
    if cost_scale <= 0:
        raise ScenarioError("controller.cost_scale must be positive")
    if np.any(q_cost <= 0):
        raise ScenarioError("topology.nodes: q_cost must be positive")

    params = NetworkParams.from_inverters(inverters, d_tilde=d_tilde)

    comm = None
    p_m_star = None
    if mode == SECONDARY:
        comm_edges, weights = [], []
        for idx, e in enumerate(doc.get("comm_edges", [])):
            i = int(_require(e, "i", f"comm_edges[{idx}]"))
            j = int(_require(e, "j", f"comm_edges[{idx}]"))
            comm_edges.append((i - 1, j - 1))
            weights.append(float(e.get("weight", 1.0)))
        comm = CommGraph(n=n, edges=comm_edges, weights=weights)
    else:
        p_m_star = ctrl.get("p_m_star_kW")
        if p_m_star is None:
            p_m_star = loads.copy()   # setpoints default to the nominal loads
        else:
            p_m_star = np.asarray(p_m_star, dtype=float) * 1e3
            if len(p_m_star) != n:
                raise ScenarioError("controller.p_m_star_kW: one value per node")

    integ_doc = doc.get("integrator", {})
    integ = IntegratorConfig(
        h=float(integ_doc.get("h_s", 5e-5)),
        t_end=float(integ_doc.get("t_end_s", 20.0)),
        record_every=int(integ_doc.get("record_every", 20)),
        omega_min=float(integ_doc.get("omega_min_rad_s", 1.0)))

    events = []
    for idx, e in enumerate(doc.get("events", [])):
        t = float(_require(e, "t_s", f"events[{idx}]"))
        node = int(_require(e, "node", f"events[{idx}]")) - 1
        new_load = float(_require(e, "new_load_kW", f"events[{idx}]")) * 1e3
        if not 0 <= t <= integ.t_end:
            raise ScenarioError(f"events[{idx}]: t_s outside [0, t_end]")
        if not 0 <= node < n:
            raise ScenarioError(f"events[{idx}]: node out of range")
        events.append(LoadEvent(time=t, node=node, new_load=new_load))
    events.sort(key=lambda ev: ev.time)

    return Scenario(topology=topology, inverters=inverters, params=params,
                    loads=loads, q_cost=q_cost, cost_scale=cost_scale,
                    mode=mode, comm=comm, p_m_star=p_m_star, events=events,
                    integrator=integ, f_nominal=f_hz)


def to_dict(sc: Scenario):
    """Canonical document for a Scenario (inverse of from_dict)."""
    doc = {
        "nominal": {"f_hz": sc.f_nominal},
        "topology": {
            "nodes": [
                {"vmag_V": float(sc.topology.vmag[i]),
                 "v_dc_star_kV": float(sc.inverters[i].v_dc_star / 1e3),
                 "c_dc_mF": float(sc.inverters[i].c_dc * 1e3),
                 "g_dc_S": float(sc.inverters[i].g_dc),
                 "q_cost": float(sc.q_cost[i]),
                 "p_load_kW": float(sc.loads[i] / 1e3)}
                for i in range(sc.n)],
            "edges": [
                {"i": i + 1, "j": j + 1, "reactance_ohm": float(x)}
                for (i, j), x in zip(sc.topology.edges, sc.topology.reactance)],
        },
        "controller": {"mode": sc.mode,
                       "d_tilde": [float(v) for v in sc.params.d_tilde],
                       "cost_scale": sc.cost_scale},
        "integrator": {"h_s": sc.integrator.h, "t_end_s": sc.integrator.t_end,
                       "record_every": sc.integrator.record_every,
                       "omega_min_rad_s": sc.integrator.omega_min},
        "events": [{"t_s": ev.time, "node": ev.node + 1,
                    "new_load_kW": float(ev.new_load / 1e3)} for ev in sc.events],
    }
    if sc.mode == SECONDARY:
        doc["comm_edges"] = [
            {"i": i + 1, "j": j + 1, "weight": float(w)}
            for (i, j), w in zip(sc.comm.edges, sc.comm.weights)]
    else:
        doc["controller"]["p_m_star_kW"] = [float(v / 1e3) for v in sc.p_m_star]
    return doc


def load(path) -> Scenario:
    """Read and validate a scenario file."""
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}")
    except yaml.YAMLError as exc:
        raise ScenarioError(f"scenario parse error: {exc}")
    return from_dict(doc)


def dump(sc: Scenario, path):
    """Write the canonical document back to a file."""
    with open(path, "w") as fh:
        yaml.safe_dump(to_dict(sc), fh, sort_keys=False)


def bundled_path(name):
    """Path to a scenario shipped with the package, e.g. 'table1'."""
    from importlib import resources
    res = resources.files("icisim") / "scenarios" / f"{name}.scenario"
    if not res.is_file():
        raise ScenarioError(f"no bundled scenario named {name!r}")
    return res
