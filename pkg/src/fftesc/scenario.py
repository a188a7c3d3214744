"""JSON scenario files: strict parsing, resolution of defaults, serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .controller import Sense
from .design import DEFAULT_D, DitherSet, MapBounds, gain_interval, window_length
from .plants import (
    Branch,
    Disturbance,
    DisturbanceError,
    FlowType,
    HeatExchangerNetwork,
    QuadraticMap,
    Turbine,
    WindFarm,
    validate_schedule,
)
from .plants.heatex import DEFAULT_SPLIT_FLOOR
from .sim import NoiseSpec, Scenario
from .spectral import DitherSpec, GradientMethod

# Toolkit defaults for the recovery network; none of these come from measured data.
HEATEX_DEFAULTS = {
    "cold_inlet_temp": 60.0,
    "cold_flow": 100.0,
    "heat_capacity": 4.2,
    "flow_type": FlowType.COUNTER_CURRENT.value,
    "split_floor": DEFAULT_SPLIT_FLOOR,
}
BRANCH_DEFAULTS = {"ua": 5e4, "hot_flow": 15.0}


class ScenarioError(ValueError):
    """The scenario file is malformed or inconsistent."""


@dataclass
class ScenarioFile:
    """A parsed scenario plus everything needed to reproduce and report it."""

    scenario: Scenario
    name: str | None = None
    map_bounds: MapBounds | None = None
    defaults_applied: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        """Fully resolved form; parsing it back yields an equal scenario."""
        sc = self.scenario
        out: dict[str, Any] = {}
        if self.name is not None:
            out["name"] = self.name
        out["plant"] = _plant_to_dict(sc.plant)
        out["dithers"] = [
            {"amplitude": d.amplitude, "frequency": str(d.frequency), "phase": d.phase}
            for d in sc.dithers
        ]
        ctrl: dict[str, Any] = {
            "u0": list(sc.u0),
            "gains": list(sc.gains),
            "sense": sc.sense.value,
            "box": [list(b) for b in sc.box] if sc.box is not None else None,
            "method": sc.method.value,
        }
        if self.map_bounds is not None:
            mb = self.map_bounds
            ctrl["map_bounds"] = {
                "alpha1": mb.alpha1,
                "alpha2": mb.alpha2,
                "hessian_bound": list(mb.hessian_bound),
                "d": mb.d,
            }
        out["controller"] = ctrl
        out["run"] = {
            "steps": sc.total_steps,
            "N": sc.window,
            "noise": {"std": sc.noise.std, "seed": sc.noise.seed} if sc.noise else None,
            "disturbances": [
                {"step": d.step, "path": d.path, "value": d.value} for d in sc.disturbances
            ],
            "spectrogram_stride": sc.stride,
        }
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def load(path: str | Path) -> ScenarioFile:
    text = Path(path).read_text()
    return loads(text)


def loads(text: str) -> ScenarioFile:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"line {exc.lineno}: invalid JSON: {exc.msg}") from None
    return _Parser(text).parse(raw)


def _plant_to_dict(plant: Any) -> dict[str, Any]:
    if isinstance(plant, QuadraticMap):
        def _v(x: Any) -> Any:
            return list(x) if isinstance(x, tuple) else x

        return {
            "type": "quadratic",
            "curvature": _v(plant.curvature),
            "optimum": _v(plant.optimum),
            "offset": plant.offset,
        }
    if isinstance(plant, WindFarm):
        return {
            "type": "wind_farm",
            "turbines": [{"x": t.x, "y": t.y, "diameter": t.diameter} for t in plant.turbines],
            "roughness": plant.roughness,
            "free_stream": plant.free_stream,
            "air_density": plant.air_density,
            "power_unit": plant.power_unit,
        }
    if isinstance(plant, HeatExchangerNetwork):
        return {
            "type": "heat_exchanger",
            "branches": [
                {"hot_inlet_temp": b.hot_inlet_temp, "ua": b.ua, "hot_flow": b.hot_flow}
                for b in plant.branches
            ],
            "cold_inlet_temp": plant.cold_inlet_temp,
            "cold_flow": plant.cold_flow,
            "heat_capacity": plant.heat_capacity,
            "flow_type": plant.flow_type.value,
            "split_floor": plant.split_floor,
        }
    raise TypeError(f"cannot serialize plant of type {type(plant).__name__}")


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.defaults: list[str] = []

    def _line(self, needle: Any) -> str:
        token = json.dumps(needle) if not isinstance(needle, str) else f'"{needle}"'
        for i, line in enumerate(self.text.splitlines(), start=1):
            if token in line:
                return f"line {i}: "
        return ""

    def fail(self, msg: str, needle: Any = None) -> ScenarioError:
        prefix = self._line(needle) if needle is not None else ""
        return ScenarioError(prefix + msg)

    def section(
        self, obj: Any, where: str, required: set[str], optional: set[str] = frozenset()
    ) -> dict[str, Any]:
        if not isinstance(obj, dict):
            raise self.fail(f"{where} must be an object")
        unknown = set(obj) - required - optional
        if unknown:
            key = sorted(unknown)[0]
            raise self.fail(f"{where}: unknown key {key!r}", key)
        missing = required - set(obj)
        if missing:
            raise self.fail(f"{where}: missing key {sorted(missing)[0]!r}")
        return obj

    def number(self, value: Any, where: str) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.fail(f"{where} must be a number, got {value!r}", value)
        return float(value)

    def integer(self, value: Any, where: str) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise self.fail(f"{where} must be an integer, got {value!r}", value)
        return value

    def numbers(self, value: Any, where: str) -> tuple[float, ...]:
        if not isinstance(value, list) or not value:
            raise self.fail(f"{where} must be a non-empty list of numbers")
        return tuple(self.number(v, f"{where}[{i}]") for i, v in enumerate(value))

    def default(self, obj: dict[str, Any], key: str, value: Any, where: str) -> Any:
        if key in obj:
            return obj[key]
        self.defaults.append(f"{where}.{key} = {value!r}")
        return value

    def parse(self, raw: Any) -> ScenarioFile:
        top = self.section(raw, "scenario", {"plant", "dithers", "controller", "run"}, {"name"})
        name = top.get("name")
        if name is not None and not isinstance(name, str):
            raise self.fail("name must be a string")
        plant = self.plant(top["plant"])
        dithers = self.dithers(top["dithers"])
        run = self.section(
            top["run"],
            "run",
            {"steps", "N"},
            {"noise", "disturbances", "spectrogram_stride"},
        )
        n = self.window(run["N"], dithers)
        ctrl, bounds = self.controller(top["controller"], len(dithers), n)
        if plant.n_inputs != len(dithers):
            raise self.fail(
                f"plant takes {plant.n_inputs} inputs but {len(dithers)} dithers were given"
            )
        steps = self.integer(run["steps"], "run.steps")
        if steps < 1:
            raise self.fail("run.steps must be positive", steps)
        noise = self.noise(run.get("noise"))
        disturbances = self.disturbances(self.default(run, "disturbances", [], "run"))
        try:
            validate_schedule(plant, disturbances)
        except (DisturbanceError, TypeError, ValueError) as exc:
            raise self.fail(f"run.disturbances: {exc}") from None
        stride = run.get("spectrogram_stride")
        if stride is None:
            stride = max(1, n // 4)
            self.defaults.append(f"run.spectrogram_stride = {stride} (N/4)")
        stride = self.integer(stride, "run.spectrogram_stride")
        if stride < 1:
            raise self.fail("run.spectrogram_stride must be positive", stride)
        scenario = Scenario(
            plant=plant,
            dithers=dithers,
            total_steps=steps,
            n=n,
            noise=noise,
            disturbances=disturbances,
            spectrogram_stride=stride,
            **ctrl,
        )
        return ScenarioFile(
            scenario=scenario, name=name, map_bounds=bounds, defaults_applied=self.defaults
        )

    def plant(self, obj: Any) -> Any:
        if not isinstance(obj, dict) or "type" not in obj:
            raise self.fail("plant must be an object with a 'type'")
        kind = obj["type"]
        try:
            if kind == "quadratic":
                p = self.section(obj, "plant", {"type", "curvature", "optimum", "offset"})
                c, u = p["curvature"], p["optimum"]
                if isinstance(c, list) or isinstance(u, list):
                    c = self.numbers(c, "plant.curvature")
                    u = self.numbers(u, "plant.optimum")
                else:
                    c = self.number(c, "plant.curvature")
                    u = self.number(u, "plant.optimum")
                return QuadraticMap(c, u, self.number(p["offset"], "plant.offset"))
            if kind == "wind_farm":
                p = self.section(
                    obj,
                    "plant",
                    {"type", "turbines", "roughness", "free_stream", "air_density", "power_unit"},
                )
                if not isinstance(p["turbines"], list) or not p["turbines"]:
                    raise self.fail("plant.turbines must be a non-empty list")
                turbines = []
                for i, t in enumerate(p["turbines"]):
                    t = self.section(t, f"plant.turbines[{i}]", {"x", "y", "diameter"})
                    turbines.append(
                        Turbine(
                            self.number(t["x"], "x"),
                            self.number(t["y"], "y"),
                            self.number(t["diameter"], "diameter"),
                        )
                    )
                return WindFarm(
                    turbines=tuple(turbines),
                    roughness=self.number(p["roughness"], "plant.roughness"),
                    free_stream=self.number(p["free_stream"], "plant.free_stream"),
                    air_density=self.number(p["air_density"], "plant.air_density"),
                    power_unit=p["power_unit"],
                )
            if kind == "heat_exchanger":
                p = self.section(obj, "plant", {"type", "branches"}, set(HEATEX_DEFAULTS))
                if not isinstance(p["branches"], list):
                    raise self.fail("plant.branches must be a list")
                branches = []
                for i, b in enumerate(p["branches"]):
                    where = f"plant.branches[{i}]"
                    b = self.section(b, where, {"hot_inlet_temp"}, set(BRANCH_DEFAULTS))
                    branches.append(
                        Branch(
                            hot_inlet_temp=self.number(b["hot_inlet_temp"], where),
                            ua=self.number(self.default(b, "ua", BRANCH_DEFAULTS["ua"], where), where),
                            hot_flow=self.number(
                                self.default(b, "hot_flow", BRANCH_DEFAULTS["hot_flow"], where), where
                            ),
                        )
                    )
                kw = {k: self.default(p, k, v, "plant") for k, v in HEATEX_DEFAULTS.items()}
                for k in ("cold_inlet_temp", "cold_flow", "heat_capacity", "split_floor"):
                    kw[k] = self.number(kw[k], f"plant.{k}")
                return HeatExchangerNetwork(branches=tuple(branches), **kw)
        except ScenarioError:
            raise
        except ValueError as exc:
            raise self.fail(f"plant: {exc}") from None
        raise self.fail(f"unknown plant type {kind!r}", kind)

    def dithers(self, obj: Any) -> DitherSet:
        if not isinstance(obj, list) or not obj:
            raise self.fail("dithers must be a non-empty list")
        out = []
        seen: dict[Fraction, int] = {}
        for i, d in enumerate(obj):
            where = f"dithers[{i}]"
            d = self.section(d, where, {"amplitude", "frequency"}, {"phase"})
            f_raw = d["frequency"]
            if not isinstance(f_raw, str):
                raise self.fail(f'{where}.frequency must be a string like "17/128"', f_raw)
            try:
                f = Fraction(f_raw.strip())
            except (ValueError, ZeroDivisionError):
                raise self.fail(f"{where}: malformed rational frequency {f_raw!r}", f_raw) from None
            if f in seen:
                raise self.fail(
                    f"{where}: duplicate channel, frequency {f} already used by "
                    f"dithers[{seen[f]}]",
                    f_raw,
                )
            seen[f] = i
            phase = self.number(self.default(d, "phase", 0.0, where), f"{where}.phase")
            try:
                out.append(DitherSpec(self.number(d["amplitude"], where), f, phase))
            except ValueError as exc:
                raise self.fail(f"{where}: {exc}", f_raw) from None
        return DitherSet(tuple(out))

    def window(self, value: Any, dithers: DitherSet) -> int:
        if value == "auto":
            return window_length(dithers, 1)
        n = self.integer(value, "run.N")
        if n < 2:
            raise self.fail("run.N must be at least 2", n)
        return n

    def controller(
        self, obj: Any, m: int, n: int
    ) -> tuple[dict[str, Any], MapBounds | None]:
        c = self.section(
            obj,
            "controller",
            {"u0", "gains", "sense"},
            {"box", "method", "map_bounds", "gain_fraction"},
        )
        u0 = self.numbers(c["u0"], "controller.u0")
        if len(u0) != m:
            raise self.fail(f"controller.u0 has {len(u0)} entries for {m} channels")
        try:
            sense = Sense(c["sense"])
            method = GradientMethod(self.default(c, "method", GradientMethod.AMPLITUDE_PHASE_SIGN.value, "controller"))
        except ValueError as exc:
            raise self.fail(f"controller: {exc}") from None
        bounds = None
        if c.get("map_bounds") is not None:
            mb = self.section(
                c["map_bounds"], "controller.map_bounds", {"alpha1", "alpha2", "hessian_bound"}, {"d"}
            )
            hb = mb["hessian_bound"]
            hb = self.numbers(hb, "hessian_bound") if isinstance(hb, list) else (self.number(hb, "hessian_bound"),)
            try:
                bounds = MapBounds(
                    self.number(mb["alpha1"], "alpha1"),
                    self.number(mb["alpha2"], "alpha2"),
                    hb,
                    self.number(self.default(mb, "d", DEFAULT_D, "controller.map_bounds"), "d"),
                )
                bounds.for_channels(m)
            except ValueError as exc:
                raise self.fail(f"controller.map_bounds: {exc}") from None
        gains_raw = c["gains"]
        if gains_raw == "auto":
            if bounds is None or "gain_fraction" not in c:
                raise self.fail('gains "auto" needs controller.map_bounds and controller.gain_fraction')
            frac = self.number(c["gain_fraction"], "controller.gain_fraction")
            if not 0 < frac < 1:
                raise self.fail("controller.gain_fraction must lie in (0, 1)", frac)
            gains = tuple(frac * k for k in gain_interval(bounds, n, m))
        else:
            if "gain_fraction" in c:
                raise self.fail("controller.gain_fraction only applies to gains \"auto\"")
            gains = self.numbers(gains_raw, "controller.gains")
            if len(gains) != m:
                raise self.fail(f"controller.gains has {len(gains)} entries for {m} channels")
            if any(g < 0 for g in gains):
                raise self.fail("controller.gains must be non-negative; set sense to maximize")
        box = c.get("box")
        if box is not None:
            if not isinstance(box, list) or len(box) != m:
                raise self.fail(f"controller.box must list {m} [lo, hi] pairs")
            pairs = []
            for i, pair in enumerate(box):
                lo, hi = self.numbers(pair, f"controller.box[{i}]")
                if lo > hi:
                    raise self.fail(f"controller.box[{i}] has lo > hi")
                pairs.append((lo, hi))
            box = tuple(pairs)
        return (
            {"u0": u0, "gains": gains, "sense": sense, "box": box, "method": method},
            bounds,
        )

    def noise(self, obj: Any) -> NoiseSpec | None:
        if obj is None:
            return None
        obj = self.section(obj, "run.noise", {"std", "seed"})
        std = self.number(obj["std"], "run.noise.std")
        if std < 0:
            raise self.fail("run.noise.std must be non-negative", obj["std"])
        return NoiseSpec(std=std, seed=self.integer(obj["seed"], "run.noise.seed"))

    def disturbances(self, obj: Any) -> tuple[Disturbance, ...]:
        if not isinstance(obj, list):
            raise self.fail("run.disturbances must be a list")
        out = []
        for i, d in enumerate(obj):
            d = self.section(d, f"run.disturbances[{i}]", {"step", "path", "value"})
            step = self.integer(d["step"], "step")
            if not isinstance(d["path"], str):
                raise self.fail(f"run.disturbances[{i}].path must be a string")
            out.append(Disturbance(step, d["path"], self.number(d["value"], "value")))
        return tuple(out)
