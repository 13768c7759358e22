"""Machining economics for multi-tool milling.

The model prices one workpiece that passes through m milling operations.
Each operation i runs at a cutting speed v_i (m/min) and a feed f_i
(mm/tooth); together they fix the machining time, the tool wear and the
cutting power, and therefore the unit cost, the unit time and the profit
rate of the part.  All monetary values share one currency unit, all times
are minutes.

Feasibility is expressed through normalized margins: a constraint of the
form  coefficient * quantity <= 1  is satisfied exactly when its margin is
<= 1.  The boundary counts as feasible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

import numpy as np

__all__ = [
    "ModelError",
    "PlanError",
    "DomainError",
    "ContractError",
    "OperationKind",
    "ToolKind",
    "ToolQuality",
    "EconomicConstants",
    "MachineSpec",
    "ToolSpec",
    "OperationSpec",
    "MillingPlan",
    "DerivedCoefficients",
    "DecisionVector",
    "OperationMargins",
    "SPEED_LIMITS",
    "FEED_LIMITS",
    "default_speed_bounds",
    "default_feed_bounds",
    "derive_coefficients",
    "machining_time",
    "unit_time",
    "unit_cost",
    "profit_rate",
    "cutting_force",
    "constraint_margins",
    "fitness",
    "decision_bounds",
    "plan_warnings",
    "EvalContext",
    "compile_context",
    "BatchEval",
    "batch_evaluate",
]


class ModelError(ValueError):
    """Base class for all model errors."""


class PlanError(ModelError):
    """A plan or one of its components violates a structural invariant."""


class DomainError(ModelError):
    """A numeric argument is outside the mathematical domain of a formula."""


class ContractError(ModelError):
    """Arguments are structurally inconsistent (e.g. dimension mismatch)."""


class OperationKind(str, Enum):
    FACE = "face"
    CORNER = "corner"
    POCKET = "pocket"
    SLOT = "slot"


class ToolKind(str, Enum):
    FACE_MILL = "face_mill"
    END_MILL = "end_mill"


class ToolQuality(str, Enum):
    HSS = "hss"
    CARBIDE = "carbide"


# Recommended cutting-speed windows (m/min) and feed windows (mm/tooth)
# per operation kind.  Plans may override them per operation.
SPEED_LIMITS: dict[OperationKind, tuple[float, float]] = {
    OperationKind.FACE: (60.0, 120.0),
    OperationKind.CORNER: (40.0, 70.0),
    OperationKind.POCKET: (40.0, 70.0),
    OperationKind.SLOT: (30.0, 50.0),
}

FEED_LIMITS: dict[OperationKind, tuple[float, float]] = {
    OperationKind.FACE: (0.05, 0.4),
    OperationKind.CORNER: (0.05, 0.5),
    OperationKind.POCKET: (0.05, 0.5),
    OperationKind.SLOT: (0.05, 0.5),
}


def default_speed_bounds(kind: OperationKind) -> tuple[float, float]:
    return SPEED_LIMITS[OperationKind(kind)]


def default_feed_bounds(kind: OperationKind) -> tuple[float, float]:
    return FEED_LIMITS[OperationKind(kind)]


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise PlanError(message)


def _finite(value: float) -> bool:
    return isinstance(value, (int, float)) and math.isfinite(value)


@dataclass(frozen=True)
class EconomicConstants:
    """Shop-level economics shared by every operation.

    sale_price     revenue per finished part
    material_cost  raw material cost per part
    labor_rate     direct labor cost per minute
    overhead_rate  overhead cost per minute
    setup_time     fixed setup/load/unload time per part, minutes
    """

    sale_price: float
    material_cost: float
    labor_rate: float
    overhead_rate: float
    setup_time: float

    def __post_init__(self) -> None:
        for name in ("sale_price", "material_cost", "labor_rate", "overhead_rate", "setup_time"):
            value = getattr(self, name)
            _require(_finite(value) and value >= 0.0, f"economics.{name} must be finite and >= 0")
        _require(
            self.sale_price > self.material_cost,
            "economics.sale_price must exceed economics.material_cost",
        )

    @property
    def minute_rate(self) -> float:
        """Combined labor plus overhead cost per minute."""
        return self.labor_rate + self.overhead_rate


@dataclass(frozen=True)
class MachineSpec:
    """Milling machine and workpiece-material parameters.

    motor_power          rated motor power, kW
    efficiency           fraction of motor power available at the cutter
    power_constant       material power constant for the force model
    wear_factor          tool wear multiplier in the tool-life relation
    chip_area_exponent   feed exponent from the chip cross-section term
    slenderness_exponent feed exponent from the chip slenderness term
    """

    motor_power: float
    efficiency: float
    power_constant: float
    wear_factor: float
    chip_area_exponent: float
    slenderness_exponent: float

    def __post_init__(self) -> None:
        _require(_finite(self.motor_power) and self.motor_power > 0.0, "machine.motor_power must be > 0")
        _require(
            _finite(self.efficiency) and 0.0 < self.efficiency <= 1.0,
            "machine.efficiency must be in (0, 1]",
        )
        for name in ("power_constant", "wear_factor", "chip_area_exponent", "slenderness_exponent"):
            value = getattr(self, name)
            _require(_finite(value) and value > 0.0, f"machine.{name} must be finite and > 0")


@dataclass(frozen=True)
class ToolSpec:
    """One milling cutter.

    diameter mm, teeth count, price currency, angles degrees, change_time
    minutes.  taylor_constant and life_exponent parameterize the tool-life
    relation; permitted_force (N) is optional and enables the cutting-force
    constraint when present.
    """

    id: int
    kind: ToolKind
    quality: ToolQuality
    diameter: float
    teeth: int
    price: float
    lead_angle: float
    clearance_angle: float
    taylor_constant: float
    life_exponent: float
    change_time: float
    permitted_force: float | None = None

    def __post_init__(self) -> None:
        _require(isinstance(self.id, int) and self.id >= 0, "tool.id must be a non-negative integer")
        _require(_finite(self.diameter) and self.diameter > 0.0, f"tool {self.id}: diameter must be > 0")
        _require(isinstance(self.teeth, int) and self.teeth >= 1, f"tool {self.id}: teeth must be an integer >= 1")
        _require(_finite(self.price) and self.price >= 0.0, f"tool {self.id}: price must be >= 0")
        _require(
            _finite(self.lead_angle) and 0.0 <= self.lead_angle < 90.0,
            f"tool {self.id}: lead_angle must be in [0, 90) degrees",
        )
        _require(
            _finite(self.clearance_angle) and 0.0 < self.clearance_angle < 90.0,
            f"tool {self.id}: clearance_angle must be in (0, 90) degrees",
        )
        _require(
            _finite(self.taylor_constant) and self.taylor_constant > 0.0,
            f"tool {self.id}: taylor_constant must be > 0",
        )
        _require(
            _finite(self.life_exponent) and self.life_exponent > 0.0,
            f"tool {self.id}: life_exponent must be > 0",
        )
        _require(
            _finite(self.change_time) and self.change_time >= 0.0,
            f"tool {self.id}: change_time must be >= 0",
        )
        if self.permitted_force is not None:
            _require(
                _finite(self.permitted_force) and self.permitted_force > 0.0,
                f"tool {self.id}: permitted_force must be > 0 when given",
            )


@dataclass(frozen=True)
class OperationSpec:
    """One milling operation on the process plan.

    axial_depth and radial_depth are the axial and radial engagements in
    mm; travel is the tool path length in mm; surface_finish_req is the
    required surface roughness in micrometers (None disables the finish
    constraint).  radial_depth_assumed marks engagements that were assumed
    rather than measured, so reports can flag them.  k3_override replaces
    the derived tool-wear coefficient for calibration purposes.
    """

    number: int
    kind: OperationKind
    tool_id: int
    axial_depth: float
    radial_depth: float
    travel: float
    speed_bounds: tuple[float, float]
    feed_bounds: tuple[float, float]
    surface_finish_req: float | None = None
    radial_depth_assumed: bool = False
    k3_override: float | None = None

    def __post_init__(self) -> None:
        _require(isinstance(self.number, int) and self.number >= 0, "operation.number must be a non-negative integer")
        label = f"operation {self.number}"
        _require(_finite(self.axial_depth) and self.axial_depth > 0.0, f"{label}: axial_depth must be > 0")
        _require(_finite(self.radial_depth) and self.radial_depth > 0.0, f"{label}: radial_depth must be > 0")
        _require(_finite(self.travel) and self.travel > 0.0, f"{label}: travel must be > 0")
        for name in ("speed_bounds", "feed_bounds"):
            bounds = getattr(self, name)
            _require(
                isinstance(bounds, tuple) and len(bounds) == 2,
                f"{label}: {name} must be a (lower, upper) pair",
            )
            low, high = bounds
            _require(
                _finite(low) and _finite(high) and 0.0 < low <= high,
                f"{label}: {name} must satisfy 0 < lower <= upper",
            )
        if self.surface_finish_req is not None:
            _require(
                _finite(self.surface_finish_req) and self.surface_finish_req > 0.0,
                f"{label}: surface_finish_req must be > 0 when given",
            )
        if self.k3_override is not None:
            _require(
                _finite(self.k3_override) and self.k3_override > 0.0,
                f"{label}: k3_override must be > 0 when given",
            )


@dataclass(frozen=True)
class MillingPlan:
    """A complete process plan: economics, machine, tools and operations."""

    economics: EconomicConstants
    machine: MachineSpec
    tools: tuple[ToolSpec, ...]
    operations: tuple[OperationSpec, ...]

    def __post_init__(self) -> None:
        tool_ids = [tool.id for tool in self.tools]
        _require(len(set(tool_ids)) == len(tool_ids), "tool ids must be unique")
        numbers = [op.number for op in self.operations]
        _require(len(set(numbers)) == len(numbers), "operation numbers must be unique")
        known = set(tool_ids)
        for op in self.operations:
            _require(
                op.tool_id in known,
                f"operation {op.number} references unknown tool id {op.tool_id}",
            )

    @property
    def m(self) -> int:
        """Number of operations."""
        return len(self.operations)

    def tool_for(self, op: OperationSpec) -> ToolSpec:
        for tool in self.tools:
            if tool.id == op.tool_id:
                return tool
        raise PlanError(f"operation {op.number} references unknown tool id {op.tool_id}")


@dataclass(frozen=True)
class DerivedCoefficients:
    """Constant coefficients of one operation, precomputed from the plan.

    k1  machining-time coefficient: t_m = k1 / (v * f), minutes
    k3  tool-wear coefficient in the tool-cost term
    c5  power-constraint coefficient: c5 * v * f**0.8 <= 1
    c6  finish coefficient for face mills: c6 * f <= 1 (None if unused)
    c7  finish coefficient for end mills: c7 * f**2 <= 1 (None if unused)
    c8  force coefficient: c8 * cutting_force <= 1 (None without a limit)
    """

    k1: float
    k3: float
    c5: float
    c6: float | None = None
    c7: float | None = None
    c8: float | None = None

    def __post_init__(self) -> None:
        _require(_finite(self.k1) and self.k1 > 0.0, "k1 must be > 0")
        _require(_finite(self.k3) and self.k3 > 0.0, "k3 must be > 0")
        _require(_finite(self.c5) and self.c5 > 0.0, "c5 must be > 0")
        _require(
            self.c6 is None or self.c7 is None,
            "at most one finish coefficient may be present",
        )
        for name in ("c6", "c7", "c8"):
            value = getattr(self, name)
            if value is not None:
                _require(_finite(value) and value > 0.0, f"{name} must be > 0 when present")


@dataclass(frozen=True)
class DecisionVector:
    """Cutting speeds (m/min) and feeds (mm/tooth), one pair per operation."""

    speeds: tuple[float, ...]
    feeds: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.speeds) != len(self.feeds):
            raise ContractError(
                f"speeds ({len(self.speeds)}) and feeds ({len(self.feeds)}) differ in length"
            )
        for value in (*self.speeds, *self.feeds):
            if not _finite(value):
                raise DomainError("speeds and feeds must be finite numbers")

    def __len__(self) -> int:
        return len(self.speeds)

    def as_genome(self) -> np.ndarray:
        """Concatenate to a flat array [v_1..v_m, f_1..f_m]."""
        return np.asarray(self.speeds + self.feeds, dtype=float)

    @staticmethod
    def from_genome(genome: np.ndarray) -> "DecisionVector":
        flat = np.asarray(genome, dtype=float).ravel()
        if flat.size % 2 != 0:
            raise ContractError(f"genome length {flat.size} is not even")
        m = flat.size // 2
        return DecisionVector(speeds=tuple(flat[:m]), feeds=tuple(flat[m:]))


def derive_coefficients(plan: MillingPlan) -> tuple[DerivedCoefficients, ...]:
    """Precompute the per-operation constants used by every evaluation.

    k1 converts the travel K (mm) into machining time: a cutter of
    diameter d turning at v m/min with z teeth advances f*z mm per
    revolution, so t_m = pi*d*K / (1000*z*v*f) minutes.

    k3 = k1 * (wear_factor / taylor_constant)**(1/life_exponent) feeds the
    tool-cost term unless the operation overrides it.
    """
    machine = plan.machine
    out: list[DerivedCoefficients] = []
    for op in plan.operations:
        tool = plan.tool_for(op)
        k1 = math.pi * tool.diameter * op.travel / (1000.0 * tool.teeth)
        if op.k3_override is not None:
            k3 = op.k3_override
        else:
            k3 = k1 * (machine.wear_factor / tool.taylor_constant) ** (1.0 / tool.life_exponent)
        c5 = (
            0.78
            * machine.power_constant
            * machine.wear_factor
            * tool.teeth
            * op.radial_depth
            * op.axial_depth
            / (60.0 * math.pi * tool.diameter * machine.efficiency * machine.motor_power)
        )
        c6 = c7 = None
        if op.surface_finish_req is not None:
            if tool.kind == ToolKind.FACE_MILL:
                tan_lead = math.tan(math.radians(tool.lead_angle))
                tan_clear = math.tan(math.radians(tool.clearance_angle))
                if tan_clear == 0.0:
                    raise DomainError(
                        f"tool {tool.id}: clearance angle {tool.clearance_angle} has no cotangent"
                    )
                c6 = 318.0 / ((tan_lead + 1.0 / tan_clear) * op.surface_finish_req)
            else:
                c7 = 318.0 / (4.0 * tool.diameter * op.surface_finish_req)
        c8 = None if tool.permitted_force is None else 1.0 / tool.permitted_force
        out.append(DerivedCoefficients(k1=k1, k3=k3, c5=c5, c6=c6, c7=c7, c8=c8))
    return tuple(out)


def _check_positive_pair(v: float, f: float) -> None:
    if not (_finite(v) and _finite(f) and v > 0.0 and f > 0.0):
        raise DomainError(f"cutting speed and feed must be finite and > 0, got v={v}, f={f}")


def _check_dimensions(plan: MillingPlan, x: DecisionVector, coeffs: tuple[DerivedCoefficients, ...]) -> None:
    if len(x) != plan.m or len(coeffs) != plan.m:
        raise ContractError(
            f"plan has {plan.m} operations but got {len(x)} decision pairs and {len(coeffs)} coefficient sets"
        )


def machining_time(op_index: int, v: float, f: float, coeffs: tuple[DerivedCoefficients, ...]) -> float:
    """Cutting time of one operation in minutes: k1 / (v * f)."""
    _check_positive_pair(v, f)
    return coeffs[op_index].k1 / (v * f)


def unit_time(plan: MillingPlan, x: DecisionVector, coeffs: tuple[DerivedCoefficients, ...]) -> float:
    """Total time per part: setup, machining of every operation, tool changes."""
    _check_dimensions(plan, x, coeffs)
    total = plan.economics.setup_time
    for i, op in enumerate(plan.operations):
        total += machining_time(i, x.speeds[i], x.feeds[i], coeffs)
        total += plan.tool_for(op).change_time
    return total


def unit_cost(plan: MillingPlan, x: DecisionVector, coeffs: tuple[DerivedCoefficients, ...]) -> float:
    """Total cost per part.

    Sums material, setup labor/overhead, machining labor/overhead, tool
    wear priced per fractional tool life consumed, and tool-change
    labor/overhead.
    """
    _check_dimensions(plan, x, coeffs)
    eco = plan.economics
    machine = plan.machine
    rate = eco.minute_rate
    total = eco.material_cost + rate * eco.setup_time
    feed_exponent_base = machine.chip_area_exponent + machine.slenderness_exponent
    for i, op in enumerate(plan.operations):
        v, f = x.speeds[i], x.feeds[i]
        tool = plan.tool_for(op)
        total += rate * machining_time(i, v, f, coeffs)
        life_inv = 1.0 / tool.life_exponent
        total += (
            tool.price
            * coeffs[i].k3
            * v ** (life_inv - 1.0)
            * f ** (feed_exponent_base * life_inv - 1.0)
        )
        total += rate * tool.change_time
    return total


def profit_rate(plan: MillingPlan, x: DecisionVector, coeffs: tuple[DerivedCoefficients, ...]) -> float:
    """Profit per minute: (sale_price - unit_cost) / unit_time."""
    return (plan.economics.sale_price - unit_cost(plan, x, coeffs)) / unit_time(plan, x, coeffs)


def cutting_force(op_index: int, f: float, plan: MillingPlan) -> float:
    """Tangential cutting force in newtons at feed f.

    Grows with f**0.8 and with the engaged cross-section; sized so that
    force * v / 60000 equals the cutting power in kW.
    """
    if not (_finite(f) and f > 0.0):
        raise DomainError(f"feed must be finite and > 0, got f={f}")
    op = plan.operations[op_index]
    tool = plan.tool_for(op)
    machine = plan.machine
    return (
        780.0
        * machine.power_constant
        * machine.wear_factor
        * tool.teeth
        * op.radial_depth
        * op.axial_depth
        * f**0.8
        / (math.pi * tool.diameter)
    )


@dataclass(frozen=True)
class OperationMargins:
    """Normalized constraint margins of one operation.

    Margins <= 1 are satisfied; None means the constraint does not apply
    and counts as satisfied.  speed_ok and feed_ok report the box bounds.
    """

    operation: int
    power: float
    finish: float | None
    force: float | None
    speed_ok: bool
    feed_ok: bool

    @property
    def power_ok(self) -> bool:
        return self.power <= 1.0

    @property
    def finish_ok(self) -> bool:
        return self.finish is None or self.finish <= 1.0

    @property
    def force_ok(self) -> bool:
        return self.force is None or self.force <= 1.0

    @property
    def satisfied(self) -> bool:
        return self.power_ok and self.finish_ok and self.force_ok and self.speed_ok and self.feed_ok

    def items(self) -> Iterator[tuple[str, float | None, bool]]:
        yield "power", self.power, self.power_ok
        yield "finish", self.finish, self.finish_ok
        yield "force", self.force, self.force_ok
        yield "speed_box", None, self.speed_ok
        yield "feed_box", None, self.feed_ok


def constraint_margins(
    plan: MillingPlan, x: DecisionVector, coeffs: tuple[DerivedCoefficients, ...]
) -> tuple[OperationMargins, ...]:
    """Evaluate every constraint of every operation at the point x."""
    _check_dimensions(plan, x, coeffs)
    out: list[OperationMargins] = []
    for i, op in enumerate(plan.operations):
        v, f = x.speeds[i], x.feeds[i]
        _check_positive_pair(v, f)
        c = coeffs[i]
        power = c.c5 * v * f**0.8
        if c.c6 is not None:
            finish: float | None = c.c6 * f
        elif c.c7 is not None:
            finish = c.c7 * f**2
        else:
            finish = None
        force = None if c.c8 is None else c.c8 * cutting_force(i, f, plan)
        speed_ok = op.speed_bounds[0] <= v <= op.speed_bounds[1]
        feed_ok = op.feed_bounds[0] <= f <= op.feed_bounds[1]
        out.append(
            OperationMargins(
                operation=op.number,
                power=power,
                finish=finish,
                force=force,
                speed_ok=speed_ok,
                feed_ok=feed_ok,
            )
        )
    return tuple(out)


def fitness(plan: MillingPlan, x: DecisionVector, coeffs: tuple[DerivedCoefficients, ...]) -> float:
    """Death-penalty objective: profit rate if feasible, exactly 0.0 otherwise."""
    margins = constraint_margins(plan, x, coeffs)
    if any(not m.satisfied for m in margins):
        return 0.0
    return profit_rate(plan, x, coeffs)


def decision_bounds(plan: MillingPlan) -> tuple[np.ndarray, np.ndarray]:
    """Box bounds of the flat decision vector [v_1..v_m, f_1..f_m]."""
    lower = np.array(
        [op.speed_bounds[0] for op in plan.operations]
        + [op.feed_bounds[0] for op in plan.operations],
        dtype=float,
    )
    upper = np.array(
        [op.speed_bounds[1] for op in plan.operations]
        + [op.feed_bounds[1] for op in plan.operations],
        dtype=float,
    )
    return lower, upper


def plan_warnings(plan: MillingPlan) -> tuple[str, ...]:
    """Advisory notes a report should carry alongside any result."""
    notes: list[str] = []
    for op in plan.operations:
        tool = plan.tool_for(op)
        if op.radial_depth_assumed:
            notes.append(
                f"operation {op.number}: radial depth {op.radial_depth:g} mm is an assumed engagement value"
            )
        if tool.permitted_force is None:
            notes.append(
                f"operation {op.number}: tool {tool.id} has no permitted cutting force; force constraint skipped"
            )
    return tuple(notes)


@dataclass(frozen=True)
class EvalContext:
    """Plan constants packed into arrays for batch evaluation."""

    sale_price: float
    rate: float
    cost_fixed: float
    time_fixed: float
    k1: np.ndarray
    tool_cost_coef: np.ndarray
    speed_exponent: np.ndarray
    feed_exponent: np.ndarray
    c5: np.ndarray
    finish_coef: np.ndarray
    finish_power: np.ndarray
    force_coef: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    @property
    def m(self) -> int:
        return self.k1.size


def compile_context(plan: MillingPlan, coeffs: tuple[DerivedCoefficients, ...]) -> EvalContext:
    """Flatten a plan into the arrays batch_evaluate needs."""
    if len(coeffs) != plan.m:
        raise ContractError(f"plan has {plan.m} operations but got {len(coeffs)} coefficient sets")
    eco = plan.economics
    machine = plan.machine
    rate = eco.minute_rate
    tools = [plan.tool_for(op) for op in plan.operations]
    change_total = sum(tool.change_time for tool in tools)
    feed_exponent_base = machine.chip_area_exponent + machine.slenderness_exponent

    finish_coef = np.zeros(plan.m)
    finish_power = np.ones(plan.m)
    force_coef = np.zeros(plan.m)
    for i, op in enumerate(plan.operations):
        c = coeffs[i]
        if c.c6 is not None:
            finish_coef[i], finish_power[i] = c.c6, 1.0
        elif c.c7 is not None:
            finish_coef[i], finish_power[i] = c.c7, 2.0
        if c.c8 is not None:
            # margin = c8 * force = (c8 * force-at-unit-feed) * f**0.8
            force_coef[i] = c.c8 * cutting_force(i, 1.0, plan)

    lower, upper = decision_bounds(plan)
    return EvalContext(
        sale_price=eco.sale_price,
        rate=rate,
        cost_fixed=eco.material_cost + rate * (eco.setup_time + change_total),
        time_fixed=eco.setup_time + change_total,
        k1=np.array([c.k1 for c in coeffs]),
        tool_cost_coef=np.array([tools[i].price * coeffs[i].k3 for i in range(plan.m)]),
        speed_exponent=np.array([1.0 / tool.life_exponent - 1.0 for tool in tools]),
        feed_exponent=np.array(
            [feed_exponent_base / tool.life_exponent - 1.0 for tool in tools]
        ),
        c5=np.array([c.c5 for c in coeffs]),
        finish_coef=finish_coef,
        finish_power=finish_power,
        force_coef=force_coef,
        lower=lower,
        upper=upper,
    )


@dataclass(frozen=True)
class BatchEval:
    """Vectorized evaluation of n decision vectors."""

    fitness: np.ndarray
    unit_cost: np.ndarray
    unit_time: np.ndarray
    feasible: np.ndarray


def batch_evaluate(ctx: EvalContext, genomes: np.ndarray) -> BatchEval:
    """Evaluate an (n, 2m) array of decision vectors in one pass.

    Matches the scalar functions exactly: same formulas, same inclusive
    margin comparisons, same death penalty.
    """
    points = np.atleast_2d(np.asarray(genomes, dtype=float))
    m = ctx.m
    if points.shape[1] != 2 * m:
        raise ContractError(f"expected genomes of length {2 * m}, got {points.shape[1]}")
    v = points[:, :m]
    f = points[:, m:]
    if not np.all(np.isfinite(points)) or np.any(points <= 0.0):
        raise DomainError("all speeds and feeds must be finite and > 0")

    t_machining = ctx.k1 / (v * f)
    time_total = ctx.time_fixed + t_machining.sum(axis=1)
    cost_total = (
        ctx.cost_fixed
        + ctx.rate * t_machining.sum(axis=1)
        + (ctx.tool_cost_coef * v**ctx.speed_exponent * f**ctx.feed_exponent).sum(axis=1)
    )
    f_power = f**0.8
    ok = ctx.c5 * v * f_power <= 1.0
    ok &= ctx.finish_coef * f**ctx.finish_power <= 1.0
    ok &= ctx.force_coef * f_power <= 1.0
    ok &= (v >= ctx.lower[:m]) & (v <= ctx.upper[:m])
    ok &= (f >= ctx.lower[m:]) & (f <= ctx.upper[m:])
    feasible = ok.all(axis=1)

    rate_of_profit = (ctx.sale_price - cost_total) / time_total
    return BatchEval(
        fitness=np.where(feasible, rate_of_profit, 0.0),
        unit_cost=cost_total,
        unit_time=time_total,
        feasible=feasible,
    )
