"""Shared fixtures: the bundled plan plus small hand-checkable instances."""

from __future__ import annotations

import pytest

from millopt import (
    EconomicConstants,
    MachineSpec,
    MillingPlan,
    OperationKind,
    OperationSpec,
    ToolKind,
    ToolQuality,
    ToolSpec,
    builtin_case,
    derive_coefficients,
)

STANDARD_ECONOMICS = EconomicConstants(
    sale_price=25.0,
    material_cost=0.5,
    labor_rate=0.45,
    overhead_rate=1.45,
    setup_time=2.0,
)

STANDARD_MACHINE = MachineSpec(
    motor_power=8.5,
    efficiency=0.95,
    power_constant=2.24,
    wear_factor=1.1,
    chip_area_exponent=0.28,
    slenderness_exponent=0.14,
)

CARBIDE_FACE_MILL = ToolSpec(
    id=1,
    kind=ToolKind.FACE_MILL,
    quality=ToolQuality.CARBIDE,
    diameter=50.0,
    teeth=6,
    price=49.5,
    lead_angle=45.0,
    clearance_angle=5.0,
    taylor_constant=100.05,
    life_exponent=0.3,
    change_time=0.5,
)

HSS_END_MILL_10 = ToolSpec(
    id=2,
    kind=ToolKind.END_MILL,
    quality=ToolQuality.HSS,
    diameter=10.0,
    teeth=4,
    price=7.55,
    lead_angle=0.0,
    clearance_angle=5.0,
    taylor_constant=33.98,
    life_exponent=0.15,
    change_time=0.5,
)

HSS_END_MILL_12 = ToolSpec(
    id=3,
    kind=ToolKind.END_MILL,
    quality=ToolQuality.HSS,
    diameter=12.0,
    teeth=4,
    price=7.55,
    lead_angle=0.0,
    clearance_angle=5.0,
    taylor_constant=33.98,
    life_exponent=0.15,
    change_time=0.5,
)


def single_face_plan() -> MillingPlan:
    """One unconstrained-finish face operation; every 3x3 grid point but the
    fastest corner is feasible.  Small enough to enumerate by hand."""
    op = OperationSpec(
        number=1,
        kind=OperationKind.FACE,
        tool_id=1,
        axial_depth=5.0,
        radial_depth=25.0,
        travel=200.0,
        speed_bounds=(60.0, 120.0),
        feed_bounds=(0.05, 0.4),
    )
    return MillingPlan(
        economics=STANDARD_ECONOMICS,
        machine=STANDARD_MACHINE,
        tools=(CARBIDE_FACE_MILL,),
        operations=(op,),
    )


def two_op_plan() -> MillingPlan:
    """A corner pass plus a slot pass: small enough for joint enumeration."""
    op1 = OperationSpec(
        number=1,
        kind=OperationKind.CORNER,
        tool_id=2,
        axial_depth=5.0,
        radial_depth=5.0,
        travel=60.0,
        speed_bounds=(40.0, 70.0),
        feed_bounds=(0.05, 0.5),
        surface_finish_req=6.0,
    )
    op2 = OperationSpec(
        number=2,
        kind=OperationKind.SLOT,
        tool_id=3,
        axial_depth=8.0,
        radial_depth=8.0,
        travel=40.0,
        speed_bounds=(30.0, 50.0),
        feed_bounds=(0.05, 0.5),
    )
    return MillingPlan(
        economics=STANDARD_ECONOMICS,
        machine=STANDARD_MACHINE,
        tools=(HSS_END_MILL_10, HSS_END_MILL_12),
        operations=(op1, op2),
    )


def infeasible_plan() -> MillingPlan:
    """Motor power so low that the power margin exceeds 1 on the whole box."""
    machine = MachineSpec(
        motor_power=0.05,
        efficiency=0.95,
        power_constant=2.24,
        wear_factor=1.1,
        chip_area_exponent=0.28,
        slenderness_exponent=0.14,
    )
    op = OperationSpec(
        number=1,
        kind=OperationKind.FACE,
        tool_id=1,
        axial_depth=5.0,
        radial_depth=25.0,
        travel=200.0,
        speed_bounds=(60.0, 120.0),
        feed_bounds=(0.05, 0.4),
    )
    return MillingPlan(
        economics=STANDARD_ECONOMICS,
        machine=machine,
        tools=(CARBIDE_FACE_MILL,),
        operations=(op,),
    )


@pytest.fixture(scope="session")
def builtin_plan():
    plan, _ = builtin_case()
    return plan


@pytest.fixture(scope="session")
def builtin_coeffs(builtin_plan):
    return derive_coefficients(builtin_plan)


@pytest.fixture(scope="session")
def toy_single_plan():
    return single_face_plan()


@pytest.fixture(scope="session")
def toy_two_op_plan():
    return two_op_plan()


@pytest.fixture(scope="session")
def toy_infeasible_plan():
    return infeasible_plan()
