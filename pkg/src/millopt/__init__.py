"""Profit-rate optimization of multi-tool CNC milling parameters.

Pick one cutting speed and one feed per operation so the part earns the
most profit per minute, subject to machine power, surface finish,
cutting force and recommended speed/feed windows.  A self-adaptive
evolution strategy does the searching; an independent grid-search oracle
certifies what it finds.
"""

from .case_study import (
    REFERENCE_ROWS,
    LoadedDocument,
    ReferenceRow,
    builtin_case,
    builtin_document_bytes,
    consistency_gap,
    dump_plan,
    load_document,
    load_document_file,
    load_plan,
)
from .es import (
    BestRecord,
    EsConfig,
    EsState,
    Individual,
    RunResult,
    clip_to_box,
    init_population,
    mutate,
    recombine,
    run,
    select,
    step,
)
from .milling import (
    ContractError,
    DecisionVector,
    DerivedCoefficients,
    DomainError,
    EconomicConstants,
    MachineSpec,
    MillingPlan,
    ModelError,
    OperationKind,
    OperationMargins,
    OperationSpec,
    PlanError,
    ToolKind,
    ToolQuality,
    ToolSpec,
    constraint_margins,
    cutting_force,
    decision_bounds,
    derive_coefficients,
    fitness,
    machining_time,
    profit_rate,
    unit_cost,
    unit_time,
)
from .oracle import GridSpec, OracleError, OracleResult, dinkelbach_solve, per_op_grid_min

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "REFERENCE_ROWS",
    "LoadedDocument",
    "ReferenceRow",
    "builtin_case",
    "builtin_document_bytes",
    "consistency_gap",
    "dump_plan",
    "load_document",
    "load_document_file",
    "load_plan",
    "BestRecord",
    "EsConfig",
    "EsState",
    "Individual",
    "RunResult",
    "clip_to_box",
    "init_population",
    "mutate",
    "recombine",
    "run",
    "select",
    "step",
    "ContractError",
    "DecisionVector",
    "DerivedCoefficients",
    "DomainError",
    "EconomicConstants",
    "MachineSpec",
    "MillingPlan",
    "ModelError",
    "OperationKind",
    "OperationMargins",
    "OperationSpec",
    "PlanError",
    "ToolKind",
    "ToolQuality",
    "ToolSpec",
    "constraint_margins",
    "cutting_force",
    "decision_bounds",
    "derive_coefficients",
    "fitness",
    "machining_time",
    "profit_rate",
    "unit_cost",
    "unit_time",
    "GridSpec",
    "OracleError",
    "OracleResult",
    "dinkelbach_solve",
    "per_op_grid_min",
]
