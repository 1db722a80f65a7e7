"""Planar simulation and statics toolkit for a CoM-shifting aerial pusher."""

from .params import (BoundsError, ParameterError, PlanarState, PlatformParams,
                     com_from_plate, plate_from_com, validate_params)
from .statics import (Infeasible, NoFeasiblePlatePosition,
                      equilibrium_frictionless, predict_ideal_plate_position,
                      sweep_rl, sweep_tool_load, tool_load_equilibrium)
from .dynamics import ContactConfig, NumericalDivergence, SimTrace, run, step
from .control import CascadeController, allocate, forward_wrench
from .arm import (ArmParams, Unreachable, forward_kinematics,
                  inverse_kinematics, jacobian, run_task2_scenario,
                  static_joint_torques)
from .scenarios import RunSummary, run_task1, summarize_task1

__version__ = "0.1.0"
