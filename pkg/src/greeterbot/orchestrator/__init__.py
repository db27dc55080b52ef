"""Session state machine, navigation loop, personas, and the scenario runner."""

from greeterbot.orchestrator.navloop import ABORTED, ARRIVED, NavConfig, NavResult, navigation_loop
from greeterbot.orchestrator.scenario import (
    LocalAsr,
    Scenario,
    ScenarioReport,
    ScenarioRunner,
    Step,
    StepResult,
    WireAsr,
    run_scenario_file,
)
from greeterbot.orchestrator.session import SessionState, handle_event

__all__ = [
    "ABORTED",
    "ARRIVED",
    "LocalAsr",
    "NavConfig",
    "NavResult",
    "Scenario",
    "ScenarioReport",
    "ScenarioRunner",
    "SessionState",
    "Step",
    "StepResult",
    "WireAsr",
    "handle_event",
    "navigation_loop",
    "run_scenario_file",
]
