"""Replay the full interaction demo and narrate the event log."""

from greeterbot.assets import scenario_path
from greeterbot.orchestrator import Scenario, ScenarioRunner

scenario = Scenario.from_yaml(scenario_path("demo.yaml"))
print(f"replaying '{scenario.name}' on map '{scenario.map}' (seed {scenario.seed})\n")

runner = ScenarioRunner(scenario)
report = runner.run()
runner.close()

interesting = {"HandTouched", "TtsSaid", "Refused", "HugPerformed",
               "NavGoal", "Halted", "PictureTaken", "IdentityResolved"}
for record in report.log:
    if record["kind"] not in interesting:
        continue
    extra = {k: v for k, v in record.items() if k not in ("at", "kind")}
    detail = " ".join(f"{k}={v!r}" for k, v in extra.items())
    print(f"t={record['at']:7.2f}  {record['kind']:<17} {detail}")

status = "all expectations passed" if report.passed else "SOME EXPECTATIONS FAILED"
print(f"\n{status} ({sum(r.ok for r in report.results)}/{len(report.results)})")
