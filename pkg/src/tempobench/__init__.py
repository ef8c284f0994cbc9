"""Duration-distribution workbench for human-agent teamwork timing.

Fits heavy-tailed duration families to task-timing data, selects models by
AD/AIC/BIC, simulates a collaborative packaging task, schedules robot
dispatch times against fitted models, and ships the telemetry service the
browser game reports to.
"""

__version__ = "0.1.0"

SCHEMA_VERSIONS = {
    "series-csv": 1,
    "telemetry": 1,
    "sim-config": 1,
}
