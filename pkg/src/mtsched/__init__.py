"""Simulation and exact schedulability analysis of periodic multi-thread tasks."""

from mtsched.model import (
    FlatSubprogram,
    HyperperiodOverflow,
    Subprogram,
    Task,
    TaskSystem,
    ThreadJob,
    hyperperiod,
    stabilization_points,
    task_utilization,
    thread_jobs,
)
from mtsched.schedulers import (
    Scheduler,
    dm_order,
    flatten_hierarchical,
    im_within_task,
    lsf_global,
    resolve_scheduler,
    rm_order,
)
from mtsched.engine import ScheduleTrace, SimulationResult, simulate_gang, simulate_threads
from mtsched.analysis import (
    AnalysisVerdict,
    fsp_test,
    ftp_fsp_test,
    gang_test,
    periodicity_probe,
    predictability_probe,
    wcrt,
)

__version__ = "0.1.0"
