"""Fixed-budget Pareto set identification for multi-objective bandits."""

from .ape import (
    ApeConfig,
    adaptive_h,
    ape_fb_adapt_run,
    ape_fb_run,
    beta,
    opt_set,
    select_bt_ct,
    tune_a,
    z_diagnostics,
)
from .ege import (
    EmpiricalState,
    TrialRecord,
    ege_run,
    ege_sr_k_run,
    empirical_gaps,
    empirical_pareto_set,
    psi_k_loss,
    select_survivors,
    successive_rejects_run,
)
from .envs import (
    BanditInstance,
    GaussianSampler,
    gen_experiment,
    load_instance,
    resolve_instance,
    save_instance,
)
from .exceptions import (
    DegenerateInstanceError,
    InstanceFormatError,
    InsufficientBudgetError,
    InvalidScheduleError,
    InvalidStateError,
)
from .harness import (
    ExperimentSpec,
    ResultRow,
    default_budgets,
    emit_csv,
    judge_trial,
    parse_algorithm,
    read_csv,
    run_grid,
)
from .hypervolume import default_reference, hv_fraction, hypervolume
from .lowerbound import (
    ClassBReport,
    alternative_instance,
    class_b_check,
    lb_value,
    staircase_instance,
    verify_gap_preservation,
)
from .pareto import (
    GapProfile,
    RelaxedGapProfile,
    big_m,
    complexity_profile,
    gap_optimal,
    gap_suboptimal,
    gap_unified,
    little_m,
    pareto_set,
    relaxed_profile,
)
from .schedules import (
    Schedule,
    schedule_gg,
    schedule_sh,
    schedule_sr,
    schedule_uniform,
    validate_schedule,
)

__version__ = "0.1.0"
