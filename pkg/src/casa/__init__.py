"""Confidence-aware shared autonomy on a planar point robot."""

from .arbitration import (
    ArbitrationConfig,
    ArbitrationResult,
    arbitrate,
    belief_alpha,
    blend,
    casa_alpha,
    pba_alpha,
)
from .core import (
    Action,
    HumanInput,
    State,
    Trajectory,
    WorldConfig,
    teleop_map,
    trajectory_prefix,
)
from .inference import (
    ConfidenceEstimate,
    IntentPosterior,
    Suboptimality,
    beta_map,
    beta_mle,
    intent_posterior,
    log_likelihood,
    suboptimality,
)
from .intents import (
    FeatureCost,
    GoalCost,
    Intent,
    IntentSet,
    RbfBasis,
    cost,
    cost_gradient,
    feature_vector,
)
from .irl import DemoSet, IrlConfig, irl_gradient, learn_intent, sample_near_optimal
from .metrics import (
    MetricsReport,
    effort,
    efficiency_cost,
    error_metric,
    run_experiment,
)
from .planner import Plan, plan, remaining_plan
from .scenarios import Scenario, builtin, load_scenario
from .simulator import (
    Episode,
    ScriptedOperator,
    detect_misspecification,
    lifelong_update,
    run_scripted,
)

__version__ = "0.1.0"
