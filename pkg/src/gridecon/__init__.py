"""gridecon: a deterministic gather-trade-build economy.

Six agents on a gridworld collect wood, stone, and iron, trade them in a
continuous double auction, and build houses for minted income. A planner
levies bracketed income taxes each 100-step period; collected revenue is
redistributed or invested in resource regeneration as directed by ranked
votes under one of three governing systems. Everything is integer
fixed-point under the hood, so conservation laws and reward identities
hold exactly and episodes replay bit-for-bit from a seed.
"""

from .agents import AgentState, spawn_agents
from .config import (
    DEFAULT_BRACKET_CUTOFFS,
    KEEP_RATE_SETTING,
    N_BRACKET_SETTINGS,
    N_BRACKETS,
    RATE_GRID,
    ConfigurationError,
    EconomyConfig,
    apply_env_overrides,
    config_as_dict,
    env_override_names,
    governing_from_names,
)
from .constants import (
    ASK,
    BID,
    HOUSE_COLOR_NAMES,
    HOUSE_RECIPES,
    N_HOUSE_COLORS,
    N_PERMUTATIONS,
    N_RESOURCES,
    PERMUTATIONS,
    RESOURCE_NAMES,
)
from .env import (
    AGENT_OBSERVATION_SIZE,
    LAYOUT_VERSION,
    N_AGENT_ACTIONS,
    N_PLANNER_ACTIONS,
    PLANNER_OBSERVATION_SIZE,
    ContractViolation,
    Observations,
    Simulation,
    StepRewards,
    agent_build_action,
    agent_house_buy_action,
    agent_observation_layout,
    agent_order_action,
    agent_vote_action,
    decode_agent_action,
    decode_planner_action,
    planner_observation_layout,
    planner_rate_action,
    planner_vote_action,
)
from .fiscal import (
    TaxSchedule,
    compute_tax,
    marginal_rate,
    redistribution_shares,
    zero_schedule,
)
from .governance import (
    GoverningConfig,
    GoverningSystem,
    Institution,
    PlannerReward,
    VoteRegistry,
    allocate_revenue,
    borda_aggregate,
    boosted_regen_profile,
    filter_voters,
    split_by_ranking,
)
from .market import OrderBook, TradeEvent
from .metrics import (
    MetricsRecord,
    activity_ratios,
    agent_utility,
    build_metrics_record,
    equality,
    gini,
    maximin,
    pearson_correlation,
    productivity,
    social_welfare,
)
from .policy import (
    AGENT_POLICY_NAMES,
    PLANNER_POLICY_NAMES,
    PolicyHandle,
    make_agent_policy,
    make_planner_policy,
    random_valid_policy,
)
from .trace import (
    TraceParseError,
    TraceWriter,
    build_summary,
    correlation_table,
    metrics_to_csv,
    read_trace,
    replay_metrics,
    write_metrics,
    write_summary,
)
from .world import WorldGrid, init_world

__version__ = "0.1.0"
