from .bit_star import bit_star_plan, rgg_radius
from .common import PlannerConfig, PlannerResult
from .lsc import lsc_shorten
from .rrt import audit_costs, rrt_plan, rrt_star_plan
from .tree import Tree

PLANNERS = {
    "rrt": rrt_plan,
    "rrt_star": rrt_star_plan,
    "bit_star": bit_star_plan,
}

__all__ = [
    "PLANNERS", "PlannerConfig", "PlannerResult", "Tree", "audit_costs", "bit_star_plan",
    "lsc_shorten", "rgg_radius", "rrt_plan", "rrt_star_plan",
]
