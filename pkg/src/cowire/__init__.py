"""Server-authoritative collaborative 3D wireframe editing engine.

Two users manipulate overlapping vertex groups of a shared wireframe;
conflicts on jointly selected vertices are prevented (object/action-level
restriction) or resolved computationally (additive, averaging,
intersection, second-user priority). Includes a deterministic simulation
harness, a brute-force oracle, session metrics, and a live WebSocket
server.
"""

from .geometry import (
    IDENTITY,
    Quat,
    TransformDelta,
    Vec3,
    apply_delta,
    centroid,
    euler_compose,
    euler_decompose,
    minimal_arc_rotation,
    rotation_delta,
    scale_delta,
    snap_back,
    translation_delta,
)
from .harness import RunResult, Scenario, fuzz, load_scenario, random_scenario, replay, run
from .metrics import MetricsReport, compute_metrics, detect_episodes
from .model import WireframeModel
from .oracle import oracle_resolve
from .resolution import (
    OperationKind,
    OverlapPartition,
    Strategy,
    partition,
    resolve_additive,
    resolve_average,
    resolve_intersection,
    resolve_second_user,
    resolve_tick,
)
from .scenariogen import TargetSpec, gen_cube, gen_target
from .session import ColorState, Session, SessionEvent, match_check

__version__ = "0.1.0"
