"""Wind-aware inspection routing.

Pipeline: flag turbines stranded outside each UAV's wind-adjusted flying
range, hand them to the nearest UAV that can still reach them, build the
asymmetric flight-time matrix per UAV, solve the traveling-salesman cycle
exactly (subset dynamic programming) or heuristically above a size cap, and
finally split the cycle into start-anchored loops that each fit the
flight-time budget.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import (
    DegenerateLegError,
    InfeasibleTourError,
    InfeasibleTurbineError,
    InvalidInputError,
    LegInfeasibleError,
    PlanningAbortedError,
    UnreachableTurbineError,
)
from .kinematics import UavSpec, flight_time, in_effective_range
from .wind import TurbineSpec, WindVector

EXACT_SOLVER_CAP = 16  # nodes, start included


@dataclass
class TimeMatrix:
    """Asymmetric flight-time matrix over [start] + turbines, seconds."""

    node_ids: list[str]  # index 0 is the start point
    times: list[list[float]]  # math.inf marks an infeasible edge

    @property
    def size(self) -> int:
        return len(self.node_ids)

    def time(self, k: int, l: int) -> float:
        return self.times[k][l]


@dataclass(frozen=True)
class Route:
    """One start-anchored loop: start -> stops... -> start."""

    stops: tuple[str, ...]
    leg_times: tuple[float, ...]
    total_time: float

    def path_string(self, start_label: str) -> str:
        return ">".join([start_label, *self.stops, start_label])


@dataclass
class UavRoutes:
    uav_id: str
    start_label: str
    routes: list[Route]

    @property
    def num_routes(self) -> int:
        return len(self.routes)

    @property
    def total_time(self) -> float:
        return sum(r.total_time for r in self.routes)


@dataclass
class RoutePlan:
    """Full fleet plan plus the reassignment diff that produced it."""

    uav_plans: list[UavRoutes]
    reassigned: list[tuple[str, str, str]] = field(default_factory=list)  # (turbine, from, to)

    @property
    def total_time(self) -> float:
        return sum(p.total_time for p in self.uav_plans)

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "total_time_s": self.total_time,
            "uavs": [
                {
                    "uav_id": p.uav_id,
                    "start_label": p.start_label,
                    "num_routes": p.num_routes,
                    "total_time_s": p.total_time,
                    "routes": [
                        {
                            "stops": list(r.stops),
                            "path": r.path_string(p.start_label),
                            "leg_times_s": list(r.leg_times),
                            "time_s": r.total_time,
                        }
                        for r in p.routes
                    ],
                }
                for p in self.uav_plans
            ],
            "reassigned": [
                {"turbine": t, "from": src, "to": dst} for t, src, dst in self.reassigned
            ],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)


def build_time_matrix(
    uav: UavSpec, turbines: list[TurbineSpec], wind: WindVector
) -> TimeMatrix:
    """Flight-time matrix over the UAV start point and its turbines."""
    if wind.speed > uav.max_wind:
        raise PlanningAbortedError(
            f"wind speed {wind.speed:.2f} m/s exceeds {uav.id} resistance {uav.max_wind:.2f} m/s"
        )
    points = [uav.pos] + [t.pos for t in turbines]
    ids = [uav.label] + [t.id for t in turbines]
    n = len(points)
    times = [[0.0] * n for _ in range(n)]
    for k in range(n):
        for l in range(n):
            if k == l:
                continue
            try:
                times[k][l] = flight_time(points[k], points[l], wind, uav.u_max)
            except LegInfeasibleError:
                times[k][l] = math.inf
            except DegenerateLegError:
                times[k][l] = 0.0  # co-located nodes: nothing to fly
    return TimeMatrix(ids, times)


def out_of_range_set(
    uav: UavSpec, turbines: list[TurbineSpec], wind: WindVector
) -> set[str]:
    """Turbine ids assigned to ``uav`` that fall outside its effective range."""
    return {t.id for t in turbines if not in_effective_range(t.pos, uav, wind)}


def reassign(
    assignment: dict[str, list[str]],
    uavs: list[UavSpec],
    turbines: list[TurbineSpec],
    wind: WindVector,
) -> tuple[dict[str, list[str]], list[tuple[str, str, str]]]:
    """Move stranded turbines to the nearest UAV whose effective range holds them.

    UAVs shed their stranded sets in decreasing-stranded-count order (ties by
    fleet order); destination ties break toward the earlier UAV in the fleet
    list.  Returns the updated assignment and the list of moves.
    """
    by_id = {t.id: t for t in turbines}
    new_assignment = {u.id: list(assignment.get(u.id, [])) for u in uavs}
    stranded: dict[str, list[str]] = {}
    for u in uavs:
        mine = [by_id[tid] for tid in new_assignment[u.id]]
        stranded[u.id] = sorted(out_of_range_set(u, mine, wind))

    order = sorted(range(len(uavs)), key=lambda i: (-len(stranded[uavs[i].id]), i))
    moves: list[tuple[str, str, str]] = []
    unreachable: list[str] = []
    for i in order:
        src = uavs[i]
        for tid in stranded[src.id]:
            spot = by_id[tid].pos
            best_j, best_d = None, math.inf
            for j, cand in enumerate(uavs):
                if not in_effective_range(spot, cand, wind):
                    continue
                d = math.dist(cand.pos, spot)
                if d < best_d:
                    best_j, best_d = j, d
            if best_j is None:
                unreachable.append(tid)
                continue
            dst = uavs[best_j]
            new_assignment[src.id].remove(tid)
            new_assignment[dst.id].append(tid)
            moves.append((tid, src.id, dst.id))
    if unreachable:
        raise UnreachableTurbineError(unreachable)
    return new_assignment, moves


def tour_cost(matrix: TimeMatrix, order: list[int]) -> float:
    """Total time of the closed cycle visiting ``order`` (start first)."""
    total = 0.0
    for a, b in zip(order, order[1:] + order[:1]):
        total += matrix.times[a][b]
    return total


def solve_atsp_exact(matrix: TimeMatrix, cap: int = EXACT_SOLVER_CAP) -> list[int]:
    """Minimum-time Hamiltonian cycle through node 0 and all others.

    Subset dynamic programming, O(n^2 * 2^n); deterministic tie-breaking keeps
    the lowest predecessor index.
    """
    n = matrix.size
    if n > cap:
        raise InvalidInputError(f"{n} nodes exceeds exact-solver cap {cap}")
    if n == 1:
        return [0]
    t = matrix.times
    if n == 2:
        if math.isinf(t[0][1]) or math.isinf(t[1][0]):
            raise InfeasibleTourError("edge to the only turbine is infeasible")
        return [0, 1]

    m = n - 1  # turbines are bits 0..m-1 standing for nodes 1..n
    full = (1 << m) - 1
    inf = math.inf
    dp = [[inf] * m for _ in range(1 << m)]
    parent = [[-1] * m for _ in range(1 << m)]
    for j in range(m):
        dp[1 << j][j] = t[0][j + 1]
    for mask in range(1, full + 1):
        row = dp[mask]
        for j in range(m):
            bit = 1 << j
            if not mask & bit:
                continue
            prev_mask = mask ^ bit
            if prev_mask == 0:
                continue
            prev_row = dp[prev_mask]
            best, best_k = inf, -1
            for k in range(m):
                if not prev_mask & (1 << k):
                    continue
                c = prev_row[k]
                if math.isinf(c):
                    continue
                c += t[k + 1][j + 1]
                if c < best:
                    best, best_k = c, k
            row[j] = best
            parent[mask][j] = best_k

    best, best_j = inf, -1
    for j in range(m):
        c = dp[full][j]
        if math.isinf(c):
            continue
        c += t[j + 1][0]
        if c < best:
            best, best_j = c, j
    if best_j < 0:
        raise InfeasibleTourError("no feasible cycle covers all turbines")

    order = []
    mask, j = full, best_j
    while j >= 0:
        order.append(j + 1)
        mask, j = mask ^ (1 << j), parent[mask][j]
    order.reverse()
    return [0] + order


def solve_atsp_heuristic(matrix: TimeMatrix) -> list[int]:
    """Nearest-neighbor construction plus pairwise-exchange improvement.

    Deterministic given the matrix; never better than the exact optimum.
    """
    n = matrix.size
    if n == 1:
        return [0]
    t = matrix.times
    unvisited = set(range(1, n))
    order = [0]
    while unvisited:
        here = order[-1]
        nxt, best = -1, math.inf
        for j in sorted(unvisited):
            if t[here][j] < best:
                nxt, best = j, t[here][j]
        if nxt < 0:
            raise InfeasibleTourError("nearest-neighbor construction ran out of feasible edges")
        order.append(nxt)
        unvisited.remove(nxt)
    cost = tour_cost(matrix, order)
    if math.isinf(cost):
        raise InfeasibleTourError("constructed tour uses an infeasible edge")

    improved = True
    while improved:
        improved = False
        for i in range(1, n):
            for j in range(i + 1, n):
                cand = order.copy()
                cand[i], cand[j] = cand[j], cand[i]
                c = tour_cost(matrix, cand)
                if c < cost - 1e-12:
                    order, cost = cand, c
                    improved = True
    return order


def split_route(
    order: list[int], matrix: TimeMatrix, t_max: float, service_time_s: float = 0.0
) -> list[Route]:
    """Cut one cycle into start-anchored loops each within ``t_max``.

    Greedy traversal in tour order: a stop joins the current loop only if the
    loop could still return to the start within budget.  ``service_time_s`` is
    an optional dwell per inspected turbine; it counts against the budget and
    into the route duration (whether hover time draws on the flight budget is
    an operator call, hence the knob).
    """
    t = matrix.times
    ids = matrix.node_ids
    for j in order[1:]:
        rt = t[0][j] + service_time_s + t[j][0]
        if rt > t_max:
            raise InfeasibleTurbineError(
                f"out-and-back to {ids[j]} takes {rt:.1f} s > budget {t_max:.1f} s"
            )

    routes: list[Route] = []
    stops: list[int] = []
    legs: list[float] = []
    acc = 0.0
    here = 0
    for j in order[1:]:
        leg = t[here][j]
        if stops and acc + leg + service_time_s + t[j][0] > t_max:
            back = t[here][0]
            routes.append(
                Route(tuple(ids[s] for s in stops), tuple(legs + [back]), acc + back)
            )
            stops, legs, acc, here = [], [], 0.0, 0
            leg = t[0][j]
        stops.append(j)
        legs.append(leg)
        acc += leg + service_time_s
        here = j
    if stops:
        back = t[here][0]
        routes.append(Route(tuple(ids[s] for s in stops), tuple(legs + [back]), acc + back))
    n_stops = len(order) - 1
    if n_stops >= 2 and len(routes) > n_stops - 1:
        raise InfeasibleTourError(
            f"budget {t_max:.0f} s forces {len(routes)} routes over {n_stops} turbines; "
            f"at most {n_stops - 1} are allowed"
        )
    return routes


def cluster_assign(
    uavs: list[UavSpec], turbines: list[TurbineSpec]
) -> dict[str, list[str]]:
    """Assign each turbine to the nearest UAV position (ties: earlier UAV)."""
    if not uavs:
        raise InvalidInputError("at least one UAV is required")
    assignment: dict[str, list[str]] = {u.id: [] for u in uavs}
    for t in turbines:
        best_i, best_d = 0, math.inf
        for i, u in enumerate(uavs):
            d = math.dist(u.pos, t.pos)
            if d < best_d:
                best_i, best_d = i, d
        assignment[uavs[best_i].id].append(t.id)
    return assignment


def _check_assignment(
    assignment: dict[str, list[str]], uavs: list[UavSpec], turbines: list[TurbineSpec]
) -> None:
    uav_ids = {u.id for u in uavs}
    seen: set[str] = set()
    for uid, tids in assignment.items():
        if uid not in uav_ids:
            raise InvalidInputError(f"assignment references unknown UAV {uid!r}")
        for tid in tids:
            if tid in seen:
                raise InvalidInputError(f"turbine {tid!r} assigned twice")
            seen.add(tid)
    missing = {t.id for t in turbines} - seen
    extra = seen - {t.id for t in turbines}
    if missing or extra:
        raise InvalidInputError(
            f"assignment must cover all turbines exactly (missing {sorted(missing)}, unknown {sorted(extra)})"
        )


def plan_inspection(
    uavs: list[UavSpec],
    turbines: list[TurbineSpec],
    assignment: dict[str, list[str]],
    wind: WindVector,
    use_effective_range: bool = True,
    exact_cap: int = EXACT_SOLVER_CAP,
    service_time_s: float = 0.0,
) -> RoutePlan:
    """Full planning pass for one frozen wind condition.

    ``use_effective_range=False`` skips the stranded-turbine logic and plans on
    the raw assignment (the comparison baseline).
    """
    _check_assignment(assignment, uavs, turbines)
    by_id = {t.id: t for t in turbines}

    moves: list[tuple[str, str, str]] = []
    if use_effective_range:
        assignment, moves = reassign(assignment, uavs, turbines, wind)

    plans: list[UavRoutes] = []
    for uav in uavs:
        tids = sorted(assignment.get(uav.id, []))
        mine = [by_id[tid] for tid in tids]
        matrix = build_time_matrix(uav, mine, wind)
        if matrix.size <= exact_cap:
            order = solve_atsp_exact(matrix, cap=exact_cap)
        else:
            order = solve_atsp_heuristic(matrix)
        routes = split_route(order, matrix, uav.t_max, service_time_s=service_time_s)
        plans.append(UavRoutes(uav.id, uav.label, routes))
    return RoutePlan(plans, moves)
