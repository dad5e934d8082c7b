"""Forward state-space search over ground tasks: the symbolic planner.

Default configuration is greedy best-first with the additive heuristic;
breadth-first search is step-optimal and backs the oracle tests. A trie over
excluded action sequences lets the same search enumerate alternative plan
skeletons deterministically for the sequence-before-satisfy loop.
"""
from __future__ import annotations

import heapq
import random
from collections import deque
from dataclasses import dataclass, field

from .pddl.ground import GroundAction, GroundTask

INFINITY = float("inf")


@dataclass(frozen=True)
class SearchConfig:
    strategy: str = "greedy-best-first"  # greedy-best-first | a-star | bfs
    heuristic: str = "h-add"             # h-add | goal-count | none
    node_budget: int = 100_000
    skeleton_budget: int = 5
    tie_break_seed: int = 0

    def __post_init__(self):
        if self.node_budget <= 0 or self.skeleton_budget <= 0:
            raise ValueError("budgets must be positive")
        if self.strategy not in ("greedy-best-first", "a-star", "bfs"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.heuristic not in ("h-add", "goal-count", "none"):
            raise ValueError(f"unknown heuristic {self.heuristic!r}")


@dataclass(frozen=True)
class PlanSkeleton:
    steps: tuple[GroundAction, ...]

    @property
    def cost(self) -> int:
        return len(self.steps)

    def signatures(self) -> list[str]:
        return [s.signature for s in self.steps]

    def key(self) -> tuple:
        return tuple(s.key for s in self.steps)

    def __str__(self) -> str:
        return "[" + ", ".join(self.signatures()) + "]"


@dataclass(frozen=True)
class Unsolvable:
    """Search space exhausted without reaching the goal."""

    nodes_expanded: int


@dataclass(frozen=True)
class BudgetExhausted:
    """Node budget hit before the search space was exhausted."""

    nodes_expanded: int
    node_budget: int


@dataclass(frozen=True)
class Exhausted:
    """No further distinct skeletons exist or the skeleton budget is spent."""

    reason: str


def applicable_actions(task: GroundTask, state: int) -> list[GroundAction]:
    """Actions whose positive preconditions hold and negative ones are absent,
    in (action name, argument tuple) order."""
    return [a for a in task.actions if a.applicable(state)]


def h_add(task: GroundTask, state: int) -> float:
    """Additive heuristic under delete relaxation.

    Positive goal atoms take their relaxed-reachability cost; negative goal
    literals cost 1 while still true (a relaxation never deletes, so this
    keeps h=0 exactly when the goal holds without poisoning solvable states).
    """
    costs: dict[int, float] = {}
    for goal_fact in task.goal_pos:
        costs[goal_fact] = INFINITY
    best = _relaxed_costs(task, state)
    total = 0.0
    for fact in task.goal_pos:
        c = best.get(fact, INFINITY)
        if c == INFINITY:
            return INFINITY
        total += c
    for fact in task.goal_neg:
        if state >> fact & 1:
            total += 1
    return total


def _relaxed_costs(task: GroundTask, state: int) -> dict[int, float]:
    best: dict[int, float] = {}
    for i in range(len(task.facts)):
        if state >> i & 1:
            best[i] = 0.0
    changed = True
    while changed:
        changed = False
        for action in task.actions:
            cost = 0.0
            feasible = True
            for p in action.pos_pre:
                c = best.get(p)
                if c is None:
                    feasible = False
                    break
                cost += c
            if not feasible:
                continue
            new = cost + 1.0
            for f in action.add:
                if new < best.get(f, INFINITY):
                    best[f] = new
                    changed = True
    return best


def goal_count(task: GroundTask, state: int) -> float:
    unmet = sum(1 for f in task.goal_pos if not state >> f & 1)
    unmet += sum(1 for f in task.goal_neg if state >> f & 1)
    return float(unmet)


def _heuristic_fn(config: SearchConfig):
    if config.heuristic == "h-add":
        return h_add
    if config.heuristic == "goal-count":
        return goal_count
    return lambda task, state: 0.0


class _ExclusionTrie:
    """Prefix trie over excluded action-key sequences.

    Search nodes carry the trie node matching their whole path (or None once
    diverged); a path is forbidden exactly when it ends on a terminal node.
    """

    def __init__(self, exclusions: list[tuple]):
        self.children: list[dict] = [{}]
        self.terminal: list[bool] = [False]
        for seq in exclusions:
            node = 0
            for key in seq:
                nxt = self.children[node].get(key)
                if nxt is None:
                    self.children.append({})
                    self.terminal.append(False)
                    nxt = len(self.children) - 1
                    self.children[node][key] = nxt
                node = nxt
            self.terminal[node] = True

    def step(self, node: int | None, key) -> int | None:
        if node is None:
            return None
        return self.children[node].get(key)

    def forbidden(self, node: int | None) -> bool:
        return node is not None and self.terminal[node]


def _search(task: GroundTask, config: SearchConfig,
            exclusions: list[tuple]) -> PlanSkeleton | Unsolvable | BudgetExhausted:
    trie = _ExclusionTrie(exclusions)
    h = _heuristic_fn(config)
    rng = random.Random(config.tie_break_seed) if config.tie_break_seed else None

    start = task.init_state
    # node payload: (state, trie_node, parent_id, action)
    nodes: list[tuple] = [(start, 0 if exclusions else None, -1, None)]
    if task.goal_holds(start) and not trie.forbidden(0 if exclusions else None):
        return PlanSkeleton(())

    counter = 0

    def tie_key():
        nonlocal counter
        counter += 1
        if rng is not None:
            return (rng.random(), counter)
        return (0.0, counter)

    use_fifo = config.strategy == "bfs"
    frontier_heap: list[tuple] = []
    frontier_fifo: deque[int] = deque()

    def push(node_id: int, g: int, state: int):
        if use_fifo:
            frontier_fifo.append(node_id)
            return True
        hv = h(task, state)
        if hv == INFINITY:
            return False
        priority = hv if config.strategy == "greedy-best-first" else g + hv
        heapq.heappush(frontier_heap, (priority, tie_key(), node_id, g))
        return True

    push(0, 0, start)
    closed: set[tuple] = set()
    g_of: dict[int, int] = {0: 0}
    expanded = 0

    while frontier_heap or frontier_fifo:
        if use_fifo:
            node_id = frontier_fifo.popleft()
            g = g_of[node_id]
        else:
            _, _, node_id, g = heapq.heappop(frontier_heap)
        state, trie_node, _, _ = nodes[node_id]
        seen_key = (state, trie_node)
        if seen_key in closed:
            continue
        closed.add(seen_key)

        if task.goal_holds(state) and not trie.forbidden(trie_node):
            return _extract(nodes, node_id)

        expanded += 1
        if expanded > config.node_budget:
            return BudgetExhausted(expanded, config.node_budget)

        for action in task.actions:
            if not action.applicable(state):
                continue
            nxt = action.apply(state)
            nxt_trie = trie.step(trie_node, action.key)
            if (nxt, nxt_trie) in closed:
                continue
            nodes.append((nxt, nxt_trie, node_id, action))
            child_id = len(nodes) - 1
            g_of[child_id] = g + 1
            push(child_id, g + 1, nxt)

    return Unsolvable(expanded)


def _extract(nodes: list[tuple], node_id: int) -> PlanSkeleton:
    steps: list[GroundAction] = []
    while node_id >= 0:
        _, _, parent, action = nodes[node_id]
        if action is not None:
            steps.append(action)
        node_id = parent
    return PlanSkeleton(tuple(reversed(steps)))


def plan(task: GroundTask, config: SearchConfig = SearchConfig()
         ) -> PlanSkeleton | Unsolvable | BudgetExhausted:
    """Find a plan skeleton. With strategy="bfs" the result is step-optimal."""
    return _search(task, config, [])


def next_skeleton(task: GroundTask, config: SearchConfig,
                  exclusions: list[PlanSkeleton]
                  ) -> PlanSkeleton | Exhausted:
    """Next distinct skeleton not equal (as an action sequence) to any
    exclusion; with no exclusions this is exactly plan().

    Alternatives are enumerated in step-count order (breadth-first under the
    exclusion trie), so structurally different minimal skeletons, e.g. arm
    role swaps, come before padded variants of an excluded sequence.
    """
    if len(exclusions) + 1 > config.skeleton_budget:
        return Exhausted("skeleton budget reached")
    if not exclusions:
        result = _search(task, config, [])
    else:
        enum_config = SearchConfig(strategy="bfs", heuristic="none",
                                   node_budget=config.node_budget,
                                   skeleton_budget=config.skeleton_budget,
                                   tie_break_seed=config.tie_break_seed)
        result = _search(task, enum_config, [s.key() for s in exclusions])
    if isinstance(result, Unsolvable):
        return Exhausted("no further skeletons exist")
    if isinstance(result, BudgetExhausted):
        return Exhausted("node budget exhausted while enumerating skeletons")
    return result
