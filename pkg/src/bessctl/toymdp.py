"""A hand-solvable two-state MDP used to verify the learner end to end.

States are one-hot 2-vectors; two actions. Transitions are
deterministic: action 0 stays, action 1 switches. Rewards:

    state 0: stay -> 0.1, switch -> 0.0
    state 1: stay -> 1.0, switch -> 0.1

With discount 0.9 the optimal stationary policy is switch in state 0 and
stay in state 1 (Q*(s0) = (8.2, 9.0), Q*(s1) = (10.0, 8.2)); value
iteration in the test suite confirms the same ranking independently.
Episodes run a fixed horizon, long enough that the discounted horizon
dominates terminal effects.
"""

from __future__ import annotations

import numpy as np

REWARDS = ((0.1, 0.0), (1.0, 0.1))  # [state][action]
TRANSITIONS = ((0, 1), (1, 0))


def value_iteration(gamma: float = 0.9, sweeps: int = 500) -> tuple[np.ndarray, list[int]]:
    """Infinite-horizon optimal Q table and greedy policy by fixed-point
    iteration."""
    q = np.zeros((2, 2))
    for _ in range(sweeps):
        v = q.max(axis=1)
        q = np.array([[REWARDS[s][a] + gamma * v[TRANSITIONS[s][a]]
                       for a in range(2)] for s in range(2)])
    return q, [int(np.argmax(q[s])) for s in range(2)]


class ToyTwoStateMdp:
    """Env-protocol wrapper: reset() -> obs, step(a) -> (obs, r, done, None)."""

    OBS_SIZE = 2

    def __init__(self, horizon: int = 40, start_state: int = 0):
        self.horizon = horizon
        self.start_state = start_state
        self.state = start_state
        self.t = 0
        self._reward_sum = 0.0

    @property
    def action_count(self) -> int:
        return 2

    @property
    def episode_cost(self) -> float:
        return -self._reward_sum

    def _obs(self) -> np.ndarray:
        obs = np.zeros(2)
        obs[self.state] = 1.0
        return obs

    def reset(self) -> np.ndarray:
        self.state = self.start_state
        self.t = 0
        self._reward_sum = 0.0
        return self._obs()

    def step(self, action: int):
        if self.t >= self.horizon:
            raise RuntimeError("episode already finished; call reset()")
        reward = REWARDS[self.state][action]
        self.state = TRANSITIONS[self.state][action]
        self.t += 1
        self._reward_sum += reward
        return self._obs(), reward, self.t == self.horizon, None
