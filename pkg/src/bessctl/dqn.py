"""From-scratch deep Q-learning: network, replay buffer, target network,
and the training loop.

The Q-network is a fully connected net with rectified-linear hidden
layers and an identity output head, stored as one flat float64 parameter
vector (layout: per layer, row-major weight matrix then bias). Gradients
are analytic backpropagation; the optimizer is plain SGD. Training is
fully deterministic for a fixed seed: one RNG drives weight init,
epsilon draws, random actions, and minibatch sampling, in a pinned
order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels as K
from ._kernels.pyref import param_count

CHECKPOINT_FORMAT = "bessctl-qnet-v1"


@dataclass(frozen=True)
class Hyperparams:
    lr: float = 0.001
    epsilon: float = 0.9          # probability of the greedy action
    gamma: float = 0.9
    target_sync: int = 2000       # steps between target-network copies
    update_every: int = 4         # steps between SGD updates
    batch_size: int = 64
    buffer_capacity: int = 10000
    episodes: int = 500
    hidden: tuple[int, ...] = (64, 64)
    epsilon_final: float | None = None  # optional linear anneal target, off by default
    eval_every: int = 0  # >0: greedy-evaluate every k episodes, return best snapshot

    def validate(self) -> "Hyperparams":
        assert self.lr > 0 and 0 < self.gamma <= 1 and 0 <= self.epsilon <= 1
        assert self.target_sync >= 1 and self.update_every >= 1
        assert self.batch_size >= 1 and self.buffer_capacity >= self.batch_size
        assert self.episodes >= 0 and self.eval_every >= 0
        if self.epsilon_final is not None:
            assert 0 <= self.epsilon_final <= 1
        return self

    def epsilon_at(self, episode: int) -> float:
        if self.epsilon_final is None or self.episodes <= 1:
            return self.epsilon
        frac = episode / (self.episodes - 1)
        return self.epsilon + (self.epsilon_final - self.epsilon) * frac


class QNetwork:
    """Feed-forward action-value net over a flat parameter vector."""

    def __init__(self, layer_sizes, params: np.ndarray | None = None):
        self.sizes = np.asarray(layer_sizes, dtype=np.int64)
        if len(self.sizes) < 2 or np.any(self.sizes < 1):
            raise ValueError(f"invalid layer sizes {layer_sizes}")
        n = param_count(self.sizes)
        if params is None:
            params = np.zeros(n)
        params = np.ascontiguousarray(params, dtype=np.float64)
        if params.shape != (n,):
            raise ValueError(f"expected {n} parameters for sizes {layer_sizes}, "
                             f"got {params.shape}")
        self.params = params

    @classmethod
    def initialized(cls, layer_sizes, rng: np.random.Generator) -> "QNetwork":
        """He-scaled normal hidden weights, zero biases, zero output layer.

        The zeroed output head makes every initial Q-value 0, so the
        starting greedy policy is the neutral lowest-index action instead
        of random-init noise; training then only departs from it where
        the data says so.
        """
        net = cls(layer_sizes)
        off = 0
        sizes = net.sizes
        n_hidden_layers = len(sizes) - 2
        for li, (n_in, n_out) in enumerate(zip(sizes[:-1], sizes[1:])):
            if li < n_hidden_layers:
                w = rng.normal(0.0, np.sqrt(2.0 / n_in), size=(int(n_out), int(n_in)))
                net.params[off:off + w.size] = w.ravel()
            off += int(n_in) * int(n_out) + int(n_out)  # biases stay zero
        return net

    @property
    def out_size(self) -> int:
        return int(self.sizes[-1])

    def q_values(self, obs: np.ndarray) -> np.ndarray:
        return K.nn_forward(self.sizes, self.params, np.asarray(obs, dtype=np.float64))

    def q_values_batch(self, obs: np.ndarray) -> np.ndarray:
        return K.nn_forward_batch(self.sizes, self.params,
                                  np.ascontiguousarray(obs, dtype=np.float64))

    def copy(self) -> "QNetwork":
        return QNetwork(self.sizes, self.params.copy())

    def save(self, path: str | Path) -> None:
        payload = {
            "format": CHECKPOINT_FORMAT,
            "layer_sizes": [int(s) for s in self.sizes],
            "params": [float(p) for p in self.params],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh)
            fh.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "QNetwork":
        with open(path) as fh:
            payload = json.load(fh)
        if payload.get("format") != CHECKPOINT_FORMAT:
            raise ValueError(f"{path}: not a {CHECKPOINT_FORMAT} checkpoint")
        return cls(payload["layer_sizes"], np.array(payload["params"], dtype=np.float64))


def q_values(net: QNetwork, obs: np.ndarray) -> np.ndarray:
    return net.q_values(obs)


def select_action(net: QNetwork, obs: np.ndarray, epsilon: float,
                  rng: np.random.Generator) -> int:
    """Greedy action with probability epsilon (ties break to the lowest
    index), uniform random otherwise."""
    if rng.random() < epsilon:
        return int(np.argmax(net.q_values(obs)))
    return int(rng.integers(net.out_size))


def sync_target(main: QNetwork, target: QNetwork) -> QNetwork:
    if not np.array_equal(main.sizes, target.sizes):
        raise ValueError("main and target network architectures differ")
    target.params[:] = main.params
    return target


class ReplayBuffer:
    """Fixed-capacity FIFO ring of transitions with uniform
    without-replacement minibatch sampling."""

    def __init__(self, capacity: int, obs_size: int):
        self.capacity = capacity
        self.obs = np.zeros((capacity, obs_size))
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity)
        self.next_obs = np.zeros((capacity, obs_size))
        self.done = np.zeros(capacity, dtype=bool)
        self.size = 0
        self._next = 0

    def __len__(self) -> int:
        return self.size

    def push(self, obs, action, reward, next_obs, done) -> None:
        i = self._next
        self.obs[i] = obs
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_obs[i] = next_obs
        self.done[i] = done
        self._next = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator):
        idx = rng.choice(self.size, size=batch_size, replace=False)
        return (self.obs[idx], self.actions[idx], self.rewards[idx],
                self.next_obs[idx], self.done[idx])


def compute_target(batch, target_net: QNetwork, gamma: float) -> np.ndarray:
    """Bootstrap targets: r for terminal transitions, else
    r + gamma * max_a Q(s', a) under the target network."""
    _, _, rewards, next_obs, done = batch
    q_next = target_net.q_values_batch(next_obs).max(axis=1)
    return rewards + gamma * q_next * ~done


def train_step(net: QNetwork, batch_obs, batch_actions, targets, lr: float) -> float:
    """One SGD step on the mean squared error between the taken-action
    outputs and the targets; returns the pre-update loss."""
    loss = K.nn_train_step(net.sizes, net.params,
                           np.ascontiguousarray(batch_obs, dtype=np.float64),
                           np.ascontiguousarray(batch_actions, dtype=np.int64),
                           np.ascontiguousarray(targets, dtype=np.float64), lr)
    if not np.isfinite(loss) or not np.all(np.isfinite(net.params)):
        raise TrainingDiverged(f"non-finite loss or parameters (loss={loss})")
    return loss


def gradients(net: QNetwork, batch_obs, batch_actions, targets):
    """(loss, flat analytic gradient) without updating the network."""
    return K.nn_gradients(net.sizes, net.params,
                          np.ascontiguousarray(batch_obs, dtype=np.float64),
                          np.ascontiguousarray(batch_actions, dtype=np.int64),
                          np.ascontiguousarray(targets, dtype=np.float64))


class TrainingDiverged(RuntimeError):
    pass


@dataclass
class EpisodeLog:
    episode: int
    total_cost: float
    total_reward: float
    epsilon: float
    loss_mean: float


def write_training_log(rows: list[EpisodeLog], path: str | Path) -> None:
    lines = ["episode,total_cost,total_reward,epsilon,loss_mean"]
    lines += [f"{r.episode},{repr(r.total_cost)},{repr(r.total_reward)},"
              f"{repr(r.epsilon)},{repr(r.loss_mean)}" for r in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def greedy_rollout_cost(env, net: QNetwork) -> float:
    """Deterministic episode cost under the net's greedy policy."""
    obs = env.reset()
    done = False
    while not done:
        obs, _, done, _ = env.step(greedy_action(net, obs))
    return env.episode_cost


def train(env_factory, hyper: Hyperparams, seed: int) -> tuple[QNetwork, list[EpisodeLog]]:
    """Experience-replay Q-learning over whole episodes.

    Per slot: epsilon-greedy act, store the transition, every
    ``update_every`` steps fit a sampled minibatch to bootstrap targets,
    every ``target_sync`` steps copy the main net into the target net.
    With ``eval_every`` set, the greedy policy is evaluated periodically
    on a fresh episode and the best-scoring parameter snapshot is
    returned (deterministic checkpoint selection); otherwise the final
    parameters are returned.
    """
    hyper.validate()
    env = env_factory()
    rng = np.random.default_rng(seed)
    sizes = (env.OBS_SIZE, *hyper.hidden, env.action_count)
    net = QNetwork.initialized(sizes, rng)
    target = net.copy()
    buffer = ReplayBuffer(hyper.buffer_capacity, env.OBS_SIZE)
    best_cost = np.inf
    best_params: np.ndarray | None = None

    log: list[EpisodeLog] = []
    step_count = 0
    for episode in range(hyper.episodes):
        eps = hyper.epsilon_at(episode)
        obs = env.reset()
        done = False
        losses = []
        total_reward = 0.0
        while not done:
            action = select_action(net, obs, eps, rng)
            next_obs, reward, done, _ = env.step(action)
            buffer.push(obs, action, reward, next_obs, done)
            total_reward += reward
            step_count += 1
            if step_count % hyper.update_every == 0 and len(buffer) >= hyper.batch_size:
                batch = buffer.sample(hyper.batch_size, rng)
                targets = compute_target(batch, target, hyper.gamma)
                try:
                    losses.append(train_step(net, batch[0], batch[1], targets, hyper.lr))
                except TrainingDiverged as exc:
                    raise TrainingDiverged(f"episode {episode}: {exc}") from exc
            if step_count % hyper.target_sync == 0:
                sync_target(net, target)
            obs = next_obs
        log.append(EpisodeLog(episode=episode, total_cost=env.episode_cost,
                              total_reward=total_reward, epsilon=eps,
                              loss_mean=float(np.mean(losses)) if losses else 0.0))
        if hyper.eval_every and (episode + 1) % hyper.eval_every == 0:
            cost = greedy_rollout_cost(env_factory(), net)
            if cost < best_cost:
                best_cost = cost
                best_params = net.params.copy()
    if best_params is not None:
        if greedy_rollout_cost(env_factory(), net) > best_cost:
            net.params[:] = best_params
    return net, log


def greedy_action(net: QNetwork, obs: np.ndarray) -> int:
    return int(np.argmax(net.q_values(obs)))
