"""Policy training for mesh decision variables.

The actor maps a condition state to decision values, both in unit space.
Episodes are independent single steps: sample a condition, act with
exploration noise, generate the mesh, receive its quality as the reward.
The critic regresses stored rewards over a uniformly sampled replay
batch every episode; the actor follows the critic's action gradient
every second episode. Exploration noise is wide for an initial stretch
and then follows a raised-cosine schedule.

All stochastic steps consume one shared Generator in a fixed order
(condition draw, then noise, then the replay batch), so a seed pins the
whole run byte for byte.
"""

from __future__ import annotations

import inspect
import math
from dataclasses import dataclass, field
from typing import Callable, IO

import numpy as np
from numpy.typing import NDArray

from .elliptic import SmootherSettings
from .errors import DimensionMismatch
from .nets import (
    ACTOR_WIDTHS,
    CRITIC_WIDTHS,
    Adam,
    CheckpointData,
    Mlp,
    load_checkpoint,
    save_checkpoint,
)
from .passage import MeshingParams, PassageCondition
from .pipeline import reward as pipeline_reward
from .spaces import (
    SpaceSpec,
    condition_space,
    condition_values,
    decision_space,
    meshing_params_from_values,
    sample_condition,
)

__all__ = [
    "LOG_HEADER",
    "TrainSettings",
    "TrainHistory",
    "ReplayBuffer",
    "noise_sigma",
    "init_networks",
    "train",
    "MeshPolicyAgent",
    "OptimizeResult",
    "iterative_optimize",
]

LOG_HEADER = "episode,reward,sigma,critic_loss,j_pi"


@dataclass
class TrainSettings:
    batch_size: int = 100
    buffer_capacity: int = 100_000
    actor_every: int = 2
    sigma_period: int = 1000
    learning_rate: float = 1e-4

    def validate(self) -> None:
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.buffer_capacity < self.batch_size:
            raise ValueError("buffer_capacity must hold at least one batch")
        if self.actor_every < 1:
            raise ValueError("actor_every must be >= 1")
        if self.sigma_period < 1:
            raise ValueError("sigma_period must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")


@dataclass
class TrainHistory:
    rewards: NDArray[np.float64]
    sigmas: NDArray[np.float64]
    critic_losses: NDArray[np.float64]
    j_pis: NDArray[np.float64]

    @property
    def episodes(self) -> int:
        return self.rewards.size


class ReplayBuffer:
    """Fixed-capacity ring of (state, action, reward) episodes."""

    def __init__(self, capacity: int, state_dim: int, action_dim: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.states = np.zeros((capacity, state_dim))
        self.actions = np.zeros((capacity, action_dim))
        self.rewards = np.zeros(capacity)
        self.size = 0
        self.position = 0

    def __len__(self) -> int:
        return self.size

    def add(self, state, action, reward: float) -> None:
        self.states[self.position] = state
        self.actions[self.position] = action
        self.rewards[self.position] = reward
        self.position = (self.position + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, rng: np.random.Generator, n: int):
        """Uniform batch without replacement."""
        if n > self.size:
            raise ValueError(f"batch of {n} from buffer of {self.size}")
        idx = rng.choice(self.size, size=n, replace=False)
        return self.states[idx], self.actions[idx], self.rewards[idx]


def noise_sigma(episode: int, period: int = 1000) -> float:
    """Exploration scale: 1 through the first period, then raised cosine."""
    if episode <= period:
        return 1.0
    return 0.25 * (math.cos(2.0 * math.pi * episode / period) + 1.0)


def init_networks(rng: np.random.Generator, state_dim: int | None = None,
                  action_dim: int | None = None) -> tuple[Mlp, Mlp]:
    """Actor and critic with fresh parameters, actor drawn first."""
    sd = ACTOR_WIDTHS[0] if state_dim is None else state_dim
    ad = ACTOR_WIDTHS[-1] if action_dim is None else action_dim
    actor_widths = [sd] + ACTOR_WIDTHS[1:-1] + [ad]
    critic_widths = [sd + ad] + CRITIC_WIDTHS[1:]
    actor = Mlp(actor_widths, output="tanh", rng=rng, final_scale=0.1)
    critic = Mlp(critic_widths, output="identity", rng=rng)
    return actor, critic


def _fmt(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def train(
    actor: Mlp,
    critic: Mlp,
    actor_opt: Adam,
    critic_opt: Adam,
    buffer: ReplayBuffer,
    sample_state: Callable[[np.random.Generator], NDArray[np.float64]],
    reward_fn: Callable[[NDArray[np.float64], NDArray[np.float64]], float],
    episodes: int,
    rng: np.random.Generator,
    settings: TrainSettings | None = None,
    log: IO[str] | None = None,
    start_episode: int = 0,
) -> TrainHistory:
    """Run training episodes; returns per-episode history.

    ``sample_state`` and ``reward_fn`` work in unit space. Episode
    numbers continue from ``start_episode`` (0 for a fresh run), which
    keeps the noise schedule and actor cadence consistent across
    resumed runs. When ``log`` is given, one CSV row is written per
    episode (header first on a fresh run); fields that were not
    computed that episode stay empty.
    """
    settings = settings or TrainSettings()
    settings.validate()
    action_dim = actor.widths[-1]

    if log is not None and start_episode == 0:
        log.write(LOG_HEADER + "\n")

    rewards = np.zeros(episodes)
    sigmas = np.zeros(episodes)
    critic_losses = np.full(episodes, np.nan)
    j_pis = np.full(episodes, np.nan)

    for i in range(episodes):
        episode = start_episode + i + 1
        state = np.asarray(sample_state(rng), dtype=float)
        if state.shape != (actor.widths[0],):
            raise DimensionMismatch(
                f"state shape {state.shape}, actor expects "
                f"({actor.widths[0]},)"
            )
        sigma = noise_sigma(episode, settings.sigma_period)
        action = actor.forward(state)
        noise = rng.normal(0.0, sigma, action_dim) if sigma > 0.0 \
            else np.zeros(action_dim)
        action = np.clip(action + noise, -1.0, 1.0)
        r = float(reward_fn(state, action))
        buffer.add(state, action, r)

        critic_loss = None
        j_pi = None
        if len(buffer) >= settings.batch_size:
            sb, ab, rb = buffer.sample(rng, settings.batch_size)
            x = np.concatenate([sb, ab], axis=1)
            q = critic.forward(x)[:, 0]
            err = q - rb
            critic_loss = float(np.mean(err**2))
            critic.backward((2.0 * err / err.size)[:, None])
            critic_opt.step(critic.gradients())

            if episode % settings.actor_every == 0:
                a_pi = actor.forward(sb)
                q_pi = critic.forward(np.concatenate([sb, a_pi], axis=1))
                j_pi = float(np.mean(q_pi))
                # ascend the critic: feed the descent direction of -J
                g_in = critic.backward(
                    np.full_like(q_pi, -1.0 / q_pi.shape[0])
                )
                actor.backward(g_in[:, sb.shape[1]:])
                actor_opt.step(actor.gradients())

        rewards[i] = r
        sigmas[i] = sigma
        if critic_loss is not None:
            critic_losses[i] = critic_loss
        if j_pi is not None:
            j_pis[i] = j_pi
        if log is not None:
            log.write(
                f"{episode},{_fmt(r)},{_fmt(sigma)},"
                f"{_fmt(critic_loss)},{_fmt(j_pi)}\n"
            )

    return TrainHistory(rewards, sigmas, critic_losses, j_pis)


class MeshPolicyAgent:
    """Trainable policy mapping passage conditions to meshing decisions.

    Follows the common estimator protocol: constructor arguments are
    stored untouched and introspectable via get_params/set_params, fit()
    trains on self-generated episodes, and learned state lands in
    trailing-underscore attributes. predict() maps condition states to
    physical decision values.
    """

    def __init__(
        self,
        episodes: int = 20000,
        seed: int = 0,
        batch_size: int = 100,
        buffer_capacity: int = 100_000,
        actor_every: int = 2,
        sigma_period: int = 1000,
        learning_rate: float = 1e-4,
        condition_spec: SpaceSpec | None = None,
        decision_spec: SpaceSpec | None = None,
        smoother: SmootherSettings | None = None,
        profile_check_samples: int = 1024,
    ):
        self.episodes = episodes
        self.seed = seed
        self.batch_size = batch_size
        self.buffer_capacity = buffer_capacity
        self.actor_every = actor_every
        self.sigma_period = sigma_period
        self.learning_rate = learning_rate
        self.condition_spec = condition_spec
        self.decision_spec = decision_spec
        self.smoother = smoother
        self.profile_check_samples = profile_check_samples

    @classmethod
    def _param_names(cls) -> list[str]:
        sig = inspect.signature(cls.__init__)
        return [p for p in sig.parameters if p != "self"]

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params) -> "MeshPolicyAgent":
        valid = set(self._param_names())
        for key, value in params.items():
            if key not in valid:
                raise ValueError(
                    f"invalid parameter {key!r} for MeshPolicyAgent"
                )
            setattr(self, key, value)
        return self

    # -- internals ---------------------------------------------------

    def _settings(self) -> TrainSettings:
        return TrainSettings(
            batch_size=self.batch_size,
            buffer_capacity=self.buffer_capacity,
            actor_every=self.actor_every,
            sigma_period=self.sigma_period,
            learning_rate=self.learning_rate,
        )

    def _spaces(self) -> tuple[SpaceSpec, SpaceSpec]:
        cond = self.condition_spec or condition_space()
        dec = self.decision_spec or decision_space()
        return cond, dec

    def _ensure_initialized(self) -> None:
        if hasattr(self, "actor_"):
            return
        cond, dec = self._spaces()
        rng = np.random.default_rng(self.seed)
        actor, critic = init_networks(rng, cond.dim, dec.dim)
        self.condition_space_ = cond
        self.decision_space_ = dec
        self.rng_ = rng
        self.actor_ = actor
        self.critic_ = critic
        self.actor_opt_ = Adam(actor.parameters(), lr=self.learning_rate)
        self.critic_opt_ = Adam(critic.parameters(), lr=self.learning_rate)
        self.buffer_ = ReplayBuffer(self.buffer_capacity, cond.dim, dec.dim)
        self.n_episodes_ = 0

    def _sample_state(self, rng: np.random.Generator) -> NDArray[np.float64]:
        cond, unit = sample_condition(
            self.condition_space_, rng, n_profile=self.profile_check_samples
        )
        self._pending_condition = cond
        return unit

    def _reward(self, state, action) -> float:
        values = self.decision_space_.from_unit(action)
        params = meshing_params_from_values(
            values, self._pending_condition.bsp.chord
        )
        return pipeline_reward(self._pending_condition, params, self.smoother)

    # -- estimator API ------------------------------------------------

    def fit(self, X=None, y=None, log: IO[str] | None = None) -> "MeshPolicyAgent":
        """Train on self-generated conditions; X and y are unused."""
        self._ensure_initialized()
        history = train(
            self.actor_,
            self.critic_,
            self.actor_opt_,
            self.critic_opt_,
            self.buffer_,
            self._sample_state,
            self._reward,
            self.episodes,
            self.rng_,
            self._settings(),
            log=log,
            start_episode=self.n_episodes_,
        )
        if hasattr(self, "history_"):
            self.history_ = TrainHistory(
                np.concatenate([self.history_.rewards, history.rewards]),
                np.concatenate([self.history_.sigmas, history.sigmas]),
                np.concatenate(
                    [self.history_.critic_losses, history.critic_losses]
                ),
                np.concatenate([self.history_.j_pis, history.j_pis]),
            )
        else:
            self.history_ = history
        self.n_episodes_ += history.episodes
        return self

    def predict(self, X) -> NDArray[np.float64]:
        """Physical decision values for condition states.

        ``X`` is either an (n, dim) array of unit states or a sequence
        of PassageCondition objects. Returns an (n, k) array in decision
        registry order (integer variables appear as rounded floats).
        """
        self._ensure_initialized()
        if isinstance(X, PassageCondition):
            X = [X]
        if len(X) and isinstance(X[0], PassageCondition):
            X = np.stack([
                self.condition_space_.to_unit(condition_values(c)) for c in X
            ])
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        actions = self.actor_.forward(X)
        if actions.ndim == 1:
            actions = actions[None, :]
        out = np.empty_like(actions)
        for row, a in enumerate(actions):
            vals = self.decision_space_.from_unit(a)
            out[row] = [float(vals[n]) for n in self.decision_space_.names]
        return out

    def predict_params(self, cond: PassageCondition) -> MeshingParams:
        """Meshing decisions for one condition, as a parameter object."""
        self._ensure_initialized()
        state = self.condition_space_.to_unit(condition_values(cond))
        action = self.actor_.forward(state)
        values = self.decision_space_.from_unit(action)
        return meshing_params_from_values(values, cond.bsp.chord)

    # -- persistence ---------------------------------------------------

    def save(self, path: str, tool_version: str = "") -> None:
        self._ensure_initialized()
        data = CheckpointData(
            tool_version=tool_version,
            seed=self.seed,
            episodes=self.n_episodes_,
            cond_fields=self.condition_space_.fields(),
            dec_fields=self.decision_space_.fields(),
            actor_widths=self.actor_.widths,
            actor_weights=self.actor_.weights,
            actor_biases=self.actor_.biases,
            critic_widths=self.critic_.widths,
            critic_weights=self.critic_.weights,
            critic_biases=self.critic_.biases,
            actor_t=self.actor_opt_.t,
            actor_m=self.actor_opt_.m,
            actor_v=self.actor_opt_.v,
            critic_t=self.critic_opt_.t,
            critic_m=self.critic_opt_.m,
            critic_v=self.critic_opt_.v,
            buffer_capacity=self.buffer_.capacity,
            buffer_size=self.buffer_.size,
            buffer_position=self.buffer_.position,
        )
        save_checkpoint(path, data)

    @classmethod
    def load(cls, path: str) -> "MeshPolicyAgent":
        data = load_checkpoint(path)
        cond = SpaceSpec.from_fields(data.cond_fields)
        dec = SpaceSpec.from_fields(data.dec_fields)
        agent = cls(
            seed=data.seed,
            buffer_capacity=max(1, data.buffer_capacity),
            condition_spec=cond,
            decision_spec=dec,
        )
        agent._ensure_initialized()
        for dst, src in zip(agent.actor_.weights, data.actor_weights):
            dst[...] = src
        for dst, src in zip(agent.actor_.biases, data.actor_biases):
            dst[...] = src
        for dst, src in zip(agent.critic_.weights, data.critic_weights):
            dst[...] = src
        for dst, src in zip(agent.critic_.biases, data.critic_biases):
            dst[...] = src
        agent.actor_opt_.t = data.actor_t
        for dst, src in zip(agent.actor_opt_.m, data.actor_m):
            dst[...] = src
        for dst, src in zip(agent.actor_opt_.v, data.actor_v):
            dst[...] = src
        agent.critic_opt_.t = data.critic_t
        for dst, src in zip(agent.critic_opt_.m, data.critic_m):
            dst[...] = src
        for dst, src in zip(agent.critic_opt_.v, data.critic_v):
            dst[...] = src
        agent.buffer_.size = min(data.buffer_size, agent.buffer_.capacity)
        agent.buffer_.position = data.buffer_position % agent.buffer_.capacity
        agent.n_episodes_ = data.episodes
        agent.tool_version_ = data.tool_version
        return agent


@dataclass
class OptimizeResult:
    best_trace: NDArray[np.float64]
    best_reward: float
    best_action: NDArray[np.float64]
    best_params: MeshingParams | None
    history: TrainHistory = field(repr=False, default=None)


def iterative_optimize(
    cond: PassageCondition,
    iterations: int,
    seed: int = 0,
    decision_spec: SpaceSpec | None = None,
    condition_spec: SpaceSpec | None = None,
    settings: TrainSettings | None = None,
    smoother: SmootherSettings | None = None,
    reward_fn: Callable | None = None,
) -> OptimizeResult:
    """Optimize decisions for one fixed condition with the training loop.

    Runs the same actor-critic iteration as training but the condition
    never changes, so all episodes probe the same landscape. Networks
    start fresh from ``seed``. Returns the best reward seen per
    iteration (cumulative max), the best action, and its physical
    parameters.
    """
    cond_space = condition_spec or condition_space()
    dec_space = decision_spec or decision_space()
    state = cond_space.to_unit(condition_values(cond))
    settings = settings or TrainSettings()

    rng = np.random.default_rng(seed)
    actor, critic = init_networks(rng, cond_space.dim, dec_space.dim)
    actor_opt = Adam(actor.parameters(), lr=settings.learning_rate)
    critic_opt = Adam(critic.parameters(), lr=settings.learning_rate)
    buffer = ReplayBuffer(settings.buffer_capacity, cond_space.dim, dec_space.dim)

    best = {"r": -np.inf, "a": None}

    if reward_fn is None:
        def reward_fn(s, a):
            values = dec_space.from_unit(a)
            params = meshing_params_from_values(values, cond.bsp.chord)
            return pipeline_reward(cond, params, smoother)

    def tracked_reward(s, a):
        r = float(reward_fn(s, a))
        if r > best["r"]:
            best["r"] = r
            best["a"] = np.array(a)
        return r

    history = train(
        actor, critic, actor_opt, critic_opt, buffer,
        lambda rng_: state, tracked_reward, iterations, rng, settings,
    )
    trace = np.maximum.accumulate(history.rewards)
    params = None
    if best["a"] is not None:
        values = dec_space.from_unit(best["a"])
        params = meshing_params_from_values(values, cond.bsp.chord)
    return OptimizeResult(
        best_trace=trace,
        best_reward=float(best["r"]),
        best_action=best["a"],
        best_params=params,
        history=history,
    )
