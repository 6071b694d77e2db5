"""Linear-softmax policies and the clipped surrogate loss.

The policy maps a small scaled feature slice of the observation to one
logit per action; illegal actions are masked out of the softmax. The
loss is the standard clipped ratio surrogate minus an entropy bonus,
with an analytic gradient (checked against finite differences in the
test suite).
"""

from dataclasses import dataclass

import numpy as np

# Feature blocks pulled from the agent observation, with fixed scales
# so every feature lands near unit magnitude. Offsets come from the
# layout descriptor at construction time, never from hard numbers.
AGENT_FEATURE_BLOCKS = (
    ("inventory", (0.2, 0.2, 0.2, 0.01)),
    ("own_state", (1.0, 0.2, 0.1, 0.01)),
    ("market_avg_price", (0.1, 0.1, 0.1)),
    ("tax_rates", (1.0,) * 7),
    ("period_progress", (1.0,)),
    ("own_marginal_rate", (1.0,)),
)
PLANNER_FEATURE_BLOCKS = (
    ("map_summary", (0.1,) * 10),
    ("tax_rates", (1.0,) * 7),
    ("period_progress", (1.0,)),
)


class FeatureMap:
    """Selects and scales layout blocks, appending a bias feature."""

    def __init__(self, layout, blocks):
        named = {name: (offset, length) for name, offset, length in layout}
        self._slices = []
        scales = []
        for name, scale in blocks:
            if name not in named:
                raise KeyError(f"layout has no block named {name!r}")
            offset, length = named[name]
            if len(scale) != length:
                raise ValueError(f"scale length mismatch on block {name!r}")
            self._slices.append((offset, length))
            scales.extend(scale)
        self.size = len(scales) + 1
        self._scale = np.asarray(scales, dtype=np.float64)

    def __call__(self, observation):
        parts = [observation[o : o + l] for o, l in self._slices]
        features = np.concatenate(parts) * self._scale
        return np.append(features, 1.0)


def masked_distributions(logits, masks):
    """Row-wise (probs, log_probs) with illegal actions at 0 / -inf."""
    z = np.where(masks, logits, -np.inf)
    z = z - z.max(axis=1, keepdims=True)
    exp_z = np.exp(z)
    norm = exp_z.sum(axis=1, keepdims=True)
    return exp_z / norm, z - np.log(norm)


@dataclass
class Sample:
    features: np.ndarray
    mask: np.ndarray
    action: int
    log_prob_old: float
    advantage: float


class LinearSoftmaxPolicy:
    def __init__(self, n_actions: int, n_features: int, rng: np.random.Generator):
        self.n_actions = n_actions
        self.n_features = n_features
        self.weights = rng.normal(0.0, 0.01, size=(n_actions, n_features))

    def sample_batch(self, features, masks, rng):
        """Draw one action per row. Returns (actions, log_probs)."""
        probs, log_probs = masked_distributions(
            features @ self.weights.T, masks
        )
        cumulative = probs.cumsum(axis=1)
        draws = rng.random(len(probs))
        actions = (cumulative < draws[:, None]).sum(axis=1)
        actions = np.minimum(actions, self.n_actions - 1)
        rows = np.arange(len(probs))
        # cumsum rounding can land on a zero-probability id; redirect
        bad = probs[rows, actions] <= 0.0
        if bad.any():
            actions[bad] = probs[bad].argmax(axis=1)
        return actions, log_probs[rows, actions]

    def sample(self, features, mask, rng):
        actions, log_probs = self.sample_batch(
            features[None, :], mask[None, :], rng
        )
        return int(actions[0]), float(log_probs[0])


def surrogate_loss(weights, batch, clip_epsilon, entropy_weight):
    """Mean clipped-ratio loss with entropy bonus, and its gradient.

    The gradient follows the selected branch of the min: samples
    sitting on the clipped flat contribute no policy gradient, the
    entropy term flows everywhere.
    """
    features = np.stack([s.features for s in batch])
    masks = np.stack([s.mask for s in batch])
    actions = np.array([s.action for s in batch])
    log_prob_old = np.array([s.log_prob_old for s in batch])
    advantages = np.array([s.advantage for s in batch])
    n = len(batch)
    rows = np.arange(n)

    probs, log_probs = masked_distributions(features @ weights.T, masks)
    ratios = np.exp(log_probs[rows, actions] - log_prob_old)
    clipped = np.clip(ratios, 1.0 - clip_epsilon, 1.0 + clip_epsilon)
    unclipped_selected = ratios * advantages <= clipped * advantages
    surrogate = np.where(
        unclipped_selected, ratios * advantages, clipped * advantages
    )
    safe_log = np.where(masks, log_probs, 0.0)
    entropies = -(probs * safe_log).sum(axis=1)
    loss = -(surrogate.mean() + entropy_weight * entropies.mean())

    # d log pi(a) / d logits = onehot(a) - pi; illegal columns stay 0
    dlogp = -probs.copy()
    dlogp[rows, actions] += 1.0
    coefficient = np.where(unclipped_selected, advantages * ratios, 0.0)
    dlogits = -coefficient[:, None] * dlogp
    dentropy = -probs * (safe_log + entropies[:, None])
    dlogits -= entropy_weight * dentropy
    return loss, dlogits.T @ features / n


def returns_to_go(rewards, discount):
    out = np.zeros(len(rewards))
    running = 0.0
    for t in range(len(rewards) - 1, -1, -1):
        running = rewards[t] + discount * running
        out[t] = running
    return out


def normalized_advantages(returns):
    advantages = returns - returns.mean()
    spread = advantages.std()
    if spread > 1e-8:
        advantages = advantages / spread
    return advantages
