"""SAC-family agents: single SAC through variance-critic ensembles with
inverse-variance weighted critic and actor updates.

Policies are squashed diagonal Gaussians trained by the reparameterization
trick; each policy member is paired with a twin pair of critics (minimum
of the twin means in targets). Ensemble variants add UCB exploration and
the configured sample-weighting scheme on both critic and actor losses.
"""

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..envs.base import EnvSpec
from ..errors import ConfigError
from ..nn import (AdamState, MlpParams, ScalarAdam, adam_init, adam_step,
                  backprop, forward_cached, init_mlp, mlp_forward, sigmoid,
                  softplus)
from ..replay import ReplayBuffer
from ..uncertainty import (VAR_FLOOR, init_var_net, mixture_moments,
                           soft_update_params, var_activation)
from .base import TrainParams, UpdateDiagnostics, scheme_weights
from .variants import AgentVariant

LOG_STD_MIN = -20.0
LOG_STD_MAX = 2.0
LOG_2 = math.log(2.0)


@dataclass
class SacState:
    """All trainable state of a SAC-family agent."""

    policies: List[MlpParams]
    policy_adam: List[AdamState]
    critics1: List[MlpParams]
    critics2: List[MlpParams]
    targets1: List[MlpParams]
    targets2: List[MlpParams]
    critic_adam1: List[AdamState]
    critic_adam2: List[AdamState]
    log_alpha: float
    alpha_adam: ScalarAdam

    @property
    def n(self) -> int:
        return len(self.policies)


@dataclass
class _PolicySample:
    a: np.ndarray        # squashed, scaled actions (K, dA)
    log_pi: np.ndarray   # (K,)
    std: np.ndarray
    eps: np.ndarray
    t: np.ndarray        # tanh(u)
    clip_mask: np.ndarray
    acts: Optional[list]  # forward cache when gradients are needed


class SacAgent:
    def __init__(self, variant: AgentVariant, env_spec: EnvSpec,
                 params: TrainParams, seed: int = 0):
        if variant.family != "sac":
            raise ConfigError("SacAgent requires a sac-family variant")
        if env_spec.discrete:
            raise ConfigError("SAC requires a continuous action space")
        if not np.allclose(env_spec.action_low, -env_spec.action_high):
            raise ConfigError("SAC expects a symmetric action box")
        self.variant = variant
        self.params = params
        self.obs_dim = env_spec.state_dim
        self.action_dim = env_spec.action_dim
        self.scale = env_spec.action_high.astype(np.float64)

        seq = np.random.SeedSequence(seed)
        init_seq, agent_seq, buffer_seq = seq.spawn(3)
        rngs = [np.random.default_rng(s) for s in init_seq.spawn(3 * variant.n_members)]
        self.rng = np.random.default_rng(agent_seq)
        self.buffer = ReplayBuffer(params.buffer_capacity, variant.n_members,
                                   variant.mask_prob,
                                   np.random.default_rng(buffer_seq))

        hidden = list(params.hidden)
        critic_in = self.obs_dim + self.action_dim
        pol, pa, c1, c2, t1, t2, ca1, ca2 = [], [], [], [], [], [], [], []
        for j in range(variant.n_members):
            pol.append(init_mlp([self.obs_dim, *hidden, 2 * self.action_dim],
                                rngs[3 * j]))
            pa.append(adam_init(pol[-1]))
            if variant.critic_kind == "variance":
                c1.append(init_var_net(critic_in, hidden, 1, rngs[3 * j + 1]))
                c2.append(init_var_net(critic_in, hidden, 1, rngs[3 * j + 2]))
            else:
                c1.append(init_mlp([critic_in, *hidden, 1], rngs[3 * j + 1]))
                c2.append(init_mlp([critic_in, *hidden, 1], rngs[3 * j + 2]))
            t1.append(c1[-1].copy())
            t2.append(c2[-1].copy())
            ca1.append(adam_init(c1[-1]))
            ca2.append(adam_init(c2[-1]))
        target_entropy = (params.target_entropy if params.target_entropy is not None
                          else -float(self.action_dim))
        self.target_entropy = target_entropy
        self.state = SacState(pol, pa, c1, c2, t1, t2, ca1, ca2,
                              math.log(params.alpha_init), ScalarAdam())
        self._update_credit = 0.0

    # ------------------------------------------------------------------
    # policy

    @property
    def alpha(self) -> float:
        if self.params.fixed_alpha is not None:
            return self.params.fixed_alpha
        return math.exp(self.state.log_alpha)

    def _policy_sample(self, policy: MlpParams, s: np.ndarray,
                       want_cache: bool = False) -> _PolicySample:
        out, acts = forward_cached(policy, s, keep=want_cache)
        da = self.action_dim
        mean, log_std_raw = out[:, :da], out[:, da:]
        clip_mask = (log_std_raw > LOG_STD_MIN) & (log_std_raw < LOG_STD_MAX)
        log_std = np.clip(log_std_raw, LOG_STD_MIN, LOG_STD_MAX)
        std = np.exp(log_std)
        eps = self.rng.standard_normal(mean.shape)
        u = mean + std * eps
        t = np.tanh(u)
        a = self.scale * t
        # log-density of the squashed, scaled Gaussian sample
        log_pi = (-0.5 * eps**2 - log_std).sum(axis=1) \
            - 0.5 * math.log(2 * math.pi) * da \
            - (2.0 * (LOG_2 - u - softplus(-2.0 * u))).sum(axis=1) \
            - float(np.log(self.scale).sum())
        return _PolicySample(a, log_pi, std, eps, t, clip_mask, acts)

    def _mean_action(self, s: np.ndarray) -> np.ndarray:
        """Average of member policy mean actions, squashed to bounds."""
        total = np.zeros(self.action_dim)
        for policy in self.state.policies:
            out = mlp_forward(policy, s)
            total += self.scale * np.tanh(out[:self.action_dim])
        a = total / self.state.n
        return np.clip(a, -self.scale, self.scale)

    def act(self, s: np.ndarray, greedy: bool = False) -> np.ndarray:
        if greedy:
            return self._mean_action(s)
        if self.buffer.inserted < self.params.warmup:
            return self.rng.uniform(-self.scale, self.scale)
        s_row = np.asarray(s, dtype=np.float64)[None, :]
        if self.variant.exploration == "sample" or self.state.n == 1:
            return self._policy_sample(self.state.policies[0], s_row).a[0]
        return self._ucb_action(s_row)

    def _ucb_action(self, s_row: np.ndarray) -> np.ndarray:
        """Each member proposes an action; score by sampled-ensemble
        mean + ucb_lambda * std of the critic mean-heads."""
        n = self.state.n
        cands = np.vstack([self._policy_sample(p, s_row).a
                           for p in self.state.policies])
        x = np.hstack([np.repeat(s_row, n, axis=0), cands])
        member_q = np.empty((n, n))  # member l's value of candidate i
        for l in range(n):
            q1 = mlp_forward(self.state.critics1[l], x)[:, 0]
            q2 = mlp_forward(self.state.critics2[l], x)[:, 0]
            member_q[l] = np.minimum(q1, q2)
        mu = member_q.mean(axis=0)
        sd = np.sqrt(np.mean((member_q - mu) ** 2, axis=0))
        return cands[int(np.argmax(mu + self.variant.ucb_lambda * sd))]

    # ------------------------------------------------------------------
    # training

    def begin_episode(self):
        """No per-episode state; present for a uniform agent interface."""

    def observe(self, s, a, r, s_next, done: bool):
        self.buffer.push(s, a, r, s_next, done)

    def ready(self) -> bool:
        return self.buffer.inserted >= max(self.params.warmup,
                                           self.params.batch_size)

    def step_update(self) -> Optional[UpdateDiagnostics]:
        if not self.ready():
            return None
        self._update_credit += self.params.updates_per_step
        diag = None
        while self._update_credit >= 1.0:
            self._update_credit -= 1.0
            diag = self.update(self.buffer.sample(self.params.batch_size))
        return diag

    def update(self, batch) -> UpdateDiagnostics:
        v = self.variant
        p = self.params
        st = self.state
        diag = UpdateDiagnostics()
        var_pool, ebs_vals = [], []
        xi_c_vals, xi_a_vals, biv_vals, la_vals = [], [], [], []
        log_pi_means = []

        actions = np.asarray(batch.a, dtype=np.float64).reshape(len(batch), -1)

        for j in range(st.n):
            keep = batch.mask[:, j]
            k_sub = int(keep.sum())
            if k_sub == 0:
                continue
            s_sub = batch.s[keep]
            not_done = ~batch.done[keep]

            # targets come from the pre-update policy and target twins
            target, sigma2_tgt = self._member_targets(
                j, batch.s_next[keep], batch.r[keep], not_done)
            var_pool.append(sigma2_tgt)
            scaled = p.gamma**2 * sigma2_tgt * not_done
            np.maximum(scaled, VAR_FLOOR, out=scaled)

            # -- actor first (Q-networks still pre-update), then critic
            lp_mean, xi_a = self._train_actor(j, s_sub)
            log_pi_means.append(lp_mean)
            xi_a_vals.append(xi_a)

            w, xi_c, ebs_val = scheme_weights(v.weighting, scaled, p.xi_solver)
            xi_c_vals.append(xi_c)
            ebs_vals.append(ebs_val)
            x_buf = np.hstack([s_sub, actions[keep]])
            biv_term, la_term = self._train_critics(j, x_buf, target, w, k_sub)
            biv_vals.append(biv_term)
            la_vals.append(la_term)

        for j in range(st.n):
            soft_update_params(st.targets1[j], st.critics1[j], p.tau)
            soft_update_params(st.targets2[j], st.critics2[j], p.tau)

        if log_pi_means and self.params.fixed_alpha is None:
            grad = -(float(np.mean(log_pi_means)) + self.target_entropy)
            st.log_alpha = st.alpha_adam.update(st.log_alpha, grad,
                                                self.params.alpha_lr)

        if var_pool:
            pool = np.concatenate(var_pool)
            diag.var_mean = float(pool.mean())
            diag.var_median = float(np.median(pool))
        diag.xi_critic = float(np.mean(xi_c_vals)) if xi_c_vals else 0.0
        diag.xi_actor = float(np.mean(xi_a_vals)) if xi_a_vals else 0.0
        diag.ebs = float(np.min(ebs_vals)) if ebs_vals else float(len(batch))
        diag.loss_biv = float(np.mean(biv_vals)) if biv_vals else 0.0
        diag.loss_la = float(np.mean(la_vals)) if la_vals else 0.0
        return diag

    def _member_targets(self, j, s2_sub, r_sub, not_done):
        """Entropy-regularized min-twin targets for member j, plus the
        target ensemble's variance at the sampled next actions."""
        st = self.state
        nxt = self._policy_sample(st.policies[j], s2_sub)
        x2 = np.hstack([s2_sub, nxt.a])
        t1o = mlp_forward(st.targets1[j], x2)
        t2o = mlp_forward(st.targets2[j], x2)
        t_min = np.minimum(t1o[:, 0], t2o[:, 0])
        target = r_sub + self.params.gamma * not_done * (
            t_min - self.alpha * nxt.log_pi)
        sigma2_tgt = self._ensemble_variance(st.targets1, st.targets2,
                                             x2, j, t1o, t2o)
        return target, sigma2_tgt

    def _ensemble_variance(self, nets1, nets2, x, j, out1_j, out2_j):
        """Per-sample variance of the (target or online) critic ensemble
        at rows x, reusing member j's already-computed outputs."""
        v = self.variant
        k = x.shape[0]
        source = v.variance_source
        if source == "none":
            return np.zeros(k)
        if source == "single":
            return var_activation(out1_j[:, 1])
        outs1 = [out1_j if l == j else mlp_forward(nets1[l], x)
                 for l in range(self.state.n)]
        if source == "sampled":
            outs2 = [out2_j if l == j else mlp_forward(nets2[l], x)
                     for l in range(self.state.n)]
            mus = np.stack([np.minimum(o1[:, 0], o2[:, 0])
                            for o1, o2 in zip(outs1, outs2)])
            return np.mean((mus - mus.mean(axis=0)) ** 2, axis=0)
        mus = np.stack([o[:, 0] for o in outs1])
        sig2s = np.stack([var_activation(o[:, 1]) for o in outs1])
        _, sigma2 = mixture_moments(mus, sig2s)
        return sigma2

    def _actor_grads(self, j, s_sub):
        """Policy gradients of the weighted actor objective for member j.

        Weights and the entropy coefficient are treated as constants; the
        gradient flows through the reparameterized action into the frozen
        critic pair (minimum twin per sample) and the log-density.
        """
        v = self.variant
        st = self.state
        k_sub = s_sub.shape[0]
        smp = self._policy_sample(st.policies[j], s_sub, want_cache=True)
        x_pi = np.hstack([s_sub, smp.a])
        q1o, acts1 = forward_cached(st.critics1[j], x_pi)
        q2o, acts2 = forward_cached(st.critics2[j], x_pi)

        sigma2 = self._ensemble_variance(st.critics1, st.critics2,
                                         x_pi, j, q1o, q2o)
        sigma2 = np.maximum(sigma2, VAR_FLOOR)
        w, xi_a, _ = scheme_weights(v.weighting, sigma2, self.params.xi_solver)

        # d/dq_min of sum w * (alpha log_pi - q_min)
        g_q = -w
        use1 = q1o[:, 0] <= q2o[:, 0]
        da_total = np.zeros((k_sub, self.action_dim))
        for use, acts, critic, out in ((use1, acts1, st.critics1[j], q1o),
                                       (~use1, acts2, st.critics2[j], q2o)):
            gy = np.zeros_like(out)
            gy[use, 0] = g_q[use]
            _, dx = backprop(critic, acts, gy, need_input_grad=True)
            da_total += dx[:, self.obs_dim:]

        g_logpi = w * self.alpha
        # chain rule through a = scale * tanh(mean + std*eps) and the
        # reparameterized log-density (see _policy_sample)
        da_du = self.scale * (1.0 - smp.t**2)
        g_mean = g_logpi[:, None] * (2.0 * smp.t) + da_total * da_du
        g_lsr = (g_logpi[:, None] * (-1.0 + 2.0 * smp.t * smp.std * smp.eps)
                 + da_total * da_du * smp.std * smp.eps) * smp.clip_mask
        grad_out = np.hstack([g_mean, g_lsr])
        grads, _ = backprop(st.policies[j], smp.acts, grad_out)
        return grads, float(smp.log_pi.mean()), xi_a

    def _train_actor(self, j, s_sub):
        grads, lp_mean, xi_a = self._actor_grads(j, s_sub)
        adam_step(self.state.policies[j], grads, self.state.policy_adam[j],
                  self.params.actor_lr)
        return lp_mean, xi_a

    def _critic_loss_grads(self, critic, x_buf, target, w, k_sub):
        """Gradients of the weighted TD (+ attenuation) loss for one twin."""
        v = self.variant
        out, acts = forward_cached(critic, x_buf)
        mu = out[:, 0]
        residual = mu - target
        grad_out = np.zeros_like(out)
        biv_term = float(np.sum(w * residual**2))
        d_mu = 2.0 * w * residual
        la_term = 0.0
        if v.critic_kind == "variance" and v.lam > 0:
            raw = out[:, 1]
            sigma2 = var_activation(raw)
            la_term = float(np.mean(residual**2 / sigma2 + np.log(sigma2)))
            d_mu = d_mu + (v.lam / k_sub) * 2.0 * residual / sigma2
            grad_out[:, 1] = (v.lam / k_sub) * (
                1.0 / sigma2 - residual**2 / sigma2**2) * sigmoid(raw)
        grad_out[:, 0] = d_mu
        grads, _ = backprop(critic, acts, grad_out)
        return grads, biv_term, la_term

    def _train_critics(self, j, x_buf, target, w, k_sub):
        st = self.state
        biv_terms, la_terms = [], []
        for critic, adam in ((st.critics1[j], st.critic_adam1[j]),
                             (st.critics2[j], st.critic_adam2[j])):
            grads, biv_term, la_term = self._critic_loss_grads(
                critic, x_buf, target, w, k_sub)
            adam_step(critic, grads, adam, self.params.lr)
            biv_terms.append(biv_term)
            la_terms.append(la_term)
        return float(np.mean(biv_terms)), float(np.mean(la_terms))
