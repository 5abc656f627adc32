"""DQN-family agents: single-net DQN through bootstrapped variance
ensembles with inverse-variance weighted TD updates.

One class covers the whole family; the AgentVariant decides ensemble size,
critic kind (point or variance heads), uncertainty source, sample
weighting, and exploration. Members pair one-to-one with their target
networks; bootstrap masks decide which members see which transitions.
"""

from typing import Optional

import numpy as np

from ..envs.base import EnvSpec
from ..errors import ConfigError
from ..nn import (adam_init, adam_step, backprop, forward_cached, init_mlp,
                  mlp_forward, sigmoid)
from ..replay import ReplayBuffer
from ..uncertainty import (VAR_FLOOR, EnsembleState, PriorPair, init_var_net,
                           mixture_moments, soft_update_targets, var_activation)
from .base import TrainParams, UpdateDiagnostics, scheme_weights
from .variants import AgentVariant


class DqnAgent:
    def __init__(self, variant: AgentVariant, env_spec: EnvSpec,
                 params: TrainParams, seed: int = 0):
        if variant.family != "dqn":
            raise ConfigError("DqnAgent requires a dqn-family variant")
        if not env_spec.discrete:
            raise ConfigError("DQN requires a discrete action space")
        self.variant = variant
        self.params = params
        self.n_actions = env_spec.n_actions
        self.state_dim = env_spec.state_dim

        seq = np.random.SeedSequence(seed)
        init_seq, agent_seq, buffer_seq = seq.spawn(3)
        init_rngs = [np.random.default_rng(s) for s in init_seq.spawn(2 * variant.n_members)]
        self.rng = np.random.default_rng(agent_seq)
        self.buffer = ReplayBuffer(params.buffer_capacity, variant.n_members,
                                   variant.mask_prob,
                                   np.random.default_rng(buffer_seq))

        hidden = list(params.hidden)
        members, targets, adam = [], [], []
        for j in range(variant.n_members):
            if variant.critic_kind == "variance":
                trainable = init_var_net(self.state_dim, hidden, self.n_actions,
                                         init_rngs[2 * j])
            else:
                trainable = init_mlp([self.state_dim, *hidden, self.n_actions],
                                     init_rngs[2 * j])
            prior = init_mlp([self.state_dim, *hidden, self.n_actions],
                             init_rngs[2 * j + 1])
            members.append(PriorPair(trainable, prior, variant.delta_rpf))
            targets.append(trainable.copy())
            adam.append(adam_init(trainable))
        self.ensemble = EnsembleState(members, targets, adam)

        self.epsilon = params.epsilon_start
        self._episode_index = -1
        self._active_member = 0
        self._update_credit = 0.0

    # ------------------------------------------------------------------
    # action selection

    def _member_scores(self, j: int, s: np.ndarray) -> np.ndarray:
        """Prior-augmented action values of member j at one state."""
        pair = self.ensemble.members[j]
        out = mlp_forward(pair.trainable, s)
        mu = out[:self.n_actions]
        if self.variant.delta_rpf != 0.0:
            mu = mu + self.variant.delta_rpf * mlp_forward(pair.prior, s)
        return mu

    def begin_episode(self):
        self._episode_index += 1
        if self._episode_index > 0:
            self.epsilon = max(self.params.epsilon_end,
                               self.epsilon * self.params.epsilon_decay)
        self._active_member = int(self.rng.integers(self.variant.n_members))

    def act(self, s: np.ndarray, greedy: bool = False) -> int:
        if greedy:
            return self._vote(s)
        if self.variant.exploration == "epsilon-greedy" \
                and self.rng.random() < self.epsilon:
            return int(self.rng.integers(self.n_actions))
        return int(np.argmax(self._member_scores(self._active_member, s)))

    def _vote(self, s: np.ndarray) -> int:
        """Plurality vote over member greedy actions, random tie-break."""
        votes = np.zeros(self.n_actions, dtype=int)
        for j in range(self.variant.n_members):
            votes[int(np.argmax(self._member_scores(j, s)))] += 1
        best = np.flatnonzero(votes == votes.max())
        if best.size == 1:
            return int(best[0])
        return int(self.rng.choice(best))

    # ------------------------------------------------------------------
    # training

    def observe(self, s, a, r, s_next, done: bool):
        self.buffer.push(s, a, r, s_next, done)

    def ready(self) -> bool:
        return self.buffer.inserted >= max(self.params.warmup,
                                           self.params.batch_size)

    def step_update(self) -> Optional[UpdateDiagnostics]:
        """Run the per-step update schedule; returns the last diagnostics."""
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
        n = v.n_members
        k = len(batch)
        not_done = ~batch.done
        actions = batch.a.astype(int)

        # One pass per target (and prior) network over the whole batch;
        # per-member quantities are then gathered by action index.
        tgt_out = [mlp_forward(t, batch.s_next) for t in self.ensemble.targets]
        if v.delta_rpf != 0.0:
            prior_next = [mlp_forward(m.prior, batch.s_next)
                          for m in self.ensemble.members]
        else:
            prior_next = None

        diag = UpdateDiagnostics()
        var_pool = []
        ebs_vals, xi_vals, biv_vals, la_vals = [], [], [], []

        for j in range(n):
            target, sigma2_tgt = self._member_targets(tgt_out, prior_next,
                                                      batch, j)
            var_pool.append(sigma2_tgt)
            # gamma^2-scaled variance of the bootstrapped part; terminal
            # targets have none (clamped to the floor)
            scaled = p.gamma**2 * sigma2_tgt * not_done
            np.maximum(scaled, VAR_FLOOR, out=scaled)

            keep = batch.mask[:, j]
            k_sub = int(keep.sum())
            if k_sub == 0:
                continue  # member sees none of this minibatch

            # xi is resolved on the full minibatch before masking; the
            # masked sub-batch is then weighted (and re-normalized) with it
            if v.weighting.kind == "biv":
                w_full, xi, ebs_val = scheme_weights(v.weighting, scaled,
                                                     p.xi_solver)
                w = self._renormalize(scaled[keep], xi)
            else:
                w, xi, ebs_val = scheme_weights(v.weighting, scaled[keep],
                                                p.xi_solver)
            xi_vals.append(xi)
            ebs_vals.append(ebs_val)

            biv_term, la_term = self._train_member(
                j, batch.s[keep], actions[keep], target[keep], w, k_sub)
            biv_vals.append(biv_term)
            la_vals.append(la_term)

        soft_update_targets(self.ensemble, p.tau)

        pool = np.concatenate(var_pool)
        diag.var_mean = float(pool.mean())
        diag.var_median = float(np.median(pool))
        diag.xi_critic = float(np.mean(xi_vals)) if xi_vals else 0.0
        diag.ebs = float(np.min(ebs_vals)) if ebs_vals else float(k)
        diag.loss_biv = float(np.mean(biv_vals)) if biv_vals else 0.0
        diag.loss_la = float(np.mean(la_vals)) if la_vals else 0.0
        return diag

    @staticmethod
    def _renormalize(scaled_sub: np.ndarray, xi: float) -> np.ndarray:
        w = 1.0 / (scaled_sub + xi)
        return w / w.sum()

    def _member_targets(self, tgt_out, prior_next, batch, j):
        """Member j's TD targets (its own prior-augmented target argmax)
        and the ensemble variance of the bootstrap estimate."""
        v = self.variant
        k = len(batch)
        rows = np.arange(k)
        scores = tgt_out[j][:, :self.n_actions]
        if prior_next is not None:
            scores = scores + v.delta_rpf * prior_next[j]
        a_next = np.argmax(scores, axis=1)
        t_mu = scores[rows, a_next]
        target = batch.r + self.params.gamma * ~batch.done * t_mu
        sigma2_tgt = self._target_variance(tgt_out, prior_next, rows, a_next, k)
        return target, sigma2_tgt

    def _target_variance(self, tgt_out, prior_next, rows, a_next,
                         k) -> np.ndarray:
        v = self.variant
        n_act = self.n_actions
        source = v.variance_source
        if source == "none":
            return np.zeros(k)
        if source == "single":
            return var_activation(tgt_out[0][rows, n_act + a_next])
        mus = np.stack([out[:, :n_act][rows, a_next] for out in tgt_out])
        if prior_next is not None:
            mus = mus + v.delta_rpf * np.stack(
                [pn[rows, a_next] for pn in prior_next])
        if source == "sampled":
            return np.mean((mus - mus.mean(axis=0)) ** 2, axis=0)
        sig2s = np.stack([var_activation(out[rows, n_act + a_next])
                          for out in tgt_out])
        _, sigma2 = mixture_moments(mus, sig2s)
        return sigma2

    def _member_loss_grads(self, j, s_sub, a_sub, target_sub, w, k_sub):
        """Gradients of the weighted TD (+ attenuation) loss for member j."""
        v = self.variant
        pair = self.ensemble.members[j]
        n_act = self.n_actions
        rows = np.arange(k_sub)

        out, acts = forward_cached(pair.trainable, s_sub)
        mu = out[rows, a_sub].copy()
        if v.delta_rpf != 0.0:
            mu += v.delta_rpf * mlp_forward(pair.prior, s_sub)[rows, a_sub]
        residual = mu - target_sub

        grad_out = np.zeros_like(out)
        biv_term = float(np.sum(w * residual**2))
        d_mu = 2.0 * w * residual
        la_term = 0.0
        if v.critic_kind == "variance":
            raw = out[rows, n_act + a_sub]
            sigma2 = var_activation(raw)
            if v.lam > 0:
                la_term = float(np.mean(residual**2 / sigma2 + np.log(sigma2)))
                d_mu = d_mu + (v.lam / k_sub) * 2.0 * residual / sigma2
                d_raw = (v.lam / k_sub) * (1.0 / sigma2
                                           - residual**2 / sigma2**2) * sigmoid(raw)
                grad_out[rows, n_act + a_sub] = d_raw
        grad_out[rows, a_sub] = d_mu

        grads, _ = backprop(pair.trainable, acts, grad_out)
        return grads, biv_term, la_term

    def _train_member(self, j, s_sub, a_sub, target_sub, w, k_sub):
        grads, biv_term, la_term = self._member_loss_grads(
            j, s_sub, a_sub, target_sub, w, k_sub)
        adam_step(self.ensemble.members[j].trainable, grads,
                  self.ensemble.adam[j], self.params.lr)
        return biv_term, la_term

    # ------------------------------------------------------------------
    # evaluation helpers

    def ensemble_q(self, states: np.ndarray) -> np.ndarray:
        """Ensemble-mean prior-augmented action values, for diagnostics."""
        total = np.zeros((states.shape[0], self.n_actions))
        for j, pair in enumerate(self.ensemble.members):
            out = mlp_forward(pair.trainable, states)[:, :self.n_actions]
            if self.variant.delta_rpf != 0.0:
                out = out + self.variant.delta_rpf * mlp_forward(pair.prior, states)
            total += out
        return total / self.variant.n_members
