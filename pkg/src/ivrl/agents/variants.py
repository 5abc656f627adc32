"""Agent variant descriptions and the named presets for both families."""

from dataclasses import dataclass, field, replace
from typing import Optional

from ..errors import ConfigError
from ..weighting import WeightScheme


@dataclass(frozen=True)
class AgentVariant:
    """Algorithm shape: family, ensemble, critic kind, weighting, exploration.

    The critic's uncertainty source is derived: variance critics use the
    Gaussian-mixture variance (or their own head when N=1); point critics
    use the sampled variance of member means.
    """

    family: str = "dqn"                       # 'dqn' | 'sac'
    n_members: int = 1
    critic_kind: str = "point"                # 'point' | 'variance'
    weighting: WeightScheme = field(default_factory=WeightScheme)
    lam: float = 0.0                          # loss-attenuation weight
    exploration: str = "epsilon-greedy"       # dqn: epsilon-greedy|bootstrap
    delta_rpf: float = 0.0                    # sac: ucb|sample
    mask_prob: float = 1.0
    ucb_lambda: float = 1.0

    def __post_init__(self):
        if self.family not in ("dqn", "sac"):
            raise ConfigError(f"unknown family {self.family!r}")
        if self.critic_kind not in ("point", "variance"):
            raise ConfigError(f"unknown critic kind {self.critic_kind!r}")
        if self.n_members < 1:
            raise ConfigError("n_members must be >= 1")
        if self.lam < 0:
            raise ConfigError("lam must be >= 0")
        if self.lam > 0 and self.critic_kind != "variance":
            raise ConfigError("loss attenuation requires variance critics")
        if self.critic_kind == "point" and self.n_members == 1 \
                and self.weighting.kind != "uniform":
            raise ConfigError("a single point critic has no variance estimate "
                              "to weight with")
        valid_expl = ("epsilon-greedy", "bootstrap") if self.family == "dqn" \
            else ("ucb", "sample")
        if self.exploration not in valid_expl:
            raise ConfigError(f"exploration {self.exploration!r} invalid for "
                              f"{self.family}")
        if self.exploration == "bootstrap" and self.n_members < 2:
            raise ConfigError("bootstrap exploration requires an ensemble")
        if self.family == "sac" and self.delta_rpf != 0.0:
            raise ConfigError("randomized priors are a DQN-family mechanism")
        if self.delta_rpf < 0:
            raise ConfigError("delta_rpf must be >= 0")
        if not 0.0 < self.mask_prob <= 1.0:
            raise ConfigError("mask_prob must be in (0, 1]")
        if self.ucb_lambda < 0:
            raise ConfigError("ucb_lambda must be >= 0")

    @property
    def variance_source(self) -> str:
        """Where per-sample target variances come from."""
        if self.critic_kind == "variance":
            return "mixture" if self.n_members > 1 else "single"
        return "sampled" if self.n_members > 1 else "none"


def _biv() -> WeightScheme:
    return WeightScheme("biv", mebs_ratio=0.5)


VARIANTS = {
    # DQN family
    "dqn": AgentVariant("dqn", 1, "point", WeightScheme("uniform"),
                        exploration="epsilon-greedy"),
    "bootstrap-dqn": AgentVariant("dqn", 5, "point", WeightScheme("uniform"),
                                  exploration="bootstrap", delta_rpf=1.0,
                                  mask_prob=0.9),
    "sunrise-dqn": AgentVariant("dqn", 5, "point", WeightScheme("sunrise"),
                                exploration="bootstrap", delta_rpf=1.0,
                                mask_prob=0.9),
    "biv-bootstrap-dqn": AgentVariant("dqn", 5, "point", _biv(),
                                      exploration="bootstrap", delta_rpf=1.0,
                                      mask_prob=0.9),
    "iv-dqn": AgentVariant("dqn", 5, "variance", _biv(), lam=5.0,
                           exploration="bootstrap", delta_rpf=1.0,
                           mask_prob=0.9),
    "l2-varensemble-dqn": AgentVariant("dqn", 5, "variance",
                                       WeightScheme("uniform"), lam=5.0,
                                       exploration="bootstrap", delta_rpf=1.0,
                                       mask_prob=0.9),
    "biv-varnetwork-dqn": AgentVariant("dqn", 1, "variance", _biv(), lam=5.0,
                                       exploration="epsilon-greedy"),
    "l2-varnetwork-dqn": AgentVariant("dqn", 1, "variance",
                                      WeightScheme("uniform"), lam=5.0,
                                      exploration="epsilon-greedy"),
    # SAC family
    "sac": AgentVariant("sac", 1, "point", WeightScheme("uniform"),
                        exploration="sample"),
    "ensemble-sac": AgentVariant("sac", 5, "point", WeightScheme("uniform"),
                                 exploration="ucb", mask_prob=0.9),
    "sunrise-sac": AgentVariant("sac", 5, "point", WeightScheme("sunrise"),
                                exploration="ucb", mask_prob=0.9),
    "biv-ensemble-sac": AgentVariant("sac", 5, "point", _biv(),
                                     exploration="ucb", mask_prob=0.9),
    "iv-sac": AgentVariant("sac", 5, "variance", _biv(), lam=5.0,
                           exploration="ucb", mask_prob=0.9),
    "l2-varensemble-sac": AgentVariant("sac", 5, "variance",
                                       WeightScheme("uniform"), lam=5.0,
                                       exploration="ucb", mask_prob=0.9),
    "biv-varnetwork-sac": AgentVariant("sac", 1, "variance", _biv(), lam=5.0,
                                       exploration="sample"),
    "l2-varnetwork-sac": AgentVariant("sac", 1, "variance",
                                      WeightScheme("uniform"), lam=5.0,
                                      exploration="sample"),
    "uwac-varensemble-sac": AgentVariant("sac", 5, "variance",
                                         WeightScheme("uwac"), lam=5.0,
                                         exploration="ucb", mask_prob=0.9),
    "sunrise-varensemble-sac": AgentVariant("sac", 5, "variance",
                                            WeightScheme("sunrise"), lam=5.0,
                                            exploration="ucb", mask_prob=0.9),
}


def get_variant(name: str, **overrides) -> AgentVariant:
    if name not in VARIANTS:
        raise ConfigError(f"unknown agent variant {name!r}; expected one of "
                          f"{sorted(VARIANTS)}")
    base = VARIANTS[name]
    return replace(base, **overrides) if overrides else base
