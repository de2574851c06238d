"""Model constants shared by every module."""

from dataclasses import dataclass


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the birth-death random graph.

    beta : attachment intensity, > 0. A newborn vertex links to each alive
           vertex independently with probability min(beta/|V|, 1).
    eps  : birth bias, in (0, 1/2]. A step is a birth with probability
           p = 1/2 + eps, otherwise a uniform alive vertex is removed.

    p is always derived from eps, never stored on its own.
    """

    beta: float
    eps: float

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if not 0 < self.eps <= 0.5:
            raise ValueError(f"eps must be in (0, 1/2], got {self.eps}")

    @classmethod
    def from_p(cls, beta: float, p: float) -> "ModelParams":
        """Build from the birth probability p = 1/2 + eps."""
        return cls(beta=beta, eps=p - 0.5)

    @property
    def p(self) -> float:
        return 0.5 + self.eps

    @property
    def survival_exponent(self) -> float:
        """(1-p)/(2 eps): a vertex born at step j survives to step n with
        probability ~ (j/n) ** survival_exponent."""
        return (1.0 - self.p) / (2.0 * self.eps)

    @property
    def age_exponent(self) -> float:
        """p/(2 eps): limiting fraction of survivors with birth label <= x*n
        is x ** age_exponent."""
        return self.p / (2.0 * self.eps)

    def as_dict(self) -> dict:
        return {"beta": self.beta, "eps": self.eps, "p": self.p}
