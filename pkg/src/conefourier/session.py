"""Session configuration: one prime, one discriminant class, one backend."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .scalars import Scalar, ScalarContext
from .padic import QuadraticCharacter
from .quadratic import space_K, space_V1, space_V2, weil_index


@dataclass
class SessionConfig:
    p: int = 3
    n: int = 3
    disc: str = "split"
    backend: str = "exact"
    tol: float = 1e-9
    depth: int = 12          # character depth M: N = 4 p^M
    nprec: int = 16          # residue precision guard for enumeration
    enum_cap: int = 4 * 10 ** 6
    seed: int = 0

    def validate(self):
        if self.n < 3:
            raise ValueError("n >= 3 required")
        if self.p < 3 or self.p % 2 == 0:
            raise ValueError("p must be an odd prime")
        if self.disc not in ("split", "unram", "ram-p", "ram-up"):
            raise ValueError(f"unknown disc {self.disc!r}")
        if self.enum_cap < 10 ** 4:
            raise ValueError("enumeration cap below minimal stabilization needs")


class Session:
    """Owns the scalar context, characters, spaces, constants and faults."""

    def __init__(self, config: SessionConfig | None = None, **kw):
        if config is None:
            config = SessionConfig(**kw)
        config.validate()
        self.config = config
        self.ctx = ScalarContext(config.p, config.depth, config.backend, config.tol)
        self.ctx.enum_cap = config.enum_cap
        self.chi = QuadraticCharacter(config.disc, config.p)
        self.K = space_K(self.chi.kappa)
        self.V2 = space_V2(config.n, self.chi.kappa, config.disc)
        self.V1 = space_V1(config.n, self.chi.kappa, config.disc)
        self.faults: dict[str, Scalar] = {}
        self._gamma = None
        self._c_psi_q = None
        self._caches: dict = {}

    @property
    def p(self) -> int:
        return self.config.p

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def gamma(self) -> Scalar:
        """The Weil index gamma(chi_K, psi), from the ratio oracle (cached)."""
        if self._gamma is None:
            self._gamma = weil_index(self.ctx, self.config.disc)
        g = self._gamma
        fault = self.faults.get("gamma")
        return g * fault if fault is not None else g

    def c_psi_q_value(self) -> Scalar:
        from .levelsets import c_psi_q
        if self._c_psi_q is None:
            self._c_psi_q = c_psi_q(self)
        return self._c_psi_q

    # -- fault injection (acceptance criterion: guards vacuous passes) -----

    def inject_fault(self, name: str):
        """Corrupt a single constant; at least one suite must then fail."""
        if name == "gamma":
            self.faults["gamma"] = self.ctx.rat(-1)
        elif name == "c_psi_q":
            self.faults["c_psi_q"] = self.ctx.rat(Fraction(self.p + 1, self.p))
            self._c_psi_q = None
        elif name == "measure":
            self.ctx.fault_measure = self.ctx.rat(Fraction(self.p, 1))
        else:
            raise ValueError(f"unknown fault {name!r}")
        self._caches.clear()

    def clear_faults(self):
        self.faults.clear()
        if hasattr(self.ctx, "fault_measure"):
            del self.ctx.fault_measure
        self._c_psi_q = None
        self._caches.clear()
