"""
Core Pydantic models for scenarios, derived quantities and results.
"""

import math
from datetime import datetime
from enum import Enum
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.config import BISECTION_TOL, MC_BLOCK_TRIALS, MC_SEED, MC_TRIALS


class Regime(str, Enum):
    """Outcome class of a power-allocation optimisation."""
    SUSPEND = "suspend"
    FULL_POWER = "full_power"
    INTERIOR = "interior"


class RhoMode(str, Enum):
    """How the eavesdropper quantile rho(xi) is evaluated."""
    EXACT = "exact"
    LARGE_N = "large_n"


class Fidelity(str, Enum):
    """Monte-Carlo modelling depth."""
    CHANNEL_LEVEL = "channel"
    SINR_LEVEL = "sinr"


class SweepVariable(str, Enum):
    """Parameter a sweep runs over."""
    XI = "xi"
    TAU = "tau"
    RS = "rs"
    EPS = "eps"
    LAMBDA_E = "lambda_e"
    POWER_DBM = "power_dbm"
    N_ANTENNAS = "n_antennas"


class SweepMode(str, Enum):
    """Quantity a sweep evaluates at each grid point."""
    SOP_CURVE = "sop-curve"
    SOP_OPT = "sop-opt"
    RATE_CURVE = "rate-curve"
    RATE_OPT = "rate-opt"
    MC_VALIDATE = "mc-validate"


class SystemConfig(BaseModel):
    """Physical scenario: transmitter, legitimate link and eavesdropper field."""
    model_config = ConfigDict(frozen=True, allow_inf_nan=False, extra="forbid")

    n_antennas: int = Field(..., ge=2, description="Transmit antennas N (AN needs N-1 dimensions)")
    power: float = Field(..., gt=0, description="Noise-normalised linear transmit power P")
    alpha: float = Field(..., gt=2, description="Path-loss exponent")
    r_bob: float = Field(default=1.0, gt=0, description="Distance to the legitimate receiver")
    lambda_e: float = Field(..., ge=0, description="Eavesdropper density per unit area")
    tau: float = Field(..., ge=0, le=1, description="Channel estimation error coefficient")
    gamma_hat: float = Field(..., gt=0, description="Estimated main-channel gain ||h_b||^2")


class DerivedParams(BaseModel):
    """Shorthand quantities computed once from a configuration."""
    model_config = ConfigDict(frozen=True)

    kappa: float = Field(..., ge=0, description="Bob's SINR per unit power ratio")
    delta: float = Field(..., gt=0, lt=1, description="2 / alpha")
    beta: float = Field(..., gt=0, description="pi * Gamma(1 + delta)")
    t_pow: Optional[float] = Field(None, description="2 ** R_S")
    theta: Optional[float] = Field(None, description="(T - 1) / T")
    omega: Optional[float] = Field(None, description="(T - 1) / kappa, the smallest feasible ratio")
    l0: float = Field(..., description="delta / (N - 1)")
    l1: float = Field(..., description="1 - l0")
    l2: float = Field(..., description="1 + l0")
    big_l: Optional[float] = Field(None, description="Outage-threshold constant L")


class ParDecision(BaseModel):
    """Optimal power-allocation ratio or transmission suspension."""
    model_config = ConfigDict(frozen=True)

    regime: Regime = Field(..., description="Which optimality regime applies")
    xi: Optional[float] = Field(None, description="Optimal power allocation ratio")
    objective: Optional[float] = Field(None, description="SOP or secrecy rate at the optimum")

    @model_validator(mode="after")
    def _check_regime(self) -> "ParDecision":
        if self.regime == Regime.SUSPEND:
            if self.xi is not None or self.objective is not None:
                raise ValueError("suspended transmission carries no ratio and no objective")
        elif self.xi is None:
            raise ValueError(f"regime {self.regime.value} requires a ratio")
        elif self.regime == Regime.FULL_POWER and self.xi != 1.0:
            raise ValueError("full-power regime requires xi = 1")
        elif self.regime == Regime.INTERIOR and not 0.0 < self.xi < 1.0:
            raise ValueError("interior regime requires 0 < xi < 1")
        return self


class SopProblem(BaseModel):
    """Outage minimisation under a target secrecy rate."""
    model_config = ConfigDict(frozen=True)

    config: SystemConfig
    rate: float = Field(..., gt=0, description="Target secrecy rate R_S in bits/s/Hz")
    derived: DerivedParams

    @model_validator(mode="after")
    def _check_derived(self) -> "SopProblem":
        if self.derived.t_pow is None or not math.isclose(self.derived.t_pow, 2.0 ** self.rate):
            raise ValueError("derived parameters were not computed for this rate")
        return self


class RateProblem(BaseModel):
    """Secrecy-rate maximisation under an outage constraint."""
    model_config = ConfigDict(frozen=True)

    config: SystemConfig
    eps: float = Field(..., gt=0, lt=1, description="Secrecy outage threshold epsilon")
    derived: DerivedParams

    @model_validator(mode="after")
    def _check_derived(self) -> "RateProblem":
        if self.derived.big_l is None:
            raise ValueError("derived parameters lack the outage constant L")
        if self.config.lambda_e > 0 and self.derived.big_l <= 0:
            raise ValueError("L must be positive when eavesdroppers are present")
        return self


class RhoSolver(BaseModel):
    """Settings for evaluating the eavesdropper quantile rho(xi)."""
    model_config = ConfigDict(frozen=True)

    tol: float = Field(default=BISECTION_TOL, gt=0, description="Bisection bracket width")
    rho_max: float = Field(..., ge=0, description="rho(1) = L ** (1 / delta)")
    mode: RhoMode = Field(default=RhoMode.EXACT, description="Exact bisection or large-N closed form")


class McConfig(BaseModel):
    """Monte-Carlo run settings."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    trials: int = Field(default=MC_TRIALS, ge=1, description="Number of independent network realisations")
    seed: int = Field(default=MC_SEED, ge=0, lt=2 ** 64, description="Master seed")
    r_max_policy: Literal["auto", "fixed"] = Field(default="auto", description="Simulation disk radius policy")
    fixed_radius: Optional[float] = Field(None, gt=0, description="Disk radius when the policy is fixed")
    fidelity: Fidelity = Field(default=Fidelity.CHANNEL_LEVEL, description="Channel-level or SINR-level sampling")
    sample_gamma: bool = Field(default=False, description="Draw ||h_b||^2 ~ Gamma(N, 1) per trial instead of conditioning")
    block_trials: int = Field(default=MC_BLOCK_TRIALS, ge=1, description="Trials per random stream")

    @model_validator(mode="after")
    def _check_radius(self) -> "McConfig":
        if self.r_max_policy == "fixed" and self.fixed_radius is None:
            raise ValueError("fixed radius policy needs fixed_radius")
        return self


class McEstimate(BaseModel):
    """Monte-Carlo probability estimate with provenance."""
    model_config = ConfigDict(frozen=True)

    mean: float = Field(..., description="Estimated probability")
    std_err: float = Field(..., ge=0, description="Sample standard deviation over sqrt(trials)")
    trials: int = Field(..., ge=1, description="Number of trials")
    seed: int = Field(..., description="Master seed")
    certain_outage: bool = Field(default=False, description="Bob cannot decode, outage is certain")

    def z_score(self, reference: float) -> float:
        """Distance from a reference value in standard errors."""
        if self.std_err == 0:
            return 0.0 if self.mean == reference else math.inf
        return (self.mean - reference) / self.std_err


class Scenario(BaseModel):
    """A scenario file: configuration plus the optional fixed operating point."""
    model_config = ConfigDict(frozen=True)

    system: SystemConfig
    rate: Optional[float] = Field(None, gt=0, description="Target secrecy rate")
    eps: Optional[float] = Field(None, gt=0, lt=1, description="Outage threshold")
    xi: Optional[float] = Field(None, ge=0, le=1, description="Power allocation ratio")
    mc: McConfig = Field(default_factory=McConfig)


class SweepSpec(BaseModel):
    """A one-dimensional parameter sweep."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    mode: SweepMode
    variable: SweepVariable
    start: float
    stop: float
    steps: int = Field(..., ge=2)
    base: SystemConfig
    rate: Optional[float] = Field(None, gt=0)
    eps: Optional[float] = Field(None, gt=0, lt=1)
    xi: Optional[float] = Field(None, ge=0, le=1)
    rho_mode: RhoMode = RhoMode.EXACT
    tol: float = Field(default=BISECTION_TOL, gt=0)
    mc: McConfig = Field(default_factory=McConfig)
    gamma_follows_n: bool = Field(default=False, description="Keep gamma_hat = N when sweeping antennas")

    @model_validator(mode="after")
    def _check_sweep(self) -> "SweepSpec":
        if not self.start < self.stop:
            raise ValueError("sweep requires start < stop")

        fixed = {
            SweepVariable.RS: self.rate,
            SweepVariable.EPS: self.eps,
            SweepVariable.XI: self.xi,
        }
        if fixed.get(self.variable) is not None:
            raise ValueError(f"swept variable {self.variable.value} is also fixed")

        needs_rate = self.mode in (SweepMode.SOP_CURVE, SweepMode.SOP_OPT, SweepMode.MC_VALIDATE)
        needs_eps = self.mode in (SweepMode.RATE_CURVE, SweepMode.RATE_OPT)
        needs_xi = self.mode in (SweepMode.SOP_CURVE, SweepMode.RATE_CURVE, SweepMode.MC_VALIDATE)

        if needs_rate and self.rate is None and self.variable != SweepVariable.RS:
            raise ValueError(f"mode {self.mode.value} needs a fixed rate")
        if needs_eps and self.eps is None and self.variable != SweepVariable.EPS:
            raise ValueError(f"mode {self.mode.value} needs a fixed eps")
        if needs_xi and self.xi is None and self.variable != SweepVariable.XI:
            raise ValueError(f"mode {self.mode.value} needs a fixed xi")
        return self


class SweepTable(BaseModel):
    """Rows of a sweep, one per grid point, in grid order."""
    mode: SweepMode
    columns: List[str]
    rows: List[list] = Field(default_factory=list)


class CheckResult(BaseModel):
    """Outcome of one validation check."""
    name: str = Field(..., description="Check identifier")
    tolerance: Optional[float] = Field(None, description="Acceptance tolerance")
    observed: Optional[float] = Field(None, description="Worst observed value")
    passed: bool = Field(..., description="Whether the check passed")
    detail: str = Field(default="", description="Human-readable context")
    informational: bool = Field(default=False, description="Reported only, never fails the suite")


class ValidationReport(BaseModel):
    """Machine-readable result of a validation suite."""
    suite: str
    passed: bool
    checks: List[CheckResult] = Field(default_factory=list)
    timestamp: datetime = Field(default_factory=datetime.now, description="Report creation time")


class ValidationState(BaseModel):
    """State carried through the validation graph."""
    suite: str = Field(..., description="Requested suite name, or 'all'")
    checks: List[CheckResult] = Field(default_factory=list, description="Checks collected so far")
    current_step: str = Field(default="start", description="Last node that ran")
    passed: Optional[bool] = Field(None, description="Set by the finalize node")
