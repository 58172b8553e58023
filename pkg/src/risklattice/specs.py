"""Tagged risk-measure configurations and their evaluation dispatch.

A ``RiskMeasureSpec`` pins down one functional (VaR, ES, adjusted ES,
distortion, expected loss, certainty equivalent, shortfall, optimized
certainty equivalent, or mean-deviation) together with its parameters, and
evaluates it on single samples or on batches of samples.  Text specs such as
``es:0.95`` or ``shortfall:poly2exp`` are parsed by :func:`parse_measure_spec`
(the grammar the CLI and config files use).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import measures as _m
from .errors import DomainError
from .functions import (
    AdjustmentGrid,
    DeviationWeight,
    DistortionFunction,
    LossFunction,
    parse_distortion_spec,
    parse_loss_spec,
    parse_weight_spec,
)
from .sample import as_batch, as_sample

__all__ = ["RiskMeasureSpec", "parse_measure_spec"]

_KINDS = (
    "var",
    "es",
    "aes",
    "distortion",
    "expected_loss",
    "ce",
    "shortfall",
    "oce",
    "mmd",
)


@dataclass(frozen=True)
class RiskMeasureSpec:
    """One configured risk functional; construct via the classmethods."""

    kind: str
    label: str
    level: float | None = None
    grid: AdjustmentGrid | None = None
    phi: DistortionFunction | None = None
    ell: LossFunction | None = None
    weight: DeviationWeight | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainError(f"unknown risk measure kind {self.kind!r}")

    # -- constructors -------------------------------------------------------

    @classmethod
    def var(cls, p: float) -> "RiskMeasureSpec":
        return cls(kind="var", level=float(p), label=f"VaR({p:g})")

    @classmethod
    def es(cls, p: float) -> "RiskMeasureSpec":
        return cls(kind="es", level=float(p), label=f"ES({p:g})")

    @classmethod
    def aes(cls, grid: AdjustmentGrid) -> "RiskMeasureSpec":
        pairs = ",".join(f"{l:g}:{c:g}" for l, c in zip(grid.levels, grid.penalties))
        return cls(kind="aes", grid=grid, label=f"AES({pairs})")

    @classmethod
    def distortion(cls, phi: DistortionFunction) -> "RiskMeasureSpec":
        return cls(kind="distortion", phi=phi, label=f"Distortion({phi.name})")

    @classmethod
    def expected_loss(cls, ell: LossFunction) -> "RiskMeasureSpec":
        return cls(kind="expected_loss", ell=ell, label=f"ExpectedLoss({ell.name})")

    @classmethod
    def certainty_equivalent(cls, ell: LossFunction) -> "RiskMeasureSpec":
        return cls(kind="ce", ell=ell, label=f"CE({ell.name})")

    @classmethod
    def shortfall(cls, ell: LossFunction) -> "RiskMeasureSpec":
        return cls(kind="shortfall", ell=ell, label=f"Shortfall({ell.name})")

    @classmethod
    def oce(cls, ell: LossFunction) -> "RiskMeasureSpec":
        return cls(kind="oce", ell=ell, label=f"OCE({ell.name})")

    @classmethod
    def mmd(cls, weight: DeviationWeight, phi: DistortionFunction) -> "RiskMeasureSpec":
        return cls(kind="mmd", weight=weight, phi=phi, label=f"MMD({weight.name},{phi.name})")

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, sample) -> float:
        """Evaluate the configured functional on one sample."""
        return float(self.evaluate_batch(as_sample(sample)[None, :])[0])

    def evaluate_batch(self, X) -> np.ndarray:
        """Evaluate on a batch of samples (one per row); returns a 1-D array."""
        X = as_batch(X)
        if self.kind == "var":
            return _m._var_batch(X, self.level)
        if self.kind == "es":
            return _m._es_batch(X, self.level)
        if self.kind == "aes":
            return _m._aes_batch(X, self.grid)
        if self.kind == "distortion":
            return _m._distortion_batch(X, self.phi)
        if self.kind == "expected_loss":
            return _m._expected_loss_batch(X, self.ell)
        if self.kind == "ce":
            return _m._ce_batch(X, self.ell)
        if self.kind == "shortfall":
            return _m._shortfall_batch(X, self.ell)
        if self.kind == "oce":
            return _m._oce_batch(X, self.ell)
        return _m._mmd_batch(X, self.weight, self.phi)

    @property
    def promises_zero_violations(self) -> bool:
        """True when the configuration is structurally submodular, so a sweep
        reporting any violation indicates a defect rather than a finding."""
        if self.kind in ("es", "oce", "expected_loss"):
            return True
        if self.kind == "distortion":
            return self.phi.concave
        if self.kind == "ce":
            return self.ell.convex
        if self.kind == "mmd":
            return self.weight.linear
        return False


def parse_measure_spec(text: str) -> RiskMeasureSpec:
    """Parse a compact text spec into a ``RiskMeasureSpec``.

    Grammar::

        var:P                 es:P
        aes:L1:C1[,L2:C2...]  level:penalty pairs, levels increasing
        dist:PHI              PHI = es:P | var:P | identity | pow:T
        eloss:LOSS            LOSS = exp:G | poly2exp | linear | expectile:A |
        ce:LOSS                      piecewise:SM,SP | cvar:P | quadlin | arctan-bend
        shortfall:LOSS
        oce:LOSS
        mmd:WEIGHT:PHI        WEIGHT = identity | square | pow:K
    """
    head, _, rest = text.strip().partition(":")
    try:
        if head == "var":
            return RiskMeasureSpec.var(_level(rest))
        if head == "es":
            return RiskMeasureSpec.es(_level(rest))
        if head == "aes":
            pairs = [item.split(":") for item in rest.split(",")]
            levels = tuple(float(a) for a, _ in pairs)
            penalties = tuple(float(b) for _, b in pairs)
            return RiskMeasureSpec.aes(AdjustmentGrid(levels, penalties))
        if head == "dist":
            return RiskMeasureSpec.distortion(parse_distortion_spec(rest))
        if head == "eloss":
            return RiskMeasureSpec.expected_loss(parse_loss_spec(rest))
        if head == "ce":
            return RiskMeasureSpec.certainty_equivalent(parse_loss_spec(rest))
        if head == "shortfall":
            return RiskMeasureSpec.shortfall(parse_loss_spec(rest))
        if head == "oce":
            return RiskMeasureSpec.oce(parse_loss_spec(rest))
        if head == "mmd":
            wtext, _, ptext = rest.partition(":")
            # the weight spec may itself carry one ':' argument (pow:K)
            if wtext == "pow":
                arg, _, ptext = ptext.partition(":")
                wtext = f"pow:{arg}"
            return RiskMeasureSpec.mmd(parse_weight_spec(wtext), parse_distortion_spec(ptext))
    except DomainError:
        raise
    except (TypeError, ValueError) as exc:
        raise DomainError(f"bad measure spec {text!r}: {exc}") from exc
    raise DomainError(
        f"unknown measure spec {text!r}; expected one of var|es|aes|dist|eloss|ce|shortfall|oce|mmd"
    )


def _level(text: str) -> float:
    p = float(text)
    if not 0.0 < p < 1.0:
        raise DomainError(f"confidence level must lie in (0, 1), got {p}")
    return p
