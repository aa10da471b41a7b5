"""Binary logic levels read off synchronization measurements.

Three ways to split signals into "0"/"1":

* sync rule: "1" when the signal is synchronized with the reference oscillator;
* decimal rule: "1" when the ratio to the reference has a finite decimal expansion;
* threshold rule: "1" when the ratio to the reference is at least one.

Chaining oscillators multiplies ratios, which is the analog "multiplication"
primitive exposed here as :func:`compose_shr`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .metrics import SyncEstimate, Verdict, compose_fractions


class Bit(enum.IntEnum):
    ZERO = 0
    ONE = 1


class Rule(str, enum.Enum):
    SYNC_RULE = "SYNC_RULE"
    DECIMAL_RULE = "DECIMAL_RULE"
    THRESHOLD_RULE = "THRESHOLD_RULE"


class NoLogicLevel(ValueError):
    """The measurement cannot be mapped to a logic level."""


@dataclass(frozen=True)
class LogicVerdict:
    bit: Bit
    rule: Rule
    basis: Union[SyncEstimate, Fraction]

    def row(self) -> dict:
        if isinstance(self.basis, SyncEstimate):
            shr, eta = self.basis.shr, self.basis.eta
        else:
            shr, eta = self.basis, float("nan")
        return {
            "bit": int(self.bit),
            "rule": self.rule.value,
            "num": shr.numerator if shr is not None else 0,
            "den": shr.denominator if shr is not None else 0,
            "eta": eta,
        }


def logic_rule_sync(est: SyncEstimate, eta_threshold: float = 90.0) -> LogicVerdict:
    if est.verdict is Verdict.INSUFFICIENT_DATA:
        raise NoLogicLevel("insufficient data for a synchronization logic level")
    one = est.eta >= eta_threshold and est.verdict is Verdict.SYNCHRONIZED
    return LogicVerdict(Bit.ONE if one else Bit.ZERO, Rule.SYNC_RULE, est)


def is_finite_decimal(f: Fraction) -> bool:
    d = Fraction(f).denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    return d == 1


def logic_rule_decimal(shr: Fraction) -> LogicVerdict:
    shr = Fraction(shr)
    return LogicVerdict(Bit.ONE if is_finite_decimal(shr) else Bit.ZERO, Rule.DECIMAL_RULE, shr)


def logic_rule_threshold(shr: Fraction) -> LogicVerdict:
    shr = Fraction(shr)
    return LogicVerdict(Bit.ONE if shr.numerator >= shr.denominator else Bit.ZERO,
                        Rule.THRESHOLD_RULE, shr)


def compose_shr(fractions: Sequence[Fraction]) -> Fraction:
    return compose_fractions(fractions)


def apply_rule(rule, basis, eta_threshold: float = 90.0) -> LogicVerdict:
    """Dispatch on ``rule``; ``basis`` is a SyncEstimate for the sync rule, else a ratio."""
    rule = Rule(rule)
    if rule is Rule.SYNC_RULE:
        if not isinstance(basis, SyncEstimate):
            raise TypeError("the sync rule needs a SyncEstimate")
        return logic_rule_sync(basis, eta_threshold)
    if isinstance(basis, SyncEstimate):
        if basis.shr is None:
            raise NoLogicLevel("estimate carries no ratio")
        basis = basis.shr
    if rule is Rule.DECIMAL_RULE:
        return logic_rule_decimal(basis)
    return logic_rule_threshold(basis)


def evaluate_gate(chain_cfg, rule, analyzer=None) -> LogicVerdict:
    """Simulate a user-supplied chain stage and read the logic level at its far end.

    The level is taken from the synchronization between the first
    (reference) and the last oscillator of the chain.
    """
    from .chain import end_to_end_analyzer, simulate_chain
    from .metrics import AnalyzerConfig, estimate_sync

    analyzer = analyzer or AnalyzerConfig()
    bundle = simulate_chain(chain_cfg)
    est = estimate_sync(bundle.spike_trains[0], bundle.spike_trains[-1], end_to_end_analyzer(analyzer, chain_cfg.n))
    return apply_rule(rule, est, analyzer.eta_threshold)
