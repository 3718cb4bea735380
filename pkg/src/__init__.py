"""Init file for src package."""

from src.models import ParDecision, Regime, Scenario, SystemConfig
from src.workflow import ValidationWorkflow

__all__ = ["ParDecision", "Regime", "Scenario", "SystemConfig", "ValidationWorkflow"]
