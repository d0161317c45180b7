"""Reporting module for coverage-scout."""

from coverage_scout.reporting.csv import CSVReporter
from coverage_scout.reporting.json import JSONReporter

__all__ = ["CSVReporter", "JSONReporter"]
