"""Diabetes lab dashboard: traffic-light gauges, visit tables, and trends
over an OpenMRS-style EHR, with an offline-capable response cache."""

__version__ = "0.1.0"
