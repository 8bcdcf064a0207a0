"""
AIS Activity - vessel journeys and maritime activity metrics from AIS records
"""

__version__ = "0.1.0"
