"""
Gaussian-moment simulation and quantum Fisher information for a
pulse-kicked optomechanical resonator
"""

__version__ = "0.1.0"
