"""Bird track forecasting with from-scratch LSTMs and takeoff deconfliction."""

__version__ = "0.1.0"
