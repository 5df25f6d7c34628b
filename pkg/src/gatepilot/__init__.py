"""gatepilot: color-gate detection, bearing pose, drag EKF, arc control, race sim."""

__version__ = "0.1.0"
