"""PrivAR Privacy Pipeline

Device, edge and cloud tiers for privacy risk detection on AR frames.

Author: PrivAR Team
License: MIT"""

__version__ = '1.0.0'
