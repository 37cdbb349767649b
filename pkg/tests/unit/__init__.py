"""PrivAR Privacy Pipeline

Unit test package.

Author: PrivAR Team
License: MIT"""
