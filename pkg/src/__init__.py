"""
Spatial Pooler Face Recognition Package
"""

__version__ = "1.0.0"
__author__ = "Spatial Pooler Imaging Team"
__description__ = "HTM spatial pooler with rule-based initialization, image encoding and template recognition"
