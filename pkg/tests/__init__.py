"""
Test package for spatial pooler face recognition
"""
