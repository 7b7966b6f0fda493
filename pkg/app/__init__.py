"""
heavyls: shape-constrained least squares under heavy-tailed noise.
"""
