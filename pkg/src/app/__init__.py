"""
curv4 - four-dimensional curvature and shrinking soliton workbench
"""
