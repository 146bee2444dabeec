"""
API routes
"""

