"""Optimal measurements for two pure states."""
