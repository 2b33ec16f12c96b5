"""Tests package for Transcript Memory Engine.
""" 