"""Tests package for knowledge-share"""
