"""
Test cases of text-heads
"""
