"""
Binary text classification with five interchangeable heads over a from-scratch autograd
"""
