"""Computable extension theory for symmetric operators with finite deficiency."""
