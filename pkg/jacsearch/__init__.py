"""Search for hyperelliptic Jacobians of B-easy order and recover their zeta functions."""
