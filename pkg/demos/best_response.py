"""
Best response of a single transmitter
=====================================

How the utility-maximizing power moves with channel quality, and what the
battery model charges for it.
"""
import numpy as np

from d2d_auction import GameParams
from d2d_auction.power_game import best_response_alpha, lifetime, optimal_power, utility

params = GameParams()
print("battery lifetime at a few transmit powers (circuit power 50 mW on top)")
for p in (0.0, 0.05, 0.1, 0.15, 0.2):
    print(f"  p = {p:.2f} W -> {lifetime(p, params) / 3600:7.2f} h")

# better channels need less power before the battery cost wins
print("\nchannel quality alpha (1/W), unconstrained optimum, best response")
for alpha in (1.0, 10.0, 1e3, 1e6, 1e9):
    print(f"  {alpha:8.0e}  {optimal_power(alpha, params):.5f}  {best_response_alpha(alpha, params):.5f}")

# the utility curve is single peaked; the best response sits on the peak
alpha = 10.0
grid = np.linspace(0, params.p_bar, 2001)
u = utility(grid, alpha, params, 180e3)
print(f"\nalpha = {alpha}: grid peak at {grid[np.argmax(u)]:.4f} W, root finder {best_response_alpha(alpha, params):.4f} W")
