"""
Expected data against D2D pair separation
=========================================

Uses the sweep harness directly, the same code path as the command line tool.
"""
from d2d_auction import CellConfig
from d2d_auction.metrics import SweepSpec, run_sweep

spec = SweepSpec(
    param="max_d2d_distance_ratio",
    values=(0.1, 0.3, 0.5, 0.7, 0.9),
    realizations=10,
    cell=CellConfig(num_d2d=6),
    algorithms=("ca",),
)
print("ratio   cellular data (Gbit)   D2D data (Gbit)   D2D lifetime (h)")
for row in run_sweep(spec, jobs=1):
    print(
        f"{row['param_value']:5.1f}  {row['cell_expected_data_bits'] / 1e9:21.1f}"
        f"  {row['d2d_expected_data_bits'] / 1e9:16.2f}  {row['d2d_lifetime_h']:16.2f}"
    )
