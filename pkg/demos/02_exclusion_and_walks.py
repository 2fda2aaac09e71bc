"""Binary exclusion dynamics seen as staircase walks.

Words over {0, 1} map to monotone lattice paths (1 = down, 0 = right); a
single swap adds or removes one unit square under the path.  With a
constant bias toward sorted order, the chain drifts to the top
configuration, and the hitting time grows like the area of the region.
"""

from biasedperm import (
    area,
    bottom_word,
    constant_bias,
    hitting_time_to_top,
    measure_boundedness,
    top_word,
    word_to_walk,
)
from biasedperm.kernels import square_table_bias

word = (0, 1, 0, 0, 1, 0, 1)
walk = word_to_walk(word)
print(f"word {word} -> steps {''.join(walk.steps)} (h={walk.h}, w={walk.w})")
print("area under the walk:", area(word))
print("bottom:", bottom_word(3, 4), "area", area(bottom_word(3, 4)))
print("top:   ", top_word(3, 4), "area", area(top_word(3, 4)))

# boundedness: the minimum ratio between swapping up and swapping down
report = measure_boundedness(constant_bias(0.75), 3, 4)
print(f"\nconstant bias 0.75: min bias ratio = {report.min_bias} (exact)")

table = {"h": 2, "w": 2, "bias": {"(1,1)": "1.5", "(1,2)": "2.0",
                                  "(2,1)": "1.3", "(2,2)": "1.2"}}
report = measure_boundedness(square_table_bias(table), 2, 2)
print(f"square-dependent bias: min ratio {report.min_bias} at square "
      f"{report.witness_square}, word {report.witness_word}")

# hitting times from the bottom to the top configuration
print("\nhitting times to the top, p = 0.75, 200 trials per size:")
for m in (3, 5, 7):
    summary = hitting_time_to_top(constant_bias(0.75), m, m, trials=200, seed=7)
    print(f"  n1=n0={m}: mean {summary.mean:8.1f}   mean/area "
          f"{summary.normalized_mean:.2f}")
