"""
Two-way teleportation over a W-Bell channel
===========================================

Alice and Bob each hold an unknown real qubit. One shared five-qubit
channel lets both states cross at the same time.
"""

import math

import numpy as np

from qteleroute.channels import make_channel, verify_channel
from qteleroute.protocol import derive_correction_table, layout_for, run_bqt, step_labels

# the channel: a W state on particles 1-3 next to a Bell pair on 4-5
ch = make_channel("wbell")
print("holders:", "".join(ch.holders))
for i, a in enumerate(ch.state.amplitudes):
    if abs(a) > 1e-12:
        print(f"  |{i:05b}>  {a.real:+.4f}")
print(verify_channel("wbell"))

# every measurement outcome needs its own Pauli fix-up on each side;
# the table is found by trying all words on a few probe states
table = derive_correction_table("wbell")
print(len(table.entries), "outcomes, ancilla branch probability", table.branch_probability)
for bits, words in list(table.entries.items())[:6]:
    print(" ", bits, "->", words)

# the step sequence actually applied
print(step_labels(layout_for("wbell")))

# now some random inputs
rng = np.random.default_rng(1)
for _ in range(5):
    ta, tb = rng.uniform(0, 4 * math.pi, 2)
    r = run_bqt("wbell", ta, tb, table, rng)
    t = r.trace
    print(f"theta_a={ta:5.2f} theta_b={tb:5.2f} outcome {t.outcomes} fix {t.corrections} "
          f"F_ab={t.fidelity_a_to_b:.12f} F_ba={t.fidelity_b_to_a:.12f}")

# the variant that follows the printed gate list leaves too little
# entanglement for both directions
try:
    derive_correction_table("wbell", variant="printed")
except Exception as e:
    print(type(e).__name__, e)
