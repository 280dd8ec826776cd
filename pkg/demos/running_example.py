"""Robustness of p & q over two hand-sized sign traces.

The report below recomputes every row with the monitor and reads the
counter rows back from a solved MILP; afterwards a few shifts are applied
by hand to see what the numbers mean.
"""
from timerob import casestudies, monitor as mon, oracle

apt, fs = casestudies.running_example()
phi = fs["phi"]

print(casestudies.report("running-example").text())

# The synchronous value at t=2 is -5: shifting every predicate earlier by
# up to 5 samples keeps phi violated at t=2, and a shift of 6 does not.
from timerob.signal import shift_sync

print("chi_phi(t=2) under early shifts h=0..6:",
      [oracle.brute_chi(phi, shift_sync(apt, h), 2) for h in range(7)])

# The asynchronous value is only -2. Moving q alone by 3 samples already
# satisfies phi at t=2, which a synchronous shift cannot capture.
from timerob.signal import ShiftVector, shift_async

print("chi_phi(t=2) with p fixed, q shifted by 3:",
      mon.chi(phi, shift_async(apt, ShiftVector((0, 3))), 2))
