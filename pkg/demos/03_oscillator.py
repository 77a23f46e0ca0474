"""The forced damped oscillator: regimes, closed form against RK4, resonance."""
import math

import numpy as np

from rating_dynamics import OscillatorParams, classify, closed_form, simulate_rk4, steady_state_amplitude
from rating_dynamics.oscillator import empirical_amplitude, envelope_peaks

for c in (0.0, 1.0, 2.0, 3.0):
    print(f"m=1 k=1 c={c}: {classify(OscillatorParams(c=c))}")

p = OscillatorParams(m=1, c=1, k=1, q=10, omega=5)
traj = simulate_rk4(p, 100.0, 1e-3)
err = np.max(np.abs(traj.x - closed_form(p, traj.t)[0]))
print(f"\nm=c=k=1, q=10, omega=5 is {classify(p)}")
print(f"  RK4 vs closed form, max |dx| = {err:.2e}")
print(f"  steady-state amplitude {steady_state_amplitude(p):.6f}, "
      f"measured over t >= 50: {empirical_amplitude(traj, 50.0):.6f}")

r = OscillatorParams(m=1, c=0, k=1, q=2, omega=1)
traj = simulate_rk4(r, 100.0, 1e-2)
t_pk, amp = envelope_peaks(traj, 2 * math.pi)
slope = np.polyfit(t_pk, amp, 1)[0]
print(f"\nresonant forcing ({classify(r)}): envelope grows at {slope:.4f} per unit time "
      f"(theory q/(2 sqrt(mk)) = {r.q / 2:.4f})")
