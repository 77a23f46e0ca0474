"""Fit the oscillator model to a synthetic series, then to a fixture business."""
import numpy as np

from rating_dynamics import OscillatorParams, closed_form, fit_oscillator, rating_series
from rating_dynamics.fixtures import build_fixture
from rating_dynamics.periodicity import SECONDS_PER_YEAR
from rating_dynamics.timeseries import RatingSeries

true = OscillatorParams(m=1, c=0.1, k=4, q=1, omega=1.5, x0=0.2, v0=0)
rng = np.random.default_rng(1)
t = np.sort(rng.uniform(0, 12, 60))
t[0] = 0.0
secs = np.rint(t * SECONDS_PER_YEAR).astype(np.int64)
stars = 3.5 + closed_form(true, secs / SECONDS_PER_YEAR)[0] + rng.normal(0, 0.1, t.size)

fit = fit_oscillator(RatingSeries(secs, stars))
print("parameter   true     fitted")
for name in ("c", "k", "q", "omega"):
    print(f"{name:>9} {getattr(true, name):7.3f} {getattr(fit.params, name):9.3f}")
print(f"baseline {fit.baseline:.3f}, sse {fit.sse:.4f}, {fit.iterations} simplex iterations")

# Real star ratings are coarse and noisy; the fitted c and omega are
# descriptive, not evidence that a spring is at work.
ds = build_fixture("troy")
series = rating_series(ds, "troy-0001")
fit = fit_oscillator(series)
p = fit.params
print(f"\n{ds.business('troy-0001').name}: {len(series)} reviews, "
      f"c={p.c:.3g} k={p.k:.3g} omega={p.omega:.3g} baseline={fit.baseline:.3f} sse={fit.sse:.2f}")
