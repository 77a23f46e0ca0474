"""City-wide running average, yearly means and a convergence estimate."""
from rating_dynamics import convergence_value, rating_series, running_average, yearly_average
from rating_dynamics.fixtures import build_fixture

for city in ("troy", "triangle"):
    series = rating_series(build_fixture(city))
    print(f"== {city}: {len(series)} reviews")
    for year, (mean, count) in yearly_average(series).items():
        print(f"  {year}  mean {mean:.11f}  over {count}")
    est = convergence_value(running_average(series), tail_fraction=0.2, epsilon=0.05)
    verdict = "converged" if est.converged else "still moving"
    print(f"  running average settles at {est.limit:.4f} "
          f"(last 20% spans {est.tail_range:.4f}, {verdict})\n")
