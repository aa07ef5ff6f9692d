#pragma once

#include <cstddef>

#include "complab/rng.hpp"
#include "complab/time_grid.hpp"

namespace complab {

/// Brownian motion on the grid: B_0 = 0, exact N(0, step) increments.
SamplePath simulate_bm(const TimeGrid& grid, RandomStream& stream);

/// Default occupation window for local time: sqrt(step).
double default_local_time_epsilon(const TimeGrid& grid);

/// Occupation-time estimate of local time at zero:
///   L_{t_k} = (1 / 2 eps) * step * #{ i < k : |path[i]| <= eps }.
/// Each step contributes according to its left endpoint, so L_0 = 0 and L
/// increases on step i exactly when |path[i]| <= eps.
IncreasingPath local_time_zero(const SamplePath& path, double epsilon);

/// First grid time s with L_s > level (strict), censored if none.
StoppingSample inverse_clock(const IncreasingPath& clock, double level);

/// Poisson jump times with the given rate on (0, horizon]. rate == 0 gives none.
JumpTimes simulate_poisson(double rate, double horizon, RandomStream& stream);

/// N_t: number of jump times <= t.
std::size_t count_at(const JumpTimes& jumps, double t);

/// values[i] = N_{clock[i]}.
SamplePath time_change_counting(const JumpTimes& jumps, const IncreasingPath& clock);

/// First grid time with N_{clock_s} >= threshold; censored otherwise.
StoppingSample first_passage_timechanged(const JumpTimes& jumps, const IncreasingPath& clock,
                                         std::size_t threshold);

/// Same passage, resolved inside the crossing step by linear interpolation
/// of the clock (the clock is read as piecewise linear between grid points).
/// Agrees with first_passage_timechanged at grid resolution and produces
/// tie-free samples for law estimation.
StoppingSample first_passage_interpolated(const JumpTimes& jumps, const IncreasingPath& clock,
                                          std::size_t threshold);

}  // namespace complab
