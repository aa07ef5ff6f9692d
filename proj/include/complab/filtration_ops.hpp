#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "complab/binning.hpp"
#include "complab/observation.hpp"
#include "complab/rng.hpp"
#include "complab/time_grid.hpp"

namespace complab {

// ---------------------------------------------------------------------------
// Optional projection onto a coarser filtration

struct ProjectionBinStats {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 0;
    double mean = 0.0;       // projected intensity for the bin
    double std_error = 0.0;
};

struct ProjectionAtTime {
    double s = 0.0;
    Binning binning{std::vector<double>{0.0}};
    std::vector<ProjectionBinStats> bins;
};

/// Per-(s, bin) intensity table plus the bin each path fell into.
struct ProjectionResult {
    std::vector<ProjectionAtTime> table;          // one entry per snapshot time
    std::vector<std::uint16_t> bin_index;         // path-major, one per (path, time)
    std::vector<std::pair<double, std::size_t>> empty_bins;
    std::size_t n_paths = 0;

    double projected(std::size_t path, std::size_t column) const;
    /// Projected values of one path at every snapshot time.
    std::vector<double> projected_path(std::size_t path) const;
    /// Bin-count-weighted mean of the table at column j.
    double weighted_mean(std::size_t column) const;
};

/// Optional-projection estimate of the intensity onto the coarse view:
/// at each snapshot time s the paths are binned by the coarse observable
/// (equal-probability bins unless `fixed_bins` is given) and each bin gets the
/// average intensity of its paths.
ProjectionResult optional_projection_estimate(const PathBundle& lambda, const Observations& obs,
                                              const FiltrationView& coarse, const std::string& observable,
                                              std::size_t n_bins, const std::optional<Binning>& fixed_bins = {});

/// int_0^{R} of an intensity sampled at `times`: trapezoid on steps that end
/// before R, left value times the partial length on the step containing R.
/// Values at times >= R are never read.
double integrate_intensity(const std::vector<double>& times, const std::vector<double>& values, double upto);

// ---------------------------------------------------------------------------
// Change of measure

/// Density process Z_t = dQ/dP on F_t along one path.
class DensityMartingale {
public:
    /// Requires Z_0 = 1 and Z_t >= floor > 0 everywhere.
    explicit DensityMartingale(SamplePath z, double floor = 1e-300);

    const SamplePath& path() const { return z_; }
    double operator[](std::size_t i) const { return z_[i]; }
    double floor() const { return floor_; }

private:
    SamplePath z_;
    double floor_;
};

/// Closed-form predictable bracket <Z, M> along one path (values[0] = 0).
using PredictableBracket = std::function<SamplePath(const DensityMartingale& Z, const StoppingSample& R)>;

/// Named closed-form brackets. Lookup of an unregistered name throws
/// BracketUnavailable.
class BracketRegistry {
public:
    void register_bracket(std::string name, PredictableBracket bracket);
    const PredictableBracket& find(const std::string& name) const;
    bool contains(const std::string& name) const { return brackets_.count(name) > 0; }

private:
    std::map<std::string, PredictableBracket> brackets_;
};

/// Poisson intensity tilt lambda -> mu for the first jump R:
/// Z_t = (mu / lambda)^{1{t >= R}} exp(-(mu - lambda)(t ^ R)).
SamplePath poisson_tilt_density(const TimeGrid& grid, double lambda, double mu, const StoppingSample& R);

/// d<Z, M>_s = Z_{s-} (mu - lambda) 1{s <= R} ds with Z_{s-} taken at the
/// left end of each step (predictable integrand).
PredictableBracket poisson_tilt_bracket(double lambda, double mu);

/// Q-compensator base_t + int_0^t (1 / Z_{s-}) d<Z, M>_s, with the bracket
/// looked up by name in the registry.
IncreasingPath girsanov_compensator(const IncreasingPath& base, const DensityMartingale& Z, const StoppingSample& R,
                                    const BracketRegistry& registry, const std::string& bracket_name);

// ---------------------------------------------------------------------------
// Honest time L = sup{t <= 1 : B_t = 0}

/// Standard normal CDF.
double normal_cdf(double x);

/// Z_t = P(L > t | F_t) = 2 Phi(-|b| / sqrt(1 - t)). Throws HorizonViolation for t >= 1.
double azema_supermartingale(double b, double t);

/// Azéma supermartingale along a path whose grid stops before 1.
SamplePath azema_path(const SamplePath& B);

/// Last zero before 1 at grid resolution: the latest grid time t_i <= 1 with
/// B_{t_i} = 0 or with a sign change on the step ending at t_i. Returns 0 if
/// the path never returns. Throws HorizonViolation if the grid ends before 1.
StoppingSample last_zero_before_one(const SamplePath& B);

/// Same, but a step whose endpoints share a sign still counts as holding a zero
/// with the Brownian bridge probability exp(-2 a b / step), one uniform per
/// such step, scanning back from 1. The zero is then placed uniformly inside
/// its step. Removes the sqrt(step) bias of sign-change detection.
StoppingSample last_zero_before_one(const SamplePath& B, RandomStream& bridge);

/// F-compensator of L: A^L_{t_k} = sum_{i<k} sqrt(2 / (pi (1 - t_i))) dL0_i.
/// Needs grid horizon <= 1 - step; throws HorizonViolation otherwise.
IncreasingPath honest_compensator_AL(const IncreasingPath& L0);

struct JeulinYorResult {
    IncreasingPath compensator;
    double clipped_mass = 0.0;  // dA^L mass whose divisor hit the floor
    std::size_t clipped_steps = 0;
};

/// F^L-compensator of L: sum over t_i <= t ^ L of dA^L_i / max(Z_{i-1}, floor).
JeulinYorResult jeulin_yor_compensator(const SamplePath& Z, const IncreasingPath& AL, const StoppingSample& L,
                                       double floor = 1e-6);
/// Same with Z supplied lazily by grid index (only read where dA^L > 0).
JeulinYorResult jeulin_yor_compensator(const std::function<double(std::size_t)>& z_at, const IncreasingPath& AL,
                                       const StoppingSample& L, double floor = 1e-6);

/// One path of the Azéma example on the working grid (stopping before 1).
struct HonestTimeBundle {
    SamplePath B;
    IncreasingPath L0;
    StoppingSample L;
    SamplePath Z;
    IncreasingPath AL;

    /// CSV with header t,B,L0,Z,AL; every `stride`-th grid point.
    std::string to_csv(std::size_t stride = 1) const;
};

/// Builds the bundle from a Brownian path on [0, 1] (n_steps points past 0).
HonestTimeBundle make_honest_time_bundle(const SamplePath& B_full, double epsilon);

}  // namespace complab
