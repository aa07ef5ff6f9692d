#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "complab/binning.hpp"
#include "complab/observation.hpp"
#include "complab/time_grid.hpp"

namespace complab {

using TimePair = std::pair<double, double>;

/// All (s, t) with s in `starts`, t in `ends` and s < t.
std::vector<TimePair> pair_grid(const std::vector<double>& starts, const std::vector<double>& ends);

/// Sorted distinct times appearing in the pairs.
std::vector<double> pair_times(const std::vector<TimePair>& pairs);

/// M_t = 1{t >= R} - A_t on the grid of A. A is used as given: pass a
/// compensator already stopped at R (see stop_at). Censored R never jumps.
SamplePath compensated_indicator(const StoppingSample& R, const IncreasingPath& A);

/// A_{t ^ R}; the value at R is interpolated linearly inside its step.
IncreasingPath stop_at(const IncreasingPath& A, const StoppingSample& R);
/// A_{t ^ R} with the exact value at R supplied by the caller.
IncreasingPath stop_at(const IncreasingPath& A, const StoppingSample& R, double value_at_R);

/// Running sum of squared grid increments.
IncreasingPath quadratic_variation_discrete(const SamplePath& M);

struct MartingaleRow {
    double s = 0.0;
    double t = 0.0;
    std::string functional;
    double estimate = 0.0;
    double std_error = 0.0;
    double z = 0.0;  // +-infinity when the estimate is nonzero with zero spread
    bool pass = true;
};

/// z-scores of E[H_s (M_t - M_s)] over paths.
struct MartingaleReport {
    std::string name;
    std::string view;
    std::vector<MartingaleRow> rows;
    std::size_t n_paths = 0;
    double z_threshold = 4.0;
    bool overall_pass = true;

    /// Recomputes z, per-row pass and overall_pass from estimate and std_error.
    void reevaluate();
    /// Largest |z| among rows of the given functional (0 if none).
    double max_abs_z(const std::string& functional) const;
};

/// z from an estimate and its standard error (0/0 counts as 0).
double z_score(double estimate, double std_error);

struct OrthogonalityOptions {
    double z_threshold = 4.0;
    std::size_t min_paths = 1000;
    unsigned threads = 1;
    std::string name;
};

/// For each pair (s, t) and functional H: mean over paths of H_s (M_t - M_s),
/// its standard error (sample sd / sqrt n) and z. Products are computed per
/// path first and summed in path order, so results ignore `threads`.
/// Throws InsufficientPaths below options.min_paths.
MartingaleReport test_orthogonality(const PathBundle& M, const Observations& obs, const FiltrationView& view,
                                    const std::vector<TestFunctional>& functionals,
                                    const std::vector<TimePair>& pairs, const OrthogonalityOptions& options = {});

struct EthierKurtzRow {
    double s = 0.0;
    double t = 0.0;
    std::size_t bin = 0;
    double bin_lo = 0.0;
    double bin_hi = 0.0;
    std::size_t count = 0;
    double estimate = 0.0;  // bin mean of A_t - A_s
    double std_error = 0.0;
    double bound = 0.0;     // K (t - s)
    bool pass = true;       // estimate <= bound + 3 se
};

struct EthierKurtzReport {
    std::string name;
    std::string observable;
    double K = 0.0;
    std::vector<EthierKurtzRow> rows;
    /// (s, bin) combinations with no paths; listed, not fatal.
    std::vector<std::pair<double, std::size_t>> empty_bins;
    std::size_t n_paths = 0;
    bool overall_pass = true;

    void reevaluate();
};

/// How check_ethier_kurtz partitions the observable at s.
struct BinSpec {
    std::optional<Binning> fixed;   // explicit edges, used for every s
    std::size_t quantile_bins = 5;  // otherwise equal-probability bins per s
};

/// Binned conditional means of A_t - A_s given the observable at s,
/// against the linear bound K (t - s).
EthierKurtzReport check_ethier_kurtz(const PathBundle& A, const Observations& obs, const FiltrationView& view,
                                     const std::string& observable, const BinSpec& bins, double K,
                                     const std::vector<TimePair>& pairs, const std::string& name = {});

}  // namespace complab
