#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "complab/law.hpp"
#include "complab/time_grid.hpp"

namespace complab {

/// Evaluation stops once 1 - F(u-) drops below this.
inline constexpr double kDegenerateCap = 1e-12;
inline constexpr double kQuadratureRelTol = 1e-9;

/// Dellacherie compensator A_{t ^ r} = int_(0, t ^ r] dF(u) / (1 - F(u-)).
/// Continuous part by adaptive Simpson (split at atoms and density kinks),
/// atoms by the exact jump mass / (1 - F(atom-)).
/// Throws DegenerateLaw if mass must be integrated where 1 - F(u-) < kDegenerateCap.
double dellacherie_compensator(const Law& law, double t,
                               double r = std::numeric_limits<double>::infinity());

/// int_(a, b] dF(u) / (1 - F(u-)), the building block of the above.
double dellacherie_increment(const Law& law, double a, double b);

/// Dellacherie compensator at every grid time (one pass, cell by cell).
IncreasingPath compensator_on_grid(const Law& law, const TimeGrid& grid);

/// -ln(1 - F(t ^ r)) for atom-free laws. Throws std::invalid_argument when the
/// law has atoms and DegenerateLaw past the cap.
double log_survival_compensator(const Law& law, double t,
                                double r = std::numeric_limits<double>::infinity());

/// Hazard f(t) / (1 - F(t)) for an atom-free law with the given density.
double hazard_rate(const std::function<double(double)>& density, const Law& law, double t);
/// Same, using the law's own density.
double hazard_rate(const Law& law, double t);

struct EmpiricalLawOptions {
    double atom_fraction = 0.001;      // atom if count >= max(atom_min_count, fraction * n)
    std::size_t atom_min_count = 5;
    std::size_t min_uncensored = 100;
};

/// Law estimated from stopping samples. The continuous part interpolates the
/// empirical CDF linearly between distinct non-atom sample values; censored
/// samples count in the denominator only. A Silverman-bandwidth kernel density
/// is attached for diagnostics and plays no role in the compensator.
struct EmpiricalLaw {
    Law law;
    std::size_t n_total = 0;
    std::size_t n_uncensored = 0;
    double bandwidth = 0.0;
    std::vector<double> uncensored;  // sorted

    /// Gaussian-kernel density of the uncensored samples scaled by n_uncensored / n_total.
    double kernel_density(double x) const;
    /// Empirical F(u) with right-continuous convention (samples <= u).
    double ecdf(double u) const;
    /// Empirical F(u-) with strict inequality (samples < u).
    double ecdf_left(double u) const;
};

/// Throws InsufficientData below options.min_uncensored uncensored samples.
EmpiricalLaw empirical_law(std::span<const StoppingSample> samples, const EmpiricalLawOptions& options = {});

/// Silverman's rule: 0.9 * min(sd, IQR / 1.34) * n^(-1/5).
double silverman_bandwidth(std::span<const double> sorted_samples);

/// Sup distance between the empirical CDF of `samples` and a continuous CDF.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

struct SingularityReport {
    double mass_on_set = 0.0;      // fraction of dA carried by the indicator set
    double lebesgue_of_set = 0.0;  // step * number of indicator steps
    double epsilon_used = 0.0;
    double total_mass = 0.0;
    double horizon = 0.0;

    double lebesgue_fraction() const { return horizon > 0.0 ? lebesgue_of_set / horizon : 0.0; }
};

/// Where does dA live? Increment i (t_i -> t_{i+1}) is attributed to grid
/// index i; the indicator has one entry per grid point (the last is unused).
/// Throws ZeroMass for constant A.
SingularityReport mass_decomposition(const IncreasingPath& A, const std::vector<bool>& support_indicator,
                                     double epsilon);

/// Pools per-path reports: masses add up, Lebesgue fractions average.
class SingularityTally {
public:
    void add(const SingularityReport& report);
    SingularityReport pooled() const;
    std::size_t count() const { return count_; }

private:
    double mass_on_ = 0.0;
    double mass_total_ = 0.0;
    double lebesgue_sum_ = 0.0;
    double horizon_ = 0.0;
    double epsilon_ = 0.0;
    std::size_t count_ = 0;
};

}  // namespace complab
