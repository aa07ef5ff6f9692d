#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace complab {

/// Partition of the real line by lower edges e_0 < e_1 < ... < e_{m-1}:
/// bin j = [e_j, e_{j+1}), the last bin is unbounded above and values below
/// e_0 fall into bin 0.
class Binning {
public:
    explicit Binning(std::vector<double> lower_edges);

    /// Equal-probability bins from sample quantiles. Runs of tied values are
    /// never split; a run holding a quarter of a bin's share or more gets a
    /// bin of its own, so there can be a few more than n_bins bins.
    static Binning equal_probability(std::span<const double> values, std::size_t n_bins);

    std::size_t bin_of(double x) const;
    std::size_t size() const { return edges_.size(); }
    const std::vector<double>& lower_edges() const { return edges_; }

    double lower(std::size_t j) const { return edges_[j]; }
    /// Upper edge of bin j (+infinity for the last bin).
    double upper(std::size_t j) const;

private:
    std::vector<double> edges_;
};

}  // namespace complab
