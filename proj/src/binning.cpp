#include "complab/binning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace complab {

Binning::Binning(std::vector<double> lower_edges) : edges_(std::move(lower_edges)) {
    if (edges_.empty()) {
        throw std::invalid_argument("Binning: need at least one edge");
    }
    for (std::size_t i = 1; i < edges_.size(); ++i) {
        if (!(edges_[i] > edges_[i - 1])) {
            throw std::invalid_argument("Binning: edges must be strictly increasing");
        }
    }
}

Binning Binning::equal_probability(std::span<const double> values, std::size_t n_bins) {
    if (values.empty() || n_bins == 0) {
        throw std::invalid_argument("Binning::equal_probability: need values and at least one bin");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    std::vector<double> edges{sorted.front()};
    for (std::size_t k = 1; k < n_bins; ++k) {
        const std::size_t cut = (k * n) / n_bins;
        if (cut == 0 || cut >= n) continue;
        // an edge at the tied value keeps the whole run in one bin
        edges.push_back(sorted[cut]);
    }
    // heavy ties (a quarter of a bin's share or more) are fenced off on both sides
    const std::size_t heavy = std::max<std::size_t>(2, n / (4 * n_bins));
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && sorted[j] == sorted[i]) ++j;
        if (j - i >= heavy) {
            edges.push_back(sorted[i]);
            if (j < n) edges.push_back(sorted[j]);
        }
        i = j;
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return Binning(std::move(edges));
}

std::size_t Binning::bin_of(double x) const {
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    if (it == edges_.begin()) {
        return 0;
    }
    return static_cast<std::size_t>(it - edges_.begin()) - 1;
}

double Binning::upper(std::size_t j) const {
    return j + 1 < edges_.size() ? edges_[j + 1] : std::numeric_limits<double>::infinity();
}

}  // namespace complab
