#pragma once

#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

namespace complab {

struct Atom {
    double time;
    double mass;
};

/// weight * (1 - exp(-rate u)).
struct ExponentialPart {
    double rate;
    double weight;
};

/// weight * uniform CDF on [lower, upper].
struct UniformPart {
    double lower;
    double upper;
    double weight;
};

/// weight * Gamma(shape, rate) CDF with integer shape (Erlang).
struct GammaPart {
    int shape;
    double rate;
    double weight;
};

/// Piecewise-linear sub-distribution through sorted (u, F(u)) knots,
/// starting at (0, 0) and constant after the last knot.
struct TablePart {
    std::vector<std::pair<double, double>> knots;
};

using ContinuousPart = std::variant<ExponentialPart, UniformPart, GammaPart, TablePart>;

/// Law of a positive random time: an absolutely continuous part plus finitely
/// many atoms. F(u) = continuous_cdf(u) + sum of atom masses at times <= u.
/// Total mass may be below 1 (the remainder sits at +infinity).
class Law {
public:
    Law(std::optional<ContinuousPart> continuous, std::vector<Atom> atoms);

    static Law exponential(double rate);
    static Law uniform(double lower, double upper);
    static Law gamma(int shape, double rate);
    static Law atomic(std::vector<Atom> atoms);
    static Law table(std::vector<std::pair<double, double>> knots);

    double cdf(double u) const;
    /// F(u-) = F(u) minus the atom mass sitting exactly at u.
    double cdf_left(double u) const;
    double continuous_cdf(double u) const;
    /// Derivative of the continuous part (right derivative at table knots).
    double density(double u) const;
    double atom_mass_at(double u) const;

    /// Smallest x with F(x) >= p, or +infinity when F never reaches p.
    double quantile(double p) const;

    /// Points in (a, b) where the continuous density is not smooth.
    std::vector<double> breakpoints(double a, double b) const;

    double total_mass() const;
    bool has_atoms() const { return !atoms_.empty(); }
    bool has_continuous() const { return continuous_.has_value(); }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::optional<ContinuousPart>& continuous() const { return continuous_; }

    /// {"atoms": [[t, m], ...], "continuous": null | {"kind": ..., ...}}
    nlohmann::json to_json() const;
    /// Throws ConfigError on malformed input or unknown keys.
    static Law from_json(const nlohmann::json& j);

private:
    std::optional<ContinuousPart> continuous_;
    std::vector<Atom> atoms_;
};

}  // namespace complab
