#include "complab/law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

#include "complab/errors.hpp"

namespace complab {

namespace {

double erlang_cdf(int shape, double rate, double u) {
    if (u <= 0.0) {
        return 0.0;
    }
    // 1 - e^{-x} sum_{k<shape} x^k / k!
    const double x = rate * u;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < shape; ++k) {
        term *= x / k;
        sum += term;
    }
    return 1.0 - std::exp(-x) * sum;
}

double erlang_density(int shape, double rate, double u) {
    if (u < 0.0) {
        return 0.0;
    }
    const double x = rate * u;
    double coef = rate;
    for (int k = 1; k < shape; ++k) {
        coef *= x / k;
    }
    return coef * std::exp(-x);
}

double part_cdf(const ContinuousPart& part, double u) {
    if (u <= 0.0) {
        return 0.0;
    }
    return std::visit(
        [u](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ExponentialPart>) {
                return p.weight * -std::expm1(-p.rate * u);
            } else if constexpr (std::is_same_v<T, UniformPart>) {
                if (u <= p.lower) return 0.0;
                if (u >= p.upper) return p.weight;
                return p.weight * (u - p.lower) / (p.upper - p.lower);
            } else if constexpr (std::is_same_v<T, GammaPart>) {
                return p.weight * erlang_cdf(p.shape, p.rate, u);
            } else {
                const auto& k = p.knots;
                if (u >= k.back().first) return k.back().second;
                auto it = std::upper_bound(k.begin(), k.end(), u,
                                           [](double x, const auto& knot) { return x < knot.first; });
                const auto& hi = *it;
                const auto& lo = *(it - 1);
                const double w = (u - lo.first) / (hi.first - lo.first);
                return lo.second + w * (hi.second - lo.second);
            }
        },
        part);
}

double part_density(const ContinuousPart& part, double u) {
    if (u < 0.0) {
        return 0.0;
    }
    return std::visit(
        [u](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ExponentialPart>) {
                return p.weight * p.rate * std::exp(-p.rate * u);
            } else if constexpr (std::is_same_v<T, UniformPart>) {
                if (u < p.lower || u >= p.upper) return 0.0;
                return p.weight / (p.upper - p.lower);
            } else if constexpr (std::is_same_v<T, GammaPart>) {
                return p.weight * erlang_density(p.shape, p.rate, u);
            } else {
                const auto& k = p.knots;
                if (u >= k.back().first) return 0.0;
                auto it = std::upper_bound(k.begin(), k.end(), u,
                                           [](double x, const auto& knot) { return x < knot.first; });
                const auto& hi = *it;
                const auto& lo = *(it - 1);
                return (hi.second - lo.second) / (hi.first - lo.first);
            }
        },
        part);
}

double part_mass(const ContinuousPart& part) {
    return std::visit(
        [](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, TablePart>) {
                return p.knots.back().second;
            } else {
                return p.weight;
            }
        },
        part);
}

void validate_part(const ContinuousPart& part) {
    std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ExponentialPart>) {
                if (!(p.rate > 0.0)) throw std::invalid_argument("Law: exponential rate must be positive");
            } else if constexpr (std::is_same_v<T, UniformPart>) {
                if (!(p.lower >= 0.0) || !(p.upper > p.lower)) {
                    throw std::invalid_argument("Law: uniform needs 0 <= lower < upper");
                }
            } else if constexpr (std::is_same_v<T, GammaPart>) {
                if (p.shape < 1 || !(p.rate > 0.0)) {
                    throw std::invalid_argument("Law: gamma needs integer shape >= 1 and positive rate");
                }
            } else {
                const auto& k = p.knots;
                if (k.size() < 2 || k.front().first != 0.0 || k.front().second != 0.0) {
                    throw std::invalid_argument("Law: table must start at (0, 0) and have another knot");
                }
                for (std::size_t i = 1; i < k.size(); ++i) {
                    if (!(k[i].first > k[i - 1].first) || !(k[i].second >= k[i - 1].second)) {
                        throw std::invalid_argument("Law: table knots must be increasing in u and nondecreasing in F");
                    }
                }
                if (!(k.back().second <= 1.0)) {
                    throw std::invalid_argument("Law: table F must stay within [0, 1]");
                }
            }
            if constexpr (!std::is_same_v<T, TablePart>) {
                if (!(p.weight > 0.0) || p.weight > 1.0) {
                    throw std::invalid_argument("Law: continuous weight must lie in (0, 1]");
                }
            }
        },
        part);
}

double default_weight(const std::vector<Atom>& atoms) {
    double mass = 0.0;
    for (const auto& a : atoms) mass += a.mass;
    return 1.0 - mass;
}

}  // namespace

Law::Law(std::optional<ContinuousPart> continuous, std::vector<Atom> atoms)
    : continuous_(std::move(continuous)), atoms_(std::move(atoms)) {
    double mass = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (!(atoms_[i].time > 0.0) || !std::isfinite(atoms_[i].time)) {
            throw std::invalid_argument("Law: atom times must be positive and finite");
        }
        if (!(atoms_[i].mass > 0.0)) {
            throw std::invalid_argument("Law: atom masses must be positive");
        }
        if (i > 0 && !(atoms_[i].time > atoms_[i - 1].time)) {
            throw std::invalid_argument("Law: atom times must be strictly increasing");
        }
        mass += atoms_[i].mass;
    }
    if (continuous_) {
        validate_part(*continuous_);
        mass += part_mass(*continuous_);
    }
    if (mass > 1.0 + 1e-12) {
        throw std::invalid_argument("Law: total mass exceeds 1");
    }
}

Law Law::exponential(double rate) { return Law(ExponentialPart{rate, 1.0}, {}); }
Law Law::uniform(double lower, double upper) { return Law(UniformPart{lower, upper, 1.0}, {}); }
Law Law::gamma(int shape, double rate) { return Law(GammaPart{shape, rate, 1.0}, {}); }
Law Law::atomic(std::vector<Atom> atoms) { return Law(std::nullopt, std::move(atoms)); }

Law Law::table(std::vector<std::pair<double, double>> knots) {
    if (knots.empty() || knots.front().first != 0.0) {
        knots.insert(knots.begin(), {0.0, 0.0});
    }
    return Law(TablePart{std::move(knots)}, {});
}

double Law::continuous_cdf(double u) const {
    return continuous_ ? part_cdf(*continuous_, u) : 0.0;
}

double Law::cdf(double u) const {
    double f = continuous_cdf(u);
    for (const auto& a : atoms_) {
        if (a.time > u) break;
        f += a.mass;
    }
    return f;
}

double Law::atom_mass_at(double u) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), u,
                               [](const Atom& a, double x) { return a.time < x; });
    return (it != atoms_.end() && it->time == u) ? it->mass : 0.0;
}

double Law::cdf_left(double u) const {
    double f = continuous_cdf(u);
    for (const auto& a : atoms_) {
        if (a.time >= u) break;
        f += a.mass;
    }
    return f;
}

double Law::density(double u) const {
    return continuous_ ? part_density(*continuous_, u) : 0.0;
}

double Law::total_mass() const {
    double mass = continuous_ ? part_mass(*continuous_) : 0.0;
    for (const auto& a : atoms_) mass += a.mass;
    return mass;
}

double Law::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("Law::quantile: p must lie in (0, 1)");
    }
    if (!has_atoms() && continuous_) {
        if (const auto* e = std::get_if<ExponentialPart>(&*continuous_); e && e->weight == 1.0) {
            return -std::log1p(-p) / e->rate;
        }
    }
    if (total_mass() < p) {
        return std::numeric_limits<double>::infinity();
    }
    double hi = 1.0;
    while (cdf(hi) < p) {
        hi *= 2.0;
        if (hi > 1e12) {
            return std::numeric_limits<double>::infinity();
        }
    }
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) >= p) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // snap onto an atom inside the final bracket so atoms are hit exactly
    for (const auto& a : atoms_) {
        if (a.time > lo && a.time <= hi && cdf(a.time) >= p) {
            return a.time;
        }
    }
    return hi;
}

std::vector<double> Law::breakpoints(double a, double b) const {
    std::set<double> points;
    if (continuous_) {
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, UniformPart>) {
                    points.insert(p.lower);
                    points.insert(p.upper);
                } else if constexpr (std::is_same_v<T, TablePart>) {
                    auto lo = std::upper_bound(p.knots.begin(), p.knots.end(), a,
                                               [](double x, const auto& k) { return x < k.first; });
                    for (auto it = lo; it != p.knots.end() && it->first < b; ++it) {
                        points.insert(it->first);
                    }
                }
            },
            *continuous_);
    }
    std::vector<double> out;
    for (double x : points) {
        if (x > a && x < b) out.push_back(x);
    }
    return out;
}

nlohmann::json Law::to_json() const {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : atoms_) {
        atoms.push_back({a.time, a.mass});
    }
    nlohmann::json cont = nullptr;
    if (continuous_) {
        cont = std::visit(
            [](const auto& p) -> nlohmann::json {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, ExponentialPart>) {
                    return {{"kind", "exponential"}, {"rate", p.rate}, {"weight", p.weight}};
                } else if constexpr (std::is_same_v<T, UniformPart>) {
                    return {{"kind", "uniform"}, {"lower", p.lower}, {"upper", p.upper}, {"weight", p.weight}};
                } else if constexpr (std::is_same_v<T, GammaPart>) {
                    return {{"kind", "gamma"}, {"shape", p.shape}, {"rate", p.rate}, {"weight", p.weight}};
                } else {
                    nlohmann::json pts = nlohmann::json::array();
                    for (const auto& k : p.knots) pts.push_back({k.first, k.second});
                    return {{"kind", "table"}, {"points", pts}};
                }
            },
            *continuous_);
    }
    return {{"atoms", atoms}, {"continuous", cont}};
}

namespace {

void require_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed, const char* what) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* key : allowed) {
            if (item.key() == key) ok = true;
        }
        if (!ok) {
            throw ConfigError(std::string("law: unknown key '") + item.key() + "' in " + what);
        }
    }
}

double number_at(const nlohmann::json& obj, const char* key) {
    if (!obj.contains(key) || !obj.at(key).is_number()) {
        throw ConfigError(std::string("law: missing numeric field '") + key + "'");
    }
    return obj.at(key).get<double>();
}

}  // namespace

Law Law::from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError("law: expected a JSON object");
    }
    require_keys(j, {"atoms", "continuous"}, "law");
    std::vector<Atom> atoms;
    if (j.contains("atoms") && !j.at("atoms").is_null()) {
        for (const auto& a : j.at("atoms")) {
            if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number()) {
                throw ConfigError("law: atoms must be [time, mass] pairs");
            }
            atoms.push_back({a[0].get<double>(), a[1].get<double>()});
        }
    }
    std::optional<ContinuousPart> cont;
    if (j.contains("continuous") && !j.at("continuous").is_null()) {
        const auto& c = j.at("continuous");
        if (!c.is_object() || !c.contains("kind") || !c.at("kind").is_string()) {
            throw ConfigError("law: continuous part needs a string 'kind'");
        }
        const std::string kind = c.at("kind").get<std::string>();
        const double w = c.contains("weight") ? number_at(c, "weight") : default_weight(atoms);
        if (kind == "exponential") {
            require_keys(c, {"kind", "rate", "weight"}, "exponential");
            cont = ExponentialPart{number_at(c, "rate"), w};
        } else if (kind == "uniform") {
            require_keys(c, {"kind", "lower", "upper", "weight"}, "uniform");
            cont = UniformPart{c.contains("lower") ? number_at(c, "lower") : 0.0, number_at(c, "upper"), w};
        } else if (kind == "gamma") {
            require_keys(c, {"kind", "shape", "rate", "weight"}, "gamma");
            const double shape = number_at(c, "shape");
            if (shape != std::floor(shape)) {
                throw ConfigError("law: gamma shape must be an integer");
            }
            cont = GammaPart{static_cast<int>(shape), number_at(c, "rate"), w};
        } else if (kind == "table") {
            require_keys(c, {"kind", "points"}, "table");
            std::vector<std::pair<double, double>> knots;
            if (!c.contains("points") || !c.at("points").is_array()) {
                throw ConfigError("law: table needs 'points'");
            }
            for (const auto& p : c.at("points")) {
                if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
                    throw ConfigError("law: table points must be [u, F] pairs");
                }
                knots.emplace_back(p[0].get<double>(), p[1].get<double>());
            }
            if (knots.empty() || knots.front().first != 0.0) {
                knots.insert(knots.begin(), {0.0, 0.0});
            }
            cont = TablePart{std::move(knots)};
        } else {
            throw ConfigError("law: unknown continuous kind '" + kind + "'");
        }
    }
    try {
        return Law(std::move(cont), std::move(atoms));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("law: ") + e.what());
    }
}

}  // namespace complab
