#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "complab/martingale.hpp"
#include "json.hpp"

namespace complab {

enum class Comparison { Within, AtMost, AtLeast };

/// One checked number. Within: |value - target| <= tolerance;
/// AtMost: value <= target + tolerance; AtLeast: value >= target - tolerance.
struct MetricRow {
    std::string name;
    double value = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    Comparison comparison = Comparison::Within;
    double std_error = 0.0;  // Monte Carlo SE of value, 0 for exact quantities
    bool pass = false;

    void reevaluate();
};

MetricRow make_metric(std::string name, double value, double target, double tolerance, Comparison comparison,
                      double std_error = 0.0);

/// A statistical sub-report and whether it is supposed to pass. Known-bad
/// controls carry expect_pass = false.
struct Attachment {
    std::string name;
    bool expect_pass = true;
    std::variant<MartingaleReport, EthierKurtzReport> report;

    bool report_pass() const;
    bool as_expected() const { return report_pass() == expect_pass; }
};

/// Plot table written as <scenario>_<name>.csv.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Curve table with the standard columns t, observed, target, lo, hi.
Table make_curve(std::string name);
void add_curve_point(Table& curve, double t, double observed, double target, double lo, double hi);

struct ScenarioReport {
    std::string scenario;
    nlohmann::json config;  // echo; excludes anything that must not affect results
    std::vector<MetricRow> metrics;
    std::vector<Attachment> attachments;
    std::vector<Table> tables;
    std::vector<std::string> flags;
    std::vector<std::string> notes;
    bool overall_pass = false;

    void add_metric(MetricRow row) { metrics.push_back(std::move(row)); }
    void attach(std::string name, MartingaleReport report, bool expect_pass);
    void attach(std::string name, EthierKurtzReport report, bool expect_pass);
    const MetricRow& metric(const std::string& name) const;
    const Attachment& attachment(const std::string& name) const;
    bool has_flag(const std::string& flag) const;

    /// Recomputes every pass flag (rows, attached reports, overall) from stored numbers.
    void reevaluate();
};

/// Shortest round-trip decimal text; "inf", "-inf", "nan" for non-finite values.
std::string format_number(double v);

nlohmann::json to_json(const ScenarioReport& report);
/// Throws ConfigError on malformed input.
ScenarioReport report_from_json(const nlohmann::json& j);

std::string table_csv(const Table& table);
std::string martingale_csv(const MartingaleReport& report);
std::string ethier_kurtz_csv(const EthierKurtzReport& report);

/// Writes <outdir>/<scenario>/report.json plus one CSV per table and per
/// attachment. Returns the written paths. Throws std::runtime_error on IO failure.
std::vector<std::filesystem::path> write_report(const ScenarioReport& report, const std::filesystem::path& outdir);

/// Loads a stored report.json. Throws std::runtime_error if unreadable, ConfigError if malformed.
ScenarioReport load_report(const std::filesystem::path& path);

}  // namespace complab
