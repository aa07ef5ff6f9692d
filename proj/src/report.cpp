#include "complab/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "complab/errors.hpp"

namespace complab {

using nlohmann::json;

void MetricRow::reevaluate() {
    switch (comparison) {
        case Comparison::Within:
            pass = std::abs(value - target) <= tolerance;
            break;
        case Comparison::AtMost:
            pass = value <= target + tolerance;
            break;
        case Comparison::AtLeast:
            pass = value >= target - tolerance;
            break;
    }
}

MetricRow make_metric(std::string name, double value, double target, double tolerance, Comparison comparison,
                      double std_error) {
    MetricRow row{std::move(name), value, target, tolerance, comparison, std_error, false};
    row.reevaluate();
    return row;
}

bool Attachment::report_pass() const {
    return std::visit([](const auto& r) { return r.overall_pass; }, report);
}

Table make_curve(std::string name) {
    return Table{std::move(name), {"t", "observed", "target", "lo", "hi"}, {}};
}

void add_curve_point(Table& curve, double t, double observed, double target, double lo, double hi) {
    curve.rows.push_back({t, observed, target, lo, hi});
}

void ScenarioReport::attach(std::string name, MartingaleReport report, bool expect_pass) {
    if (report.name.empty()) report.name = name;
    attachments.push_back(Attachment{std::move(name), expect_pass, std::move(report)});
}

void ScenarioReport::attach(std::string name, EthierKurtzReport report, bool expect_pass) {
    if (report.name.empty()) report.name = name;
    attachments.push_back(Attachment{std::move(name), expect_pass, std::move(report)});
}

const MetricRow& ScenarioReport::metric(const std::string& name) const {
    for (const auto& m : metrics) {
        if (m.name == name) return m;
    }
    throw std::out_of_range("no metric '" + name + "' in report " + scenario);
}

const Attachment& ScenarioReport::attachment(const std::string& name) const {
    for (const auto& a : attachments) {
        if (a.name == name) return a;
    }
    throw std::out_of_range("no attachment '" + name + "' in report " + scenario);
}

bool ScenarioReport::has_flag(const std::string& flag) const {
    for (const auto& f : flags) {
        if (f == flag) return true;
    }
    return false;
}

void ScenarioReport::reevaluate() {
    overall_pass = true;
    for (auto& m : metrics) {
        m.reevaluate();
        overall_pass = overall_pass && m.pass;
    }
    for (auto& a : attachments) {
        std::visit([](auto& r) { r.reevaluate(); }, a.report);
        overall_pass = overall_pass && a.as_expected();
    }
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

// JSON has no infinities; non-finite numbers travel as strings
json number(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);
}

double read_number(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw ConfigError("report: expected a number, got " + j.dump());
}

const char* comparison_name(Comparison c) {
    switch (c) {
        case Comparison::Within:
            return "within";
        case Comparison::AtMost:
            return "at_most";
        case Comparison::AtLeast:
            return "at_least";
    }
    return "within";
}

Comparison comparison_from(const std::string& s) {
    if (s == "within") return Comparison::Within;
    if (s == "at_most") return Comparison::AtMost;
    if (s == "at_least") return Comparison::AtLeast;
    throw ConfigError("report: unknown comparison '" + s + "'");
}

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw ConfigError(std::string("report: missing field '") + key + "'");
    }
    return j.at(key);
}

json martingale_json(const MartingaleReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"s", row.s},
                        {"t", row.t},
                        {"functional", row.functional},
                        {"estimate", number(row.estimate)},
                        {"std_error", number(row.std_error)},
                        {"z", number(row.z)},
                        {"pass", row.pass}});
    }
    return {{"name", r.name},
            {"view", r.view},
            {"n_paths", r.n_paths},
            {"z_threshold", r.z_threshold},
            {"n_rows", r.rows.size()},
            {"overall_pass", r.overall_pass},
            {"rows", rows}};
}

MartingaleReport martingale_from(const json& j) {
    MartingaleReport r;
    r.name = field(j, "name").get<std::string>();
    r.view = field(j, "view").get<std::string>();
    r.n_paths = field(j, "n_paths").get<std::size_t>();
    r.z_threshold = read_number(field(j, "z_threshold"));
    r.overall_pass = field(j, "overall_pass").get<bool>();
    for (const auto& row : field(j, "rows")) {
        MartingaleRow m;
        m.s = read_number(field(row, "s"));
        m.t = read_number(field(row, "t"));
        m.functional = field(row, "functional").get<std::string>();
        m.estimate = read_number(field(row, "estimate"));
        m.std_error = read_number(field(row, "std_error"));
        m.z = read_number(field(row, "z"));
        m.pass = field(row, "pass").get<bool>();
        r.rows.push_back(std::move(m));
    }
    return r;
}

json ethier_kurtz_json(const EthierKurtzReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"s", row.s},
                        {"t", row.t},
                        {"bin", row.bin},
                        {"bin_lo", number(row.bin_lo)},
                        {"bin_hi", number(row.bin_hi)},
                        {"count", row.count},
                        {"estimate", number(row.estimate)},
                        {"std_error", number(row.std_error)},
                        {"bound", number(row.bound)},
                        {"pass", row.pass}});
    }
    json empty = json::array();
    for (const auto& [s, b] : r.empty_bins) {
        empty.push_back({{"s", s}, {"bin", b}});
    }
    return {{"name", r.name},           {"observable", r.observable}, {"K", r.K},
            {"n_paths", r.n_paths},     {"overall_pass", r.overall_pass}, {"rows", rows},
            {"empty_bins", empty}};
}

EthierKurtzReport ethier_kurtz_from(const json& j) {
    EthierKurtzReport r;
    r.name = field(j, "name").get<std::string>();
    r.observable = field(j, "observable").get<std::string>();
    r.K = read_number(field(j, "K"));
    r.n_paths = field(j, "n_paths").get<std::size_t>();
    r.overall_pass = field(j, "overall_pass").get<bool>();
    for (const auto& row : field(j, "rows")) {
        EthierKurtzRow e;
        e.s = read_number(field(row, "s"));
        e.t = read_number(field(row, "t"));
        e.bin = field(row, "bin").get<std::size_t>();
        e.bin_lo = read_number(field(row, "bin_lo"));
        e.bin_hi = read_number(field(row, "bin_hi"));
        e.count = field(row, "count").get<std::size_t>();
        e.estimate = read_number(field(row, "estimate"));
        e.std_error = read_number(field(row, "std_error"));
        e.bound = read_number(field(row, "bound"));
        e.pass = field(row, "pass").get<bool>();
        r.rows.push_back(e);
    }
    for (const auto& e : field(j, "empty_bins")) {
        r.empty_bins.emplace_back(read_number(field(e, "s")), field(e, "bin").get<std::size_t>());
    }
    return r;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << text;
    out.close();
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

}  // namespace

json to_json(const ScenarioReport& report) {
    json metrics = json::array();
    for (const auto& m : report.metrics) {
        metrics.push_back({{"name", m.name},
                           {"value", number(m.value)},
                           {"target", number(m.target)},
                           {"tolerance", number(m.tolerance)},
                           {"comparison", comparison_name(m.comparison)},
                           {"std_error", number(m.std_error)},
                           {"pass", m.pass}});
    }
    json attachments = json::array();
    for (const auto& a : report.attachments) {
        json entry = {{"name", a.name}, {"expect_pass", a.expect_pass}, {"pass", a.report_pass()}};
        if (const auto* mr = std::get_if<MartingaleReport>(&a.report)) {
            entry["kind"] = "martingale";
            entry["report"] = martingale_json(*mr);
        } else {
            entry["kind"] = "ethier_kurtz";
            entry["report"] = ethier_kurtz_json(std::get<EthierKurtzReport>(a.report));
        }
        attachments.push_back(std::move(entry));
    }
    json tables = json::array();
    for (const auto& t : report.tables) {
        tables.push_back({{"name", t.name}, {"columns", t.columns}, {"n_rows", t.rows.size()}});
    }
    return {{"schema", 1},
            {"scenario", report.scenario},
            {"config", report.config},
            {"overall_pass", report.overall_pass},
            {"metrics", metrics},
            {"attachments", attachments},
            {"tables", tables},
            {"flags", report.flags},
            {"notes", report.notes}};
}

ScenarioReport report_from_json(const json& j) {
    try {
        if (field(j, "schema").get<int>() != 1) {
            throw ConfigError("report: unsupported schema");
        }
        ScenarioReport r;
        r.scenario = field(j, "scenario").get<std::string>();
        r.config = field(j, "config");
        r.overall_pass = field(j, "overall_pass").get<bool>();
        for (const auto& m : field(j, "metrics")) {
            MetricRow row;
            row.name = field(m, "name").get<std::string>();
            row.value = read_number(field(m, "value"));
            row.target = read_number(field(m, "target"));
            row.tolerance = read_number(field(m, "tolerance"));
            row.comparison = comparison_from(field(m, "comparison").get<std::string>());
            row.std_error = read_number(field(m, "std_error"));
            row.pass = field(m, "pass").get<bool>();
            r.metrics.push_back(std::move(row));
        }
        for (const auto& a : field(j, "attachments")) {
            const auto kind = field(a, "kind").get<std::string>();
            const auto name = field(a, "name").get<std::string>();
            const bool expect = field(a, "expect_pass").get<bool>();
            if (kind == "martingale") {
                r.attachments.push_back(Attachment{name, expect, martingale_from(field(a, "report"))});
            } else if (kind == "ethier_kurtz") {
                r.attachments.push_back(Attachment{name, expect, ethier_kurtz_from(field(a, "report"))});
            } else {
                throw ConfigError("report: unknown attachment kind '" + kind + "'");
            }
        }
        for (const auto& t : field(j, "tables")) {
            r.tables.push_back(Table{field(t, "name").get<std::string>(),
                                     field(t, "columns").get<std::vector<std::string>>(), {}});
        }
        r.flags = field(j, "flags").get<std::vector<std::string>>();
        r.notes = field(j, "notes").get<std::vector<std::string>>();
        return r;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("report: ") + e.what());
    }
}

std::string table_csv(const Table& table) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        out += (c ? "," : "") + table.columns[c];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_number(row[c]);
        }
        out += '\n';
    }
    return out;
}

namespace {

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string martingale_csv(const MartingaleReport& report) {
    std::string out = "s,t,functional,estimate,std_error,z,pass\n";
    for (const auto& row : report.rows) {
        out += format_number(row.s) + "," + format_number(row.t) + "," + quoted(row.functional) + "," +
               format_number(row.estimate) + "," + format_number(row.std_error) + "," + format_number(row.z) + "," +
               (row.pass ? "1" : "0") + "\n";
    }
    return out;
}

std::string ethier_kurtz_csv(const EthierKurtzReport& report) {
    std::string out = "s,t,bin,bin_lo,bin_hi,count,estimate,std_error,bound,pass\n";
    for (const auto& row : report.rows) {
        out += format_number(row.s) + "," + format_number(row.t) + "," + std::to_string(row.bin) + "," +
               format_number(row.bin_lo) + "," + format_number(row.bin_hi) + "," + std::to_string(row.count) + "," +
               format_number(row.estimate) + "," + format_number(row.std_error) + "," + format_number(row.bound) +
               "," + (row.pass ? "1" : "0") + "\n";
    }
    return out;
}

std::vector<std::filesystem::path> write_report(const ScenarioReport& report, const std::filesystem::path& outdir) {
    namespace fs = std::filesystem;
    const fs::path dir = outdir / report.scenario;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    }
    std::vector<fs::path> written;
    const fs::path json_path = dir / "report.json";
    write_file(json_path, to_json(report).dump(2) + "\n");
    written.push_back(json_path);
    for (const auto& t : report.tables) {
        const fs::path p = dir / (report.scenario + "_" + t.name + ".csv");
        write_file(p, table_csv(t));
        written.push_back(p);
    }
    for (const auto& a : report.attachments) {
        const fs::path p = dir / (report.scenario + "_" + a.name + ".csv");
        if (const auto* mr = std::get_if<MartingaleReport>(&a.report)) {
            write_file(p, martingale_csv(*mr));
        } else {
            write_file(p, ethier_kurtz_csv(std::get<EthierKurtzReport>(a.report)));
        }
        written.push_back(p);
    }
    return written;
}

ScenarioReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    json j;
    try {
        j = json::parse(buffer.str());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("report: ") + e.what());
    }
    return report_from_json(j);
}

}  // namespace complab
