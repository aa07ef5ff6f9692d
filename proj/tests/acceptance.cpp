// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only if all pass.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "complab/compensator.hpp"
#include "complab/errors.hpp"
#include "complab/law.hpp"
#include "complab/report.hpp"
#include "complab/scenarios.hpp"

using namespace complab;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "FAILED ") + what;
        pass = pass && ok;
    }
};

std::string num(double v) { return format_number(v); }

const MartingaleReport& martingale(const ScenarioReport& r, const std::string& name) {
    return std::get<MartingaleReport>(r.attachment(name).report);
}

void check_metric(Verdict& v, const ScenarioReport& r, const std::string& name) {
    const MetricRow& m = r.metric(name);
    v.check(m.pass, name + "=" + num(m.value));
}

void check_attachment(Verdict& v, const ScenarioReport& r, const std::string& name) {
    const Attachment& a = r.attachment(name);
    v.check(a.as_expected(), name + (a.report_pass() ? " passes" : " fails"));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Timed {
    ScenarioReport report;
    double seconds = 0.0;
};

Timed run_default(const std::string& id, const fs::path& outdir) {
    const auto start = std::chrono::steady_clock::now();
    Timed t{run_scenario(default_config(id)), 0.0};
    t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_report(t.report, outdir);
    return t;
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path outdir = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
    fs::remove_all(outdir);
    std::vector<std::pair<std::string, Verdict>> results;
    auto record = [&](const std::string& title, const std::function<Verdict()>& body) {
        Verdict v;
        try {
            v = body();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        std::cout << (v.pass ? "PASS" : "FAIL") << " " << title << " :: " << v.detail << std::endl;
        results.emplace_back(title, v);
    };

    std::map<std::string, Timed> runs;
    auto get = [&](const std::string& id) -> const Timed& {
        auto it = runs.find(id);
        if (it == runs.end()) it = runs.emplace(id, run_default(id, outdir / "full")).first;
        return it->second;
    };

    record("1 local-time mean", [&] {
        Verdict v;
        const Timed& t = get("counterexample");
        const MetricRow& m = t.report.metric("mean_local_time_terminal");
        const double target = std::sqrt(2.0 / std::numbers::pi);
        v.check(std::abs(m.value - target) <= 0.02 * target, "mean L_1=" + num(m.value) + " vs " + num(target));
        v.check(t.report.config.at("paths") == 20000 && t.report.config.at("steps") == 16384, "paths 2e4, steps 2^14");
        v.check(t.seconds <= 120.0, "runtime " + num(std::round(t.seconds * 10.0) / 10.0) + "s single-threaded");
        return v;
    });

    record("2 dellacherie atomic exactness", [&] {
        Verdict v;
        const Law law = Law::atomic({{1.0, 0.5}, {2.0, 0.3}, {3.0, 0.2}});
        const double oracle[3] = {0.5 / 1.0, 0.3 / 0.5, 0.2 / 0.2};
        double worst = 0.0;
        for (int k = 0; k < 3; ++k) {
            worst = std::max(worst, std::abs(dellacherie_increment(law, k, k + 1.0) - oracle[k]));
        }
        v.check(worst <= 1e-12, "atom increments max error " + num(worst));
        double gap = 0.0;
        for (const Law& c : {Law::exponential(1.0), Law::exponential(2.0), Law::uniform(0.0, 2.0), Law::uniform(0.0, 1.0)}) {
            for (double t = 0.01; t < 3.0; t += 0.01) {
                try {
                    gap = std::max(gap, std::abs(dellacherie_compensator(c, t) - log_survival_compensator(c, t)));
                } catch (const DegenerateLaw&) {
                    break;
                }
            }
        }
        v.check(gap <= 1e-6, "integral vs -ln(1-F) max gap " + num(gap));
        return v;
    });

    record("3 martingale suite (dellacherie exponential)", [&] {
        Verdict v;
        const ScenarioReport& r = get("dellacherie").report;
        const MartingaleReport& m = martingale(r, "minimal_view");
        std::map<std::string, int> functionals;
        std::map<std::pair<double, double>, int> pairs;
        double worst = 0.0;
        for (const auto& row : m.rows) {
            functionals[row.functional]++;
            pairs[{row.s, row.t}]++;
            worst = std::max(worst, std::abs(row.z));
        }
        v.check(m.n_paths >= 100000, "paths " + std::to_string(m.n_paths));
        v.check(pairs.size() >= 9 && functionals.size() >= 8,
                std::to_string(pairs.size()) + " pairs x " + std::to_string(functionals.size()) + " functionals");
        v.check(m.overall_pass && worst <= 4.0, "max |z| " + num(worst));
        const double bad = martingale(r, "control_zero_compensator").max_abs_z("one");
        v.check(bad > 10.0, "A=0 control constant-one |z| " + num(bad));
        return v;
    });

    record("4 girsanov transfer (poisson tilt)", [&] {
        Verdict v;
        const ScenarioReport& r = get("poisson-tilt").report;
        const MetricRow& s = r.metric("tilted_slope");
        v.check(std::abs(s.value - 2.0) <= 0.04, "direct Q slope " + num(s.value) + " vs 2");
        check_metric(v, r, "tilted_slope");
        check_metric(v, r, "girsanov_slope_vs_mu");
        check_attachment(v, r, "q_paths_girsanov");
        v.check(r.metric("untilted_max_gap").value == 0.0, "lambda=mu gap exactly 0");
        return v;
    });

    record("5 shrinkage by optional projection", [&] {
        Verdict v;
        const ScenarioReport& r = get("shrinkage").report;
        v.check(r.attachment("coarse_view_projected").report_pass(), "coarse view + projected intensity passes");
        v.check(!r.attachment("control_coarse_view_unprojected").report_pass(),
                "coarse view + unprojected intensity fails");
        v.check(r.overall_pass, "all shrinkage metrics and controls as expected");
        return v;
    });

    record("6 counterexample law", [&] {
        Verdict v;
        const ScenarioReport& r = get("counterexample").report;
        check_metric(v, r, "law_sup_distance");
        check_metric(v, r, "empirical_law_atoms");
        check_attachment(v, r, "minimal_view_recovered");
        return v;
    });

    record("7 singularity diagnostics", [&] {
        Verdict v;
        const ScenarioReport& c = get("counterexample").report;
        check_metric(v, c, "singularity_mass_on_set");
        check_metric(v, c, "singularity_lebesgue_ratio_fine_over_coarse");
        const ScenarioReport& a = get("azema").report;
        check_metric(v, a, "AL_mass_on_set");
        check_metric(v, a, "AL_lebesgue_ratio_fine_over_coarse");
        return v;
    });

    record("8 azema formula, arcsine law, jeulin-yor", [&] {
        Verdict v;
        const ScenarioReport& r = get("azema").report;
        check_metric(v, r, "azema_formula_sup_error");
        check_metric(v, r, "last_zero_ks");
        check_attachment(v, r, "expanded_view_jeulin_yor");
        check_attachment(v, r, "control_expanded_view_zero");
        return v;
    });

    record("9 ethier-kurtz checker", [&] {
        Verdict v;
        const ScenarioReport& d = get("dellacherie").report;
        v.check(d.attachment("poisson_ek_K_rate").report_pass(), "Poisson(1) K=1 passes");
        v.check(!d.attachment("poisson_ek_K_bad").report_pass(), "Poisson(1) K=0.4 fails");
        const ScenarioReport& c = get("counterexample").report;
        for (const char* k : {"local_time_ek_K1", "local_time_ek_K2", "local_time_ek_K4"}) {
            v.check(!c.attachment(k).report_pass(), std::string(k) + " fails");
        }
        check_metric(v, c, "local_time_increment_near_zero");
        return v;
    });

    record("10 determinism across threads", [&] {
        Verdict v;
        std::size_t files = 0;
        for (const auto& info : scenario_catalog()) {
            ScenarioConfig c = info.defaults;
            c.n_paths = 2000;
            if (info.id == "counterexample") c.n_steps = 4096;
            if (info.id == "azema") c.n_steps = 2048;
            std::vector<std::vector<fs::path>> written;
            for (unsigned threads : {1u, 8u}) {
                c.threads = threads;
                written.push_back(write_report(run_scenario(c), outdir / ("threads" + std::to_string(threads))));
            }
            bool same = written[0].size() == written[1].size();
            for (std::size_t i = 0; same && i < written[0].size(); ++i) {
                same = written[0][i].filename() == written[1][i].filename() &&
                       slurp(written[0][i]) == slurp(written[1][i]);
            }
            files += written[0].size();
            v.check(same, info.id);
        }
        v.check(files > 0, std::to_string(files) + " files byte-compared");
        return v;
    });

    int failed = 0;
    for (const auto& [title, v] : results) failed += v.pass ? 0 : 1;
    std::cout << (failed == 0 ? "ALL CRITERIA PASS" : std::to_string(failed) + " CRITERIA FAILED") << std::endl;
    return failed == 0 ? 0 : 1;
}
