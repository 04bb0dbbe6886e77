// Command-line front end: single-point solves, figure/table grids, Monte
// Carlo verification, and CSV/JSON emission.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "adjalpha/alpha.hpp"
#include "adjalpha/errors.hpp"
#include "adjalpha/mc.hpp"
#include "adjalpha/normal.hpp"
#include "adjalpha/trial.hpp"

namespace {

using adjalpha::DesignParams;
using adjalpha::StrategyKind;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitBadParams = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitVerifyFailed = 4;

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

// Rows keep insertion order so CSV headers and JSON fields line up.
void emit(const std::vector<ordered_json>& rows, const std::string& format,
          const std::string& out_path) {
    std::ostringstream os;
    if (format == "json") {
        ordered_json arr = ordered_json::array();
        for (const auto& r : rows) arr.push_back(r);
        os << arr.dump(2) << "\n";
    } else {
        if (!rows.empty()) {
            bool first = true;
            for (auto it = rows.front().begin(); it != rows.front().end(); ++it) {
                if (!first) os << ",";
                os << it.key();
                first = false;
            }
            os << "\n";
            for (const auto& r : rows) {
                first = true;
                for (auto it = r.begin(); it != r.end(); ++it) {
                    if (!first) os << ",";
                    if (it->is_string())
                        os << it->get<std::string>();
                    else
                        os << fmt6(it->get<double>());
                    first = false;
                }
                os << "\n";
            }
        }
    }
    if (out_path.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw adjalpha::OutOfRange("cannot open output file: " + out_path);
        f << os.str();
    }
}

// "a:b:s" inclusive range, or a comma-separated list, or a single number.
std::vector<double> parse_grid(const std::string& s) {
    std::vector<double> out;
    if (s.find(':') != std::string::npos) {
        double a, b, st;
        char c1, c2;
        std::istringstream is(s);
        if (!(is >> a >> c1 >> b >> c2 >> st) || c1 != ':' || c2 != ':')
            throw adjalpha::OutOfRange("bad grid spec (want a:b:s): " + s);
        if (!(st > 0.0) || b < a) throw adjalpha::OutOfRange("bad grid spec (need s > 0, b >= a): " + s);
        for (double v = a; v <= b + 1e-9 * st; v += st) out.push_back(v);
    } else {
        std::istringstream is(s);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            if (tok.empty()) continue;
            out.push_back(std::stod(tok));
        }
    }
    if (out.empty()) throw adjalpha::OutOfRange("empty grid spec: " + s);
    return out;
}

// Runs f(0..n-1) on a small worker pool; callers index a pre-sized result
// buffer, so output order never depends on scheduling.
template <typename F>
void parallel_for(std::size_t n, F&& f) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned nt = static_cast<unsigned>(std::min<std::size_t>(hw, n));
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < nt; ++k)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct DesignFlags {
    double alpha = 0.025;
    std::string strategy = "neutral";
    std::optional<double> c;
    std::optional<double> c_hr;
    double t = 0.3;
    std::optional<double> events;
    std::optional<double> info;
    double w = 0.5;

    double resolve_c() const {
        if (c && c_hr) throw adjalpha::OutOfRange("--c and --c-hr are mutually exclusive");
        if (c_hr) {
            if (!(*c_hr > 0.0)) throw adjalpha::OutOfRange("--c-hr must be > 0");
            return std::log(*c_hr);
        }
        if (c) return *c;
        throw adjalpha::OutOfRange("one of --c or --c-hr is required");
    }

    double resolve_info() const {
        if (events && info) throw adjalpha::OutOfRange("--events and --info are mutually exclusive");
        if (info) return *info;
        return (events ? *events : 510.0) / 4.0;  // I = N/4
    }

    StrategyKind resolve_strategy() const {
        auto s = adjalpha::parse_strategy(strategy);
        if (!s) throw adjalpha::OutOfRange("unknown strategy: " + strategy);
        return *s;
    }

    DesignParams make() const {
        return DesignParams::make(alpha, resolve_strategy(), resolve_c(), t, resolve_info(), w);
    }
};

void add_design_flags(CLI::App* cmd, DesignFlags& d) {
    cmd->add_option("--alpha", d.alpha, "Overall one-sided level (default 0.025)");
    cmd->add_option("--strategy", d.strategy, "conservative | aggressive | neutral");
    cmd->add_option("--c", d.c, "Consistency cutoff as a raw log-HR value");
    cmd->add_option("--c-hr", d.c_hr, "Consistency cutoff as a hazard-ratio ratio (c = log x)");
    cmd->add_option("--t", d.t, "Stage 1 information fraction (default 0.3)");
    cmd->add_option("--events", d.events, "Total events N; I = N/4 (default 510)");
    cmd->add_option("--info", d.info, "Information units I directly (overrides --events)");
    cmd->add_option("--w", d.w, "Picking-the-winner probability (values < 0.5 are clamped)");
}

void warn_if_clamped(const DesignParams& p) {
    if (p.w_was_clamped)
        std::cerr << "warning: w below 0.5 clamped to 0.5 for the alpha* calculation\n";
}

ordered_json design_fields(const DesignParams& p) {
    ordered_json r;
    r["strategy"] = adjalpha::to_string(p.strategy);
    r["c"] = p.c;
    r["t"] = p.t;
    r["I"] = p.info;
    r["w"] = p.w;
    r["alpha"] = p.alpha;
    return r;
}

int run_solve(const DesignFlags& d, const std::string& format, const std::string& out) {
    const DesignParams p = d.make();
    warn_if_clamped(p);
    const adjalpha::AlphaStarResult res = adjalpha::solve_alpha_star(p);

    std::fprintf(stderr, "alpha_star = %.4f (achieved Type I error %.6f, %d iterations)\n",
                 res.alpha_star, res.achieved_type1, res.iterations);
    if (res.at_alpha_bound)
        std::cerr << "note: Type I error at alpha is not inflated; no adjustment needed\n";

    ordered_json row = design_fields(p);
    row["alpha_star"] = res.alpha_star;
    row["achieved_type1"] = res.achieved_type1;
    emit({row}, format, out);
    return 0;
}

int run_error(const DesignFlags& d, double astar, const std::string& format,
              const std::string& out) {
    const DesignParams p = d.make();
    warn_if_clamped(p);
    const double t1 = adjalpha::type_one_error(p, astar);
    ordered_json row = design_fields(p);
    row["astar"] = astar;
    row["type1_error"] = t1;
    emit({row}, format, out);
    return 0;
}

int run_table1(double hr_overall, double t, double events, const std::string& diffs_spec,
               const std::string& format, const std::string& out) {
    const std::vector<double> diffs = parse_grid(diffs_spec);
    std::vector<ordered_json> rows;
    for (double diff : diffs) {
        const adjalpha::StageEffects se = adjalpha::stage_decompose(hr_overall, t, diff);
        const double p2 = adjalpha::stage2_nominal_p(se.hr_stage2, (1.0 - t) * events);
        ordered_json row;
        row["hr_overall"] = se.hr_overall;
        row["hr_stage1"] = se.hr_stage1;
        row["hr_stage2"] = se.hr_stage2;
        row["diff"] = se.diff;
        row["nominal_p_stage2"] = p2;
        rows.push_back(std::move(row));
    }
    emit(rows, format, out);
    return 0;
}

int run_figure1(double alpha, double t, double events, const std::string& c_hr_grid,
                const std::string& w_grid, const std::string& format, const std::string& out) {
    const std::vector<double> chrs = parse_grid(c_hr_grid);
    const std::vector<double> ws = parse_grid(w_grid);
    const StrategyKind strategies[] = {StrategyKind::Conservative, StrategyKind::Aggressive,
                                       StrategyKind::Neutral};

    struct Point {
        StrategyKind s;
        double c;
        double w;
    };
    std::vector<Point> grid;
    for (StrategyKind s : strategies)
        for (double chr : chrs)
            for (double w : ws) grid.push_back({s, std::log(chr), w});

    std::vector<double> astar(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const DesignParams p =
            DesignParams::make(alpha, grid[i].s, grid[i].c, t, events / 4.0, grid[i].w);
        astar[i] = adjalpha::solve_alpha_star(p).alpha_star;
    });

    std::vector<ordered_json> rows;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ordered_json row;
        row["strategy"] = adjalpha::to_string(grid[i].s);
        row["c"] = grid[i].c;
        row["w"] = grid[i].w;
        row["alpha_star"] = astar[i];
        rows.push_back(std::move(row));
    }
    emit(rows, format, out);
    return 0;
}

int run_figure2(double alpha, double events, const std::string& w_grid, const std::string& t_grid,
                const std::string& c_hr_grid, const std::string& format, const std::string& out) {
    const std::vector<double> ws = parse_grid(w_grid);
    const std::vector<double> ts = parse_grid(t_grid);
    const std::vector<double> chrs = parse_grid(c_hr_grid);

    struct Point {
        double w;
        double t;
        double c;
    };
    std::vector<Point> grid;
    for (double w : ws)
        for (double t : ts)
            for (double chr : chrs) grid.push_back({w, t, std::log(chr)});

    std::vector<double> astar(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const DesignParams p = DesignParams::make(alpha, StrategyKind::Neutral, grid[i].c,
                                                  grid[i].t, events / 4.0, grid[i].w);
        astar[i] = adjalpha::solve_alpha_star(p).alpha_star;
    });

    std::vector<ordered_json> rows;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ordered_json row;
        row["w"] = grid[i].w;
        row["t"] = grid[i].t;
        row["c"] = grid[i].c;
        row["alpha_star"] = astar[i];
        rows.push_back(std::move(row));
    }
    emit(rows, format, out);
    return 0;
}

int run_power(const DesignFlags& d, std::optional<double> astar_opt, double mu11, double mu12,
              double mu2, std::uint64_t reps, std::uint64_t seed, const std::string& format,
              const std::string& out) {
    const DesignParams p = d.make();
    warn_if_clamped(p);
    const double astar = astar_opt ? *astar_opt : adjalpha::solve_alpha_star(p).alpha_star;

    adjalpha::McConfig cfg;
    cfg.replicates = reps;
    cfg.seed = seed;
    const adjalpha::McEstimate est =
        adjalpha::simulate_power(p, astar, adjalpha::EffectSpec{mu11, mu12, mu2}, cfg);

    ordered_json row = design_fields(p);
    row["astar"] = astar;
    row["mu11"] = mu11;
    row["mu12"] = mu12;
    row["mu2"] = mu2;
    row["power"] = est.estimate;
    row["std_error"] = est.std_error;
    emit({row}, format, out);
    return 0;
}

// Built-in verification battery: all three strategies, c in {0, log 1.1,
// log 1.2, 1.0}, t in {0.2, 0.3, 0.4}, w in {0.5, 0.6, 0.8, 1.0}.
std::vector<DesignParams> verify_battery(double alpha, double info) {
    const double c11 = std::log(1.1), c12 = std::log(1.2);
    auto P = [&](StrategyKind s, double c, double t, double w) {
        return DesignParams::make(alpha, s, c, t, info, w);
    };
    return {
        P(StrategyKind::Neutral, c11, 0.3, 0.6),       // Appendix sample call
        P(StrategyKind::Neutral, 0.0, 0.3, 0.9),
        P(StrategyKind::Neutral, c12, 0.2, 0.5),
        P(StrategyKind::Neutral, 1.0, 0.4, 1.0),
        P(StrategyKind::Conservative, c11, 0.3, 0.8),
        P(StrategyKind::Conservative, c12, 0.4, 1.0),
        P(StrategyKind::Conservative, 0.0, 0.2, 0.5),
        P(StrategyKind::Conservative, 1.0, 0.3, 0.6),
        P(StrategyKind::Aggressive, c11, 0.3, 0.8),
        P(StrategyKind::Aggressive, c12, 0.2, 1.0),
        P(StrategyKind::Aggressive, 1.0, 0.4, 0.5),
        P(StrategyKind::Aggressive, 0.0, 0.3, 0.6),
    };
}

int run_verify(const DesignFlags& d, bool single, std::optional<double> astar_opt,
               std::uint64_t reps, std::uint64_t seed, const std::string& out) {
    std::vector<DesignParams> sets;
    if (single) {
        sets.push_back(d.make());
    } else {
        sets = verify_battery(d.alpha, d.resolve_info());
    }

    struct Check {
        double alpha_star;
        double analytic;
        double mc;
        double se;
        double z;
        double level_z;
        bool pass;
    };
    std::vector<Check> checks(sets.size());

    parallel_for(sets.size(), [&](std::size_t i) {
        const DesignParams& p = sets[i];
        double astar;
        if (single && astar_opt) {
            astar = *astar_opt;
        } else {
            astar = adjalpha::solve_alpha_star(p).alpha_star;
        }
        const double analytic = adjalpha::type_one_error(p, astar);
        adjalpha::McConfig cfg;
        cfg.replicates = reps;
        cfg.seed = seed;
        const adjalpha::McEstimate est = adjalpha::simulate_type_one(p, astar, cfg);
        // Two-sided check: the simulation must agree with the analytic value
        // (oracle equivalence) and must not exceed the target alpha (level
        // control at the level being verified).
        const double z = (analytic - est.estimate) / est.std_error;
        const double lz = (est.estimate - p.alpha) / est.std_error;
        checks[i] = {astar, analytic, est.estimate, est.std_error, z, lz,
                     std::fabs(z) <= 3.5 && lz <= 3.5};
    });

    bool all_pass = true;
    ordered_json report;
    report["replicates"] = reps;
    report["seed"] = seed;
    ordered_json arr = ordered_json::array();
    for (std::size_t i = 0; i < sets.size(); ++i) {
        ordered_json row = design_fields(sets[i]);
        row["alpha_star"] = checks[i].alpha_star;
        row["analytic_type1"] = checks[i].analytic;
        row["mc_estimate"] = checks[i].mc;
        row["mc_se"] = checks[i].se;
        row["z_discrepancy"] = checks[i].z;
        row["level_z"] = checks[i].level_z;
        row["pass"] = checks[i].pass;
        arr.push_back(std::move(row));
        all_pass = all_pass && checks[i].pass;
    }
    report["checks"] = std::move(arr);
    report["pass"] = all_pass;

    const std::string text = report.dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw adjalpha::OutOfRange("cannot open output file: " + out);
        f << text;
    }
    return all_pass ? 0 : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adjusted significance levels for adaptive two-stage designs with dose selection"};
    app.require_subcommand(1);
    app.fallthrough();  // --format/--out may follow the subcommand

    std::string format = "csv";
    std::string out_path;
    app.add_option("--format", format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--out", out_path, "Write output to a file instead of stdout");

    // solve
    DesignFlags solve_d;
    CLI::App* solve = app.add_subcommand("solve", "Solve for the adjusted level alpha*");
    add_design_flags(solve, solve_d);

    // error
    DesignFlags error_d;
    double error_astar = 0.0;
    CLI::App* error = app.add_subcommand("error", "Type I error at a given nominal level");
    add_design_flags(error, error_d);
    error->add_option("--astar", error_astar, "Nominal level applied to both tests")->required();

    // table1
    double t1_hr = 0.84, t1_t = 0.3, t1_events = 510.0;
    std::string t1_diffs = "-0.1823215567939546,-0.09531017980432086,0.09531017980432086,0.1823215567939546";
    CLI::App* table1 = app.add_subcommand("table1", "Stage decomposition table rows");
    table1->add_option("--hr-overall", t1_hr, "Overall hazard ratio (default 0.84)");
    table1->add_option("--t", t1_t, "Stage 1 information fraction (default 0.3)");
    table1->add_option("--events", t1_events, "Total events (default 510)");
    table1->add_option("--diffs", t1_diffs,
                       "Comma list of stage effect differences (default +-log 1.1, +-log 1.2)");

    // figure1
    double f1_alpha = 0.025, f1_t = 0.3, f1_events = 510.0;
    std::string f1_chr = "1.1,1.2", f1_w = "0.5:1.0:0.025";
    CLI::App* figure1 = app.add_subcommand("figure1", "alpha* vs w for all three strategies");
    figure1->add_option("--alpha", f1_alpha, "Overall level (default 0.025)");
    figure1->add_option("--t", f1_t, "Stage 1 information fraction (default 0.3)");
    figure1->add_option("--events", f1_events, "Total events (default 510)");
    figure1->add_option("--c-hr-grid", f1_chr, "Cutoffs as HR ratios (default 1.1,1.2)");
    figure1->add_option("--w-grid", f1_w, "w grid a:b:s or list (default 0.5:1.0:0.025)");

    // figure2
    double f2_alpha = 0.025, f2_events = 510.0;
    std::string f2_w = "0.5,1.0", f2_t = "0.2,0.3,0.4", f2_chr = "1.0:1.3:0.0125";
    CLI::App* figure2 = app.add_subcommand("figure2", "Neutral alpha* vs cutoff c");
    figure2->add_option("--alpha", f2_alpha, "Overall level (default 0.025)");
    figure2->add_option("--events", f2_events, "Total events (default 510)");
    figure2->add_option("--w-grid", f2_w, "w values (default 0.5,1.0)");
    figure2->add_option("--t-grid", f2_t, "t values (default 0.2,0.3,0.4)");
    figure2->add_option("--c-hr-grid", f2_chr, "Cutoff grid as HR ratios (default 1.0:1.3:0.0125)");

    // verify
    DesignFlags verify_d;
    std::optional<double> verify_astar;
    std::uint64_t verify_reps = 1'000'000, verify_seed = 20240901;
    CLI::App* verify = app.add_subcommand(
        "verify", "Check analytic Type I error against the Monte Carlo oracle");
    add_design_flags(verify, verify_d);
    verify->add_option("--astar", verify_astar, "Nominal level to verify (default: solve it)");
    verify->add_option("--reps", verify_reps, "Monte Carlo replicates (default 10^6)");
    verify->add_option("--seed", verify_seed, "Monte Carlo seed");

    // power
    DesignFlags power_d;
    std::optional<double> power_astar;
    double mu11 = 0.0, mu12 = 0.0, mu2 = 0.0;
    std::uint64_t power_reps = 1'000'000, power_seed = 20240901;
    CLI::App* power = app.add_subcommand("power", "Monte Carlo power under mean shifts");
    add_design_flags(power, power_d);
    power->add_option("--astar", power_astar, "Nominal level (default: solve it)");
    power->add_option("--mu11", mu11, "Mean shift of Y11 in sd units");
    power->add_option("--mu12", mu12, "Mean shift of Y12 in sd units");
    power->add_option("--mu2", mu2, "Mean shift of Y2s in sd units");
    power->add_option("--reps", power_reps, "Monte Carlo replicates (default 10^6)");
    power->add_option("--seed", power_seed, "Monte Carlo seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitBadParams;
    }

    try {
        if (solve->parsed()) return run_solve(solve_d, format, out_path);
        if (error->parsed()) return run_error(error_d, error_astar, format, out_path);
        if (table1->parsed()) return run_table1(t1_hr, t1_t, t1_events, t1_diffs, format, out_path);
        if (figure1->parsed())
            return run_figure1(f1_alpha, f1_t, f1_events, f1_chr, f1_w, format, out_path);
        if (figure2->parsed())
            return run_figure2(f2_alpha, f2_events, f2_w, f2_t, f2_chr, format, out_path);
        if (verify->parsed()) {
            const bool single = verify_d.c.has_value() || verify_d.c_hr.has_value();
            return run_verify(verify_d, single, verify_astar, verify_reps, verify_seed, out_path);
        }
        if (power->parsed())
            return run_power(power_d, power_astar, mu11, mu12, mu2, power_reps, power_seed, format,
                             out_path);
    } catch (const adjalpha::NoConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadParams;
    }
    return 0;
}
