// hgdo: command-line driver for scenario runs, sweeps and plots.
//
// Exit codes: 0 success, 1 failed bound check or I/O error, 2 a run diverged,
// 3 invalid configuration.

#include "hgdo/batch.hpp"
#include "hgdo/errors.hpp"
#include "hgdo/metrics.hpp"
#include "hgdo/scenario_config.hpp"
#include "hgdo/simulation.hpp"
#include "hgdo/svg_plot.hpp"
#include "hgdo/trace_io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>

namespace fs = std::filesystem;
using namespace hgdo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitDiverged = 2;
constexpr int kExitConfig = 3;

sim::ScenarioConfig load(const std::string& path, std::optional<std::uint64_t> seed) {
    sim::ScenarioConfig cfg = sim::load_scenario(path);
    sim::apply_seed_override(cfg, seed);
    cfg.validate();
    return cfg;
}

void print_rms(const report::MetricsReport& m) {
    std::printf("  tracking RMS   ");
    for (int c = 0; c < 6; ++c) std::printf(" %s=%.5f", std::string(report::kTrackingChannels[c]).c_str(), m.tracking_rms[c]);
    std::printf("\n  estimation RMS ");
    static constexpr const char* d[] = {"dx", "dy", "dz", "dphi", "dtheta", "dpsi"};
    for (int c = 0; c < 6; ++c) std::printf(" %s=%.5f", d[c], m.estimation_rms[c]);
    std::printf("\n");
}

int cmd_simulate(const std::string& cfg_path, const std::string& out_dir, std::optional<std::uint64_t> seed,
                 double skip) {
    const sim::ScenarioConfig cfg = load(cfg_path, seed);
    const sim::SimResult res = sim::run_scenario(cfg);
    const report::MetricsReport m = report::build_report(cfg, res, skip);

    fs::create_directories(out_dir);
    io::write_trace_csv(res.trace, fs::path(out_dir) / "trace.csv");
    io::write_json(report::to_json(m), fs::path(out_dir) / "metrics.json");
    plot::write_svg(plot::xy_figure(res.trace), fs::path(out_dir) / "xy.svg");
    plot::write_svg(plot::timeseries_figure(res.trace), fs::path(out_dir) / "timeseries.svg");
    plot::write_svg(plot::estimates_figure(res.trace), fs::path(out_dir) / "estimates.svg");

    std::printf("%s: %s, %zu samples, %.3f s\n", cfg.name.c_str(),
                res.status == sim::RunStatus::Ok ? "ok" : "diverged", res.trace.size(), res.runtime_seconds);
    for (const auto& l : cfg.labels) std::printf("  label: %s\n", l.c_str());
    print_rms(m);
    if (m.bounds) std::printf("  L1 bound: %s\n", m.bounds->all() ? "pass" : "FAIL");
    if (m.gains && !m.gains->all()) std::printf("  warning: switching-gain condition violated\n");
    std::printf("  wrote %s\n", out_dir.c_str());
    if (res.status == sim::RunStatus::Diverged) {
        std::fprintf(stderr, "diverged: %s\n", res.message.c_str());
        return kExitDiverged;
    }
    return kExitOk;
}

std::vector<double> parse_eps(const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t next = s.find(',', pos);
        const std::string tok = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError("--eps: not a number: '" + tok + "'");
        }
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

int cmd_sweep(const std::string& cfg_path, const std::string& eps, bool smc_only, double skip,
              std::optional<std::uint64_t> seed, const std::string& out, bool serial) {
    const sim::ScenarioConfig cfg = load(cfg_path, seed);
    const report::SweepReport rep = report::sweep(cfg, parse_eps(eps), smc_only, skip, !serial);
    std::printf("%s", report::format_sweep_table(rep).c_str());
    if (rep.shared_disturbance) std::printf("shared disturbance realization: %s\n", *rep.shared_disturbance ? "yes" : "NO");
    if (!out.empty()) io::write_json(report::to_json(rep), out);
    for (auto s : rep.status)
        if (s == sim::RunStatus::Diverged) return kExitDiverged;
    return kExitOk;
}

int cmd_compare(const std::string& a, const std::string& b, std::optional<std::uint64_t> seed, double skip) {
    const std::vector<sim::ScenarioConfig> cfgs = {load(a, seed), load(b, seed)};
    const auto results = sim::run_batch(cfgs);
    int code = kExitOk;
    std::printf("%-8s %14s %14s\n", "channel", cfgs[0].name.c_str(), cfgs[1].name.c_str());
    const auto ra = report::rms_errors(results[0].trace, skip);
    const auto rb = report::rms_errors(results[1].trace, skip);
    for (int c = 0; c < 6; ++c)
        std::printf("%-8s %14.6f %14.6f\n", std::string(report::kTrackingChannels[c]).c_str(), ra[c], rb[c]);
    for (const auto& r : results)
        if (r.status == sim::RunStatus::Diverged) {
            std::fprintf(stderr, "diverged: %s\n", r.message.c_str());
            code = kExitDiverged;
        }
    return code;
}

int cmd_check_bounds(const std::string& cfg_path, std::optional<std::uint64_t> seed) {
    const sim::ScenarioConfig cfg = load(cfg_path, seed);
    const sim::SimResult res = sim::run_scenario(cfg);
    const report::BoundCheck bc = report::bound_check(cfg, res.trace);
    static constexpr const char* d[] = {"dx", "dy", "dz", "dphi", "dtheta", "dpsi"};
    std::printf("%-7s %14s %14s %14s  %s\n", "channel", "int|d~|", "bound", "delta", "result");
    for (int c = 0; c < 6; ++c)
        std::printf("%-7s %14.6g %14.6g %14.6g  %s\n", d[c], bc.lhs[c], bc.rhs[c], bc.delta[c],
                    bc.pass[c] ? "pass" : "FAIL");
    if (res.status == sim::RunStatus::Diverged) return kExitDiverged;
    return bc.all() ? kExitOk : kExitFailure;
}

int cmd_plot(const std::string& trace_path, const std::string& kind, std::string out) {
    static const std::map<std::string, plot::Kind> kinds = {
        {"xy", plot::Kind::Xy}, {"timeseries", plot::Kind::Timeseries}, {"estimates", plot::Kind::Estimates}};
    const sim::SimTrace trace = io::read_trace_csv(fs::path(trace_path));
    if (out.empty()) out = fs::path(trace_path).replace_extension("").string() + "." + kind + ".svg";
    plot::write_svg(plot::make_figure(trace, kinds.at(kind)), out);
    std::printf("wrote %s\n", out.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"High-gain disturbance observer quadrotor simulator"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed;
    double skip = 0.0;

    std::string cfg_path, out_dir = "out";
    auto* simulate = app.add_subcommand("simulate", "Run one scenario and write trace, metrics and plots");
    simulate->add_option("config", cfg_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
    simulate->add_option("--out", out_dir, "Output directory")->capture_default_str();
    simulate->add_option("--seed", seed, "Seed override (beats HGDO_SEED)");
    simulate->add_option("--skip", skip, "Seconds excluded from RMS at the start");

    std::string eps = "0.01,0.04,0.08", sweep_out;
    bool smc_only = false, serial = false;
    auto* sweep = app.add_subcommand("sweep", "Compare observer gains on one scenario");
    sweep->add_option("config", cfg_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
    sweep->add_option("--eps", eps, "Comma-separated epsilon values")->capture_default_str();
    sweep->add_flag("--smc-only", smc_only, "Add a run without observer");
    sweep->add_option("--skip", skip, "Seconds excluded from RMS at the start");
    sweep->add_option("--seed", seed, "Seed override (beats HGDO_SEED)");
    sweep->add_option("--out", sweep_out, "Write the sweep report as JSON");
    sweep->add_flag("--serial", serial, "Run variants one after another");

    std::string cfg_a, cfg_b;
    auto* compare = app.add_subcommand("compare", "Tracking RMS of two scenarios side by side");
    compare->add_option("config_a", cfg_a, "First scenario")->required()->check(CLI::ExistingFile);
    compare->add_option("config_b", cfg_b, "Second scenario")->required()->check(CLI::ExistingFile);
    compare->add_option("--seed", seed, "Seed override (beats HGDO_SEED)");
    compare->add_option("--skip", skip, "Seconds excluded from RMS at the start");

    auto* check = app.add_subcommand("check-bounds", "Check the L1 estimation-error bound");
    check->add_option("config", cfg_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
    check->add_option("--seed", seed, "Seed override (beats HGDO_SEED)");

    std::string trace_path, kind = "xy", plot_out;
    auto* plotc = app.add_subcommand("plot", "Render a trace CSV as SVG");
    plotc->add_option("trace", trace_path, "Trace CSV")->required()->check(CLI::ExistingFile);
    plotc->add_option("--kind", kind, "Plot kind")
        ->check(CLI::IsMember({"xy", "timeseries", "estimates"}))
        ->capture_default_str();
    plotc->add_option("--out", plot_out, "Output SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*simulate) return cmd_simulate(cfg_path, out_dir, seed, skip);
        if (*sweep) return cmd_sweep(cfg_path, eps, smc_only, skip, seed, sweep_out, serial);
        if (*compare) return cmd_compare(cfg_a, cfg_b, seed, skip);
        if (*check) return cmd_check_bounds(cfg_path, seed);
        if (*plotc) return cmd_plot(trace_path, kind, plot_out);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const NonPositiveEpsilon& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const StochasticDisturbance& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const NonDifferentiable& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }
    return kExitOk;
}
