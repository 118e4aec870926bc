#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "paramosc/auxiliary.hpp"
#include "paramosc/csv.hpp"
#include "paramosc/errors.hpp"
#include "paramosc/gaussian.hpp"
#include "paramosc/general_quadratic.hpp"
#include "paramosc/integrator.hpp"
#include "paramosc/mathieu.hpp"
#include "paramosc/scenario.hpp"
#include "paramosc/version.hpp"

namespace {

using nlohmann::json;
using namespace paramosc;

struct GlobalOptions {
    std::string config_path;
    std::string out_dir = ".";
    double rel_tol = 1e-10;
    double fixed_step = 0.0;

    DriveParameters scenario() const {
        return config_path.empty() ? DriveParameters{} : load_scenario(config_path);
    }

    IntegratorConfig integrator() const {
        IntegratorConfig cfg;
        cfg.rel_tol = rel_tol;
        if (fixed_step > 0.0) {
            cfg.method = Method::rk4;
            cfg.initial_step = fixed_step;
        } else if (fixed_step != 0.0) {
            throw validation_error("--fixed-step must be > 0");
        }
        cfg.validate();
        return cfg;
    }
};

// Per-subcommand overrides of the config-file scenario.
struct ScenarioFlags {
    double g = -1.0, delta_g = -1.0, delta_ratio = -1.0, Omega = -1.0;
    bool has_g = false, has_delta_g = false, has_delta_ratio = false, has_Omega = false;

    void attach(CLI::App* cmd) {
        auto* og = cmd->add_option("--g", g, "Mean coupling strength");
        auto* od = cmd->add_option("--delta-g", delta_g, "Drive amplitude");
        auto* or_ = cmd->add_option("--delta-ratio", delta_ratio,
                                    "Drive amplitude as a fraction of g");
        auto* oo = cmd->add_option("--Omega", Omega, "Drive frequency");
        od->excludes(or_);
        og->trigger_on_parse();
        cmd->callback([this, og, od, or_, oo] {
            has_g = og->count() > 0;
            has_delta_g = od->count() > 0;
            has_delta_ratio = or_->count() > 0;
            has_Omega = oo->count() > 0;
        });
    }

    DriveParameters apply(DriveParameters p) const {
        if (has_g) p.g = g;
        if (has_delta_g) p.delta_g = delta_g;
        if (has_delta_ratio) p.delta_g = delta_ratio * p.g;
        if (has_Omega) p.Omega = Omega;
        p.validate();
        return p;
    }
};

std::pair<double, double> parse_range(const std::string& s, const char* name) {
    const auto pos = s.find(':', 1);
    if (pos == std::string::npos || pos + 1 >= s.size())
        throw validation_error(std::string(name) + " must have the form min:max");
    double lo, hi;
    try {
        std::size_t used = 0;
        lo = std::stod(s.substr(0, pos), &used);
        if (used != pos) throw std::invalid_argument("");
        const std::string rest = s.substr(pos + 1);
        hi = std::stod(rest, &used);
        if (used != rest.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw validation_error(std::string(name) + " must contain two numbers as min:max");
    }
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
        throw validation_error(std::string(name) + " must satisfy min < max");
    return {lo, hi};
}

std::vector<double> parse_times(const std::string& s) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const std::string tok = s.substr(start, comma == std::string::npos ? std::string::npos
                                                                           : comma - start);
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size() || !std::isfinite(v)) throw std::invalid_argument("");
            out.push_back(v);
        } catch (const std::exception&) {
            throw validation_error("--times must be a comma-separated list of numbers");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty())
        throw validation_error("--times must not be empty");
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out[i] < 0.0 || (i > 0 && out[i] <= out[i - 1]))
            throw validation_error("--times must be nonnegative and strictly ascending");
    return out;
}

std::string time_label(double omega_t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", omega_t);
    std::string s = buf;
    for (char& c : s) {
        if (c == '.') c = 'p';
        if (c == '-') c = 'm';
        if (c == '+') c = '_';
    }
    return s;
}

json scenario_json(const DriveParameters& p) {
    return {{"omega", p.omega}, {"g", p.g}, {"delta_g", p.delta_g},
            {"Omega", p.Omega}, {"t0", p.t0}};
}

json integrator_json(const GlobalOptions& opt) {
    return {{"method", opt.fixed_step > 0.0 ? "rk4" : "adaptive54"},
            {"rel_tol", opt.rel_tol},
            {"fixed_step", opt.fixed_step}};
}

json base_manifest(const char* subcommand, const GlobalOptions& opt,
                   const DriveParameters& p, json settings) {
    return {{"subcommand", subcommand},
            {"scenario", scenario_json(p)},
            {"integrator", integrator_json(opt)},
            {"out_dir", opt.out_dir},
            {"settings", std::move(settings)},
            {"tool", {{"name", tool_name}, {"version", tool_version}}}};
}

std::vector<std::string> csv_comments(const char* subcommand, const std::string& hash,
                                      std::vector<std::string> extra = {}) {
    std::vector<std::string> out;
    out.push_back(std::string(tool_name) + " " + tool_version + " " + subcommand);
    out.push_back("manifest_hash: " + hash);
    for (auto& e : extra) out.push_back(std::move(e));
    return out;
}

std::string out_path(const GlobalOptions& opt, const std::string& file) {
    return (std::filesystem::path(opt.out_dir) / file).string();
}

/// Evenly spaced times over [t0, t_max]; the front element is t0 itself and
/// is not passed to the integrator as a landing target.
std::vector<double> sample_grid(double t0, double t_max, int n) {
    if (!(t_max > t0))
        throw validation_error("--t-max must exceed the scenario t0");
    if (n < 2)
        throw validation_error("--samples must be at least 2");
    std::vector<double> times(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        times[i] = t0 + (t_max - t0) * i / (n - 1);
    times.back() = t_max;
    return times;
}

int run_stability_chart(const GlobalOptions& opt, const std::string& a_range,
                        const std::string& b_range, int res) {
    const auto [a_min, a_max] = parse_range(a_range, "--a");
    const auto [b_min, b_max] = parse_range(b_range, "--b");
    const auto cfg = opt.integrator();
    const auto chart = stability_chart(a_min, a_max, b_min, b_max, res, cfg);

    json manifest = base_manifest("stability-chart", opt, DriveParameters{},
                                  {{"a_min", a_min}, {"a_max", a_max},
                                   {"b_min", b_min}, {"b_max", b_max},
                                   {"resolution", res}});
    manifest.erase("scenario"); // the chart is parameterized directly by (a, b)
    const std::string hash = manifest_hash_hex(manifest);

    std::vector<std::vector<double>> rows;
    rows.reserve(chart.stable.size());
    for (std::size_t ib = 0; ib < chart.b_values.size(); ++ib)
        for (std::size_t ia = 0; ia < chart.a_values.size(); ++ia) {
            const std::size_t idx = chart.index(ib, ia);
            rows.push_back({chart.a_values[ia], chart.b_values[ib],
                            static_cast<double>(chart.stable[idx]), chart.im_f[idx]});
        }

    std::filesystem::create_directories(opt.out_dir);
    write_csv_atomic(out_path(opt, "chart.csv"),
                     csv_comments("stability-chart", hash,
                                  {"imF is per canonical time unit"}),
                     {"a", "b", "stable", "imF"}, rows);
    write_manifest(opt.out_dir, manifest);
    return 0;
}

int run_mode_line(const GlobalOptions& opt, const std::string& g_range, int samples,
                  double delta_ratio) {
    const auto [g_min, g_max] = parse_range(g_range, "--g");
    const auto cfg = opt.integrator();
    const auto base = opt.scenario();
    const auto line = mode_line(base, g_min, g_max, samples, delta_ratio, cfg);

    json manifest = base_manifest("mode-line", opt, base,
                                  {{"g_min", g_min}, {"g_max", g_max},
                                   {"samples", samples}, {"delta_ratio", delta_ratio}});
    const std::string hash = manifest_hash_hex(manifest);

    std::vector<std::vector<double>> rows;
    rows.reserve(line.size());
    for (const auto& pt : line)
        rows.push_back({pt.g,
                        pt.minus.a, pt.minus.b,
                        pt.floq_minus.exponent.real(), pt.floq_minus.exponent.imag(),
                        static_cast<double>(pt.floq_minus.stable ? 1 : 0),
                        pt.plus.a, pt.plus.b,
                        pt.floq_plus.exponent.real(), pt.floq_plus.exponent.imag(),
                        static_cast<double>(pt.floq_plus.stable ? 1 : 0)});

    std::filesystem::create_directories(opt.out_dir);
    write_csv_atomic(out_path(opt, "mode_line.csv"),
                     csv_comments("mode-line", hash,
                                  {"Floquet exponents are per canonical time unit; "
                                   "multiply by Omega/2 for physical time"}),
                     {"g", "a_minus", "b_minus", "reF_minus", "imF_minus", "stable_minus",
                      "a_plus", "b_plus", "reF_plus", "imF_plus", "stable_plus"},
                     rows);
    write_manifest(opt.out_dir, manifest);
    return 0;
}

int run_entropy(const GlobalOptions& opt, const ScenarioFlags& flags, double t_max,
                int samples) {
    const auto p = flags.apply(opt.scenario());
    const auto cfg = opt.integrator();
    const auto times = sample_grid(p.t0, t_max, samples);
    const std::vector<double> landing(times.begin() + 1, times.end());

    const auto tm = evolve_auxiliary(p, Mode::minus, t_max, cfg, &landing);
    const auto tp = evolve_auxiliary(p, Mode::plus, t_max, cfg, &landing);
    const auto series = entropy_series(tm, tp, times);

    json manifest = base_manifest("entropy", opt, p,
                                  {{"t_max", t_max}, {"samples", samples}});
    const std::string hash = manifest_hash_hex(manifest);

    std::vector<std::vector<double>> entropy_rows, aux_rows;
    entropy_rows.reserve(times.size());
    aux_rows.reserve(times.size());
    const cplx eye(0.0, 1.0);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto& pt = series[i];
        entropy_rows.push_back({pt.t, pt.L, pt.purity, von_neumann_entropy(pt.purity)});

        const auto sm = tm.at(times[i]);
        const auto sp = tp.at(times[i]);
        aux_rows.push_back({times[i],
                            sm.b.real(), sm.b.imag(), sm.bdot.real(), sm.bdot.imag(),
                            sp.b.real(), sp.b.imag(), sp.bdot.real(), sp.bdot.imag(),
                            std::abs(wronskian(sm) - eye), std::abs(wronskian(sp) - eye),
                            characteristic_length(tm, times[i]),
                            characteristic_length(tp, times[i])});
    }

    std::filesystem::create_directories(opt.out_dir);
    write_csv_atomic(out_path(opt, "entropy.csv"), csv_comments("entropy", hash),
                     {"t", "L", "purity", "vN_entropy"}, entropy_rows);
    write_csv_atomic(out_path(opt, "aux.csv"), csv_comments("entropy", hash),
                     {"t", "reB_minus", "imB_minus", "reBdot_minus", "imBdot_minus",
                      "reB_plus", "imB_plus", "reBdot_plus", "imBdot_plus",
                      "wronskian_err_minus", "wronskian_err_plus", "l_minus", "l_plus"},
                     aux_rows);
    write_manifest(opt.out_dir, manifest);
    return 0;
}

int run_wigner(const GlobalOptions& opt, const ScenarioFlags& flags,
               const std::string& times_str, const std::string& range_str, int res) {
    const auto p = flags.apply(opt.scenario());
    const auto cfg = opt.integrator();
    const auto omega_times = parse_times(times_str);
    const auto [lo, hi] = parse_range(range_str, "--range");

    std::vector<double> phys_times(omega_times.size());
    for (std::size_t i = 0; i < omega_times.size(); ++i)
        phys_times[i] = p.t0 + omega_times[i] / p.Omega;
    const double t_end = phys_times.back() > p.t0 ? phys_times.back()
                                                  : p.t0 + 2.0 * std::numbers::pi / p.Omega;
    std::vector<double> landing;
    for (double t : phys_times)
        if (t > p.t0) landing.push_back(t);

    const auto tm = evolve_auxiliary(p, Mode::minus, t_end, cfg,
                                     landing.empty() ? nullptr : &landing);
    const auto tp = evolve_auxiliary(p, Mode::plus, t_end, cfg,
                                     landing.empty() ? nullptr : &landing);

    json manifest = base_manifest("wigner", opt, p,
                                  {{"omega_times", omega_times},
                                   {"range_min", lo}, {"range_max", hi},
                                   {"resolution", res}});
    const std::string hash = manifest_hash_hex(manifest);

    std::filesystem::create_directories(opt.out_dir);
    for (std::size_t i = 0; i < phys_times.size(); ++i) {
        const auto grid = wigner_grid(tm, tp, phys_times[i], lo, hi, lo, hi, res);
        std::vector<std::vector<double>> rows;
        rows.reserve(grid.values.size());
        for (std::size_t iq = 0; iq < grid.q_values.size(); ++iq)
            for (std::size_t ip = 0; ip < grid.p_values.size(); ++ip)
                rows.push_back({grid.q_values[iq], grid.p_values[ip],
                                grid.values[iq * grid.p_values.size() + ip]});
        const std::string file = "wigner_t" + time_label(omega_times[i]) + ".csv";
        write_csv_atomic(out_path(opt, file),
                         csv_comments("wigner", hash,
                                      {"Omega*t = " + format_double(omega_times[i])}),
                         {"q", "p", "W"}, rows);
    }
    write_manifest(opt.out_dir, manifest);
    return 0;
}

int run_density(const GlobalOptions& opt, const ScenarioFlags& flags,
                const std::string& times_str, const std::string& range_str, int res) {
    const auto p = flags.apply(opt.scenario());
    const auto cfg = opt.integrator();
    const auto omega_times = parse_times(times_str);
    const auto [lo, hi] = parse_range(range_str, "--range");
    if (res < 2)
        throw validation_error("--res must be at least 2");

    std::vector<double> phys_times(omega_times.size());
    for (std::size_t i = 0; i < omega_times.size(); ++i)
        phys_times[i] = p.t0 + omega_times[i] / p.Omega;
    const double t_end = phys_times.back() > p.t0 ? phys_times.back()
                                                  : p.t0 + 2.0 * std::numbers::pi / p.Omega;
    std::vector<double> landing;
    for (double t : phys_times)
        if (t > p.t0) landing.push_back(t);

    const auto tm = evolve_auxiliary(p, Mode::minus, t_end, cfg,
                                     landing.empty() ? nullptr : &landing);
    const auto tp = evolve_auxiliary(p, Mode::plus, t_end, cfg,
                                     landing.empty() ? nullptr : &landing);

    json manifest = base_manifest("density", opt, p,
                                  {{"omega_times", omega_times},
                                   {"range_min", lo}, {"range_max", hi},
                                   {"resolution", res}});
    const std::string hash = manifest_hash_hex(manifest);

    std::vector<double> axis(static_cast<std::size_t>(res));
    for (int i = 0; i < res; ++i)
        axis[i] = lo + (hi - lo) * i / (res - 1);

    std::filesystem::create_directories(opt.out_dir);
    for (std::size_t i = 0; i < phys_times.size(); ++i) {
        std::vector<std::vector<double>> rows;
        rows.reserve(axis.size() * axis.size());
        for (double x1 : axis)
            for (double x2 : axis)
                rows.push_back({x1, x2, joint_ground_density(tm, tp, x1, x2, phys_times[i])});
        const std::string file = "density_t" + time_label(omega_times[i]) + ".csv";
        write_csv_atomic(out_path(opt, file),
                         csv_comments("density", hash,
                                      {"Omega*t = " + format_double(omega_times[i])}),
                         {"x1", "x2", "density"}, rows);
    }
    write_manifest(opt.out_dir, manifest);
    return 0;
}

int run_general_check(const GlobalOptions& opt, const ScenarioFlags& flags, int periods,
                      bool corrupt_seed) {
    if (periods < 1)
        throw validation_error("--periods must be at least 1");
    const auto p = flags.apply(opt.scenario());
    const auto cfg = opt.integrator();
    const auto h = QuadraticHamiltonian::from_scenario(p);

    auto init = normal_mode_init(p);
    if (corrupt_seed)
        init.B[0] *= 1.01;

    const double period = 2.0 * std::numbers::pi / p.Omega;
    const double t_end = p.t0 + periods * period;
    std::vector<double> landing(static_cast<std::size_t>(2 * periods));
    for (std::size_t k = 0; k < landing.size(); ++k)
        landing[k] = p.t0 + (k + 1) * period / 2.0;
    landing.back() = t_end;

    const auto gt = evolve_general(h, init, t_end, cfg, &landing);
    const auto tm = evolve_auxiliary(p, Mode::minus, t_end, cfg, &landing);
    const auto tp = evolve_auxiliary(p, Mode::plus, t_end, cfg, &landing);

    std::vector<double> times;
    times.reserve(landing.size() + 1);
    times.push_back(p.t0);
    times.insert(times.end(), landing.begin(), landing.end());

    double reduction_dev = 0.0;
    std::vector<std::vector<double>> rows;
    rows.reserve(times.size());
    for (double t : times) {
        const auto m = gt.at(h, t);
        const auto res = constraint_residuals(m, h);
        rows.push_back({t,
                        m.B[0].real(), m.B[0].imag(), m.B[1].real(), m.B[1].imag(),
                        m.B[2].real(), m.B[2].imag(), m.B[3].real(), m.B[3].imag(),
                        res.wc1, res.wc2, res.wc3});
        reduction_dev = std::max(reduction_dev,
                                 std::abs(extract_mode(m, Mode::minus).b - tm.at(t).b));
        reduction_dev = std::max(reduction_dev,
                                 std::abs(extract_mode(m, Mode::plus).b - tp.at(t).b));
    }

    json manifest = base_manifest("general-check", opt, p,
                                  {{"periods", periods},
                                   {"max_constraint_residual", gt.max_residual},
                                   {"reduction_max_deviation", reduction_dev}});
    const std::string hash = manifest_hash_hex(manifest);

    std::filesystem::create_directories(opt.out_dir);
    write_csv_atomic(out_path(opt, "general.csv"), csv_comments("general-check", hash),
                     {"t", "reB_11", "imB_11", "reB_12", "imB_12",
                      "reB_21", "imB_21", "reB_22", "imB_22",
                      "wc1_res", "wc2_res", "wc3_res"},
                     rows);
    write_manifest(opt.out_dir, manifest);

    std::cout << "max constraint residual over " << periods << " periods: "
              << format_double(gt.max_residual) << "\n"
              << "max normal-mode reduction deviation: " << format_double(reduction_dev)
              << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled parametric oscillator toolkit: stability charts, "
                 "entanglement dynamics, and phase-space grids"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions opt;
    app.add_option("--config", opt.config_path, "Scenario JSON file");
    app.add_option("--out", opt.out_dir, "Output directory");
    app.add_option("--rel-tol", opt.rel_tol, "Adaptive integrator relative tolerance");
    app.add_option("--fixed-step", opt.fixed_step,
                   "Use the fixed-step integrator with this step");

    auto* chart_cmd = app.add_subcommand("stability-chart",
                                         "Stability classification over the (a, b) plane");
    std::string a_range = "0:5", b_range = "-1:1";
    int chart_res = 101;
    chart_cmd->add_option("--a", a_range, "a range as min:max");
    chart_cmd->add_option("--b", b_range, "b range as min:max");
    chart_cmd->add_option("--res", chart_res, "Grid resolution per axis");

    auto* line_cmd = app.add_subcommand("mode-line",
                                        "Floquet exponents of both modes along a g scan");
    std::string g_range = "0.3:0.5";
    int line_samples = 201;
    double line_ratio = 0.1;
    line_cmd->add_option("--g", g_range, "g range as min:max");
    line_cmd->add_option("--samples", line_samples, "Number of g samples");
    line_cmd->add_option("--delta-ratio", line_ratio, "delta_g / g along the scan");

    auto* entropy_cmd = app.add_subcommand("entropy",
                                           "Linear entropy time series with the "
                                           "auxiliary-function record");
    ScenarioFlags entropy_flags;
    entropy_flags.attach(entropy_cmd);
    double t_max = 50.0;
    int entropy_samples = 1001;
    entropy_cmd->add_option("--t-max", t_max, "Final time");
    entropy_cmd->add_option("--samples", entropy_samples, "Number of output samples");

    auto* wigner_cmd = app.add_subcommand("wigner", "Wigner-function grids at fixed times");
    ScenarioFlags wigner_flags;
    wigner_flags.attach(wigner_cmd);
    std::string wigner_times = "0,32,50", wigner_range = "-8:8";
    int wigner_res = 400;
    wigner_cmd->add_option("--times", wigner_times, "Comma-separated Omega*t values");
    wigner_cmd->add_option("--range", wigner_range, "q and p range as min:max");
    wigner_cmd->add_option("--res", wigner_res, "Grid resolution per axis");

    auto* density_cmd = app.add_subcommand("density",
                                           "Joint position density grids at fixed times");
    ScenarioFlags density_flags;
    density_flags.attach(density_cmd);
    std::string density_times = "0,32,50", density_range = "-8:8";
    int density_res = 400;
    density_cmd->add_option("--times", density_times, "Comma-separated Omega*t values");
    density_cmd->add_option("--range", density_range, "x1 and x2 range as min:max");
    density_cmd->add_option("--res", density_res, "Grid resolution per axis");

    auto* general_cmd = app.add_subcommand("general-check",
                                           "Constraint-drift and dual-path reduction report");
    ScenarioFlags general_flags;
    general_flags.attach(general_cmd);
    int periods = 100;
    bool corrupt_seed = false;
    general_cmd->add_option("--periods", periods, "Number of drive periods");
    general_cmd->add_flag("--corrupt-seed", corrupt_seed, "")->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (*chart_cmd) return run_stability_chart(opt, a_range, b_range, chart_res);
        if (*line_cmd) return run_mode_line(opt, g_range, line_samples, line_ratio);
        if (*entropy_cmd) return run_entropy(opt, entropy_flags, t_max, entropy_samples);
        if (*wigner_cmd)
            return run_wigner(opt, wigner_flags, wigner_times, wigner_range, wigner_res);
        if (*density_cmd)
            return run_density(opt, density_flags, density_times, density_range, density_res);
        if (*general_cmd) return run_general_check(opt, general_flags, periods, corrupt_seed);
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
