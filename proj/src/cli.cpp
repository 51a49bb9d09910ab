#include "isosparse/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "isosparse/experiments.hpp"
#include "isosparse/io.hpp"
#include "isosparse/threshold.hpp"

namespace isosparse {

namespace {

/// Thrown for arguments that parse but violate a precondition.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string summary_path(const std::string &path) {
    const auto slash = path.find_last_of('/');
    const auto dot = path.rfind('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + ".summary.csv";
    return path.substr(0, dot) + ".summary" + path.substr(dot);
}

void write_csv_file(const std::string &path, const ExperimentResult &record, const Table &table) {
    std::ostringstream os;
    write_result_csv(os, record, table);
    const auto text = os.str();
    write_file(path, {reinterpret_cast<const std::uint8_t *>(text.data()), text.size()});
}

/// Raw rows to `path`, aggregates next to it.
void save(const std::string &path, const ExperimentResult &record, std::ostream &out) {
    if (path.empty())
        return;
    write_csv_file(path, record, record.rows);
    write_csv_file(summary_path(path), record, record.summary);
    out << fmt::format("wrote {} and {}\n", path, summary_path(path));
}

std::string join_values(const std::vector<std::size_t> &v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += fmt::format("{}{}", i ? ";" : "", v[i]);
    return s;
}

/// Stacks per-K records into one, with K as the leading column.
ExperimentResult stack_by_k(const std::vector<ExperimentResult> &parts, const std::vector<std::size_t> &ks) {
    ExperimentResult all;
    all.experiment = parts.front().experiment;
    all.seed = parts.front().seed;
    all.config = parts.front().config;
    for (auto &[key, value] : all.config)
        if (key == "K")
            value = join_values(ks);
    all.rows.columns = {"K"};
    all.summary.columns = {"K"};
    for (const auto &c : parts.front().rows.columns)
        all.rows.columns.push_back(c);
    for (const auto &c : parts.front().summary.columns)
        all.summary.columns.push_back(c);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const Cell k = static_cast<long long>(ks[i]);
        for (const auto &r : parts[i].rows.rows) {
            all.rows.rows.push_back({k});
            all.rows.rows.back().insert(all.rows.rows.back().end(), r.begin(), r.end());
        }
        for (const auto &r : parts[i].summary.rows) {
            all.summary.rows.push_back({k});
            all.summary.rows.back().insert(all.summary.rows.back().end(), r.begin(), r.end());
        }
    }
    return all;
}

std::string fmt_num(double v) { return fmt::format("{}", v + 0.0); }

// ---------------------------------------------------------------------------

struct ProxArgs {
    std::vector<double> z;
    std::string input;
    std::string format;
    double lambda = 1;
    double gamma = 0;
    std::vector<std::size_t> groups;
    std::string search = "linear";
    std::string output;
};

int cmd_prox(const ProxArgs &a, std::ostream &out) {
    if (!a.z.empty() && !a.input.empty())
        throw UsageError("give either --z or --input, not both");
    std::vector<double> z = a.z;
    if (!a.input.empty())
        z = read_signal(a.input, a.format.empty() ? format_from_extension(a.input) : parse_signal_format(a.format));
    if (z.empty())
        throw UsageError("no input vector (use --z or --input)");
    if (!(a.lambda >= 0) || !(a.gamma >= 0))
        throw UsageError("lambda and gamma must be nonnegative");
    if (!(a.lambda * a.gamma < 1))
        throw UsageError(fmt::format("lambda * gamma = {} must be < 1", a.lambda * a.gamma));
    GroupLayout layout = GroupLayout::single(z.size());
    if (!a.groups.empty()) {
        if (std::accumulate(a.groups.begin(), a.groups.end(), std::size_t{0}) != z.size())
            throw UsageError("group sizes must add up to the input length");
        if (std::find(a.groups.begin(), a.groups.end(), std::size_t{0}) != a.groups.end())
            throw UsageError("group sizes must be positive");
        layout = GroupLayout::from_sizes(a.groups);
    }
    const auto search = a.search == "binary" ? SupportSearch::binary : SupportSearch::linear;
    const auto r = prox_full<double>(z, layout, ThresholdParams(a.lambda, a.gamma), search);

    std::string text;
    for (std::size_t i = 0; i < r.minimizer.size(); ++i)
        text += (i ? "," : "") + fmt_num(r.minimizer[i]);
    text += '\n';
    for (std::size_t g = 0; g < layout.size(); ++g)
        text += fmt::format("k={},h={}\n", r.support_counts[g], fmt_num(r.thresholds[g]));
    if (a.output.empty()) {
        out << text;
    } else {
        write_file(a.output, {reinterpret_cast<const std::uint8_t *>(text.data()), text.size()});
        out << fmt::format("wrote {}\n", a.output);
    }
    return exit_ok;
}

struct SweepArgs {
    std::vector<std::size_t> ks;
    std::size_t n = 10;
    double snr = 5;
    double lambda_factor = 0.5;
    std::size_t trials = 0;
    double sigma_min = 0.1;
    double sigma_max = 1.0;
    std::size_t sigma_points = 11;
};

SweepConfig sweep_config(const SweepArgs &a, std::size_t K, std::uint64_t seed, bool full) {
    SweepConfig cfg;
    cfg.n = a.n;
    cfg.K = K;
    cfg.input_snr_db = a.snr;
    cfg.lambda_factor = a.lambda_factor;
    cfg.trials = a.trials ? a.trials : (full ? 10000 : 1000);
    cfg.seed = seed;
    if (K == 0 || K > a.n)
        throw UsageError(fmt::format("K = {} must lie in [1, n = {}]", K, a.n));
    return cfg;
}

int cmd_sweep(const SweepArgs &a, std::uint64_t seed, bool full, const std::string &output, std::ostream &out) {
    std::vector<ExperimentResult> parts;
    std::vector<SweepCurve> curves;
    for (std::size_t K : a.ks)
        sweep_config(a, K, seed, full);
    for (std::size_t K : a.ks) {
        auto o = run_threshold_sweep(sweep_config(a, K, seed, full));
        out << fmt::format("K={} argmax lambda_gamma={} peak_gain_db={:.3f}\n", K, o.curve.best_product(),
                           o.curve.peak());
        parts.push_back(std::move(o.record));
    }
    save(output, stack_by_k(parts, a.ks), out);
    return exit_ok;
}

int cmd_scale_sweep(const SweepArgs &a, std::uint64_t seed, bool full, const std::string &output,
                    std::ostream &out) {
    if (!(a.sigma_min > 0 && a.sigma_max >= a.sigma_min) || a.sigma_points == 0)
        throw UsageError("need 0 < sigma-min <= sigma-max and at least one sigma point");
    std::vector<double> grid(a.sigma_points);
    for (std::size_t i = 0; i < grid.size(); ++i)
        grid[i] = a.sigma_points == 1 ? a.sigma_min
                                      : a.sigma_min * std::pow(a.sigma_max / a.sigma_min,
                                                               static_cast<double>(i) / (a.sigma_points - 1));
    for (std::size_t K : a.ks)
        sweep_config(a, K, seed, full);
    std::vector<ExperimentResult> parts;
    for (std::size_t K : a.ks) {
        auto o = run_scale_invariance_sweep(sweep_config(a, K, seed, full), grid);
        std::string argmaxes;
        for (const auto &c : o.curves)
            argmaxes += fmt::format(" {}", c.best_product());
        out << fmt::format("K={} drift={} argmax lambda_gamma per sigma:{}\n", K, o.argmax_drift(), argmaxes);
        parts.push_back(std::move(o.record));
    }
    save(output, stack_by_k(parts, a.ks), out);
    return exit_ok;
}

struct DenoiseArgs {
    double snr = 5;
    std::string noise = "pink";
    std::size_t max_iters = 300;
    double tol = 1e-4;
    std::string scene_wav;
};

int cmd_denoise(const DenoiseArgs &a, std::uint64_t seed, const std::string &output, std::ostream &out) {
    DenoiseConfig cfg;
    cfg.input_snr_db = a.snr;
    cfg.noise = a.noise == "white" ? NoiseKind::white : NoiseKind::pink;
    cfg.solver = {a.max_iters, a.tol, false};
    cfg.seed = seed;
    if (cfg.solver.max_iters == 0 || !(cfg.solver.tol > 0))
        throw UsageError("max-iters and tol must be positive");
    if (!a.scene_wav.empty()) {
        const auto scene = gen_tonal_scene(cfg.scene);
        double peak = 0;
        for (double v : scene.signal)
            peak = std::max(peak, std::abs(v));
        auto x = scene.signal;
        for (double &v : x)
            v *= 0.9 / peak;
        write_signal(a.scene_wav, x, SignalFormat::wav_pcm16, static_cast<std::uint32_t>(cfg.scene.fs));
    }
    const auto o = run_denoise_experiment(cfg);
    out << fmt::format("input snr {:.2f} dB\n", o.input_snr_db);
    for (const auto &m : o.methods)
        out << fmt::format("{:<9} lambda={:<12.6g} gamma={:<12.6g} output_snr_db={:.2f} silent_nonzeros={}\n",
                           m.name, m.lambda, m.gamma, m.output_snr_db, m.silent_nonzeros);
    save(output, o.record, out);
    return exit_ok;
}

struct DeconvArgs {
    std::vector<double> snr{5, 10, 15, 20};
    std::size_t trials = 0;
    std::size_t tuning_trials = 20;
    std::vector<std::string> methods{"proposed", "sgl", "ips"};
    bool redraw = false;
    std::size_t max_iters = 5000;
    double tol = 1e-8;
};

int cmd_deconv(const DeconvArgs &a, std::uint64_t seed, bool full, const std::string &output, std::ostream &out) {
    DeconvConfig cfg;
    cfg.snr_db = a.snr;
    cfg.trials = a.trials ? a.trials : (full ? 500 : 100);
    cfg.tuning_trials = a.tuning_trials;
    cfg.methods = a.methods;
    cfg.redraw_reflectivity = a.redraw;
    cfg.solver = {a.max_iters, a.tol, false};
    cfg.seed = seed;
    if (cfg.tuning_trials == 0 || cfg.solver.max_iters == 0 || !(cfg.solver.tol > 0))
        throw UsageError("tuning-trials, max-iters and tol must be positive");
    const auto o = run_deconv_experiment(cfg);
    out << "snr_db,method,lambda_factor,mean_srer_db,std_srer_db\n";
    for (const auto &s : o.stats)
        out << fmt::format("{},{},{:.4g},{:.2f},{:.2f}\n", s.snr_db, s.method, s.lambda_factor, s.mean_srer,
                           s.std_srer);
    save(output, o.record, out);
    return exit_ok;
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Group-sparse threshold operators, solvers and experiments", "isosparse"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);

    std::uint64_t seed = 42;
    bool full = false;
    std::string output;
    auto common = [&](CLI::App *sub, bool has_output = true) {
        sub->add_option("--seed", seed, "Master random seed")->capture_default_str();
        if (has_output)
            sub->add_option("-o,--output", output, "Raw rows CSV (aggregates go to <name>.summary.csv)");
    };

    ProxArgs prox;
    auto *p = app.add_subcommand("prox", "Apply the threshold to a vector");
    p->add_option("--z", prox.z, "Comma-separated input")->delimiter(',');
    p->add_option("--input", prox.input, "Read the input from a file");
    p->add_option("--format", prox.format, "csv, wav-pcm16 or f64-raw (default: from the extension)")
        ->check(CLI::IsMember({"csv", "wav", "wav-pcm16", "f64", "f64-raw"}));
    p->add_option("--lambda", prox.lambda)->required();
    p->add_option("--gamma", prox.gamma)->required();
    p->add_option("--groups", prox.groups, "Comma-separated group sizes (default: one group)")->delimiter(',');
    p->add_option("--search", prox.search)->check(CLI::IsMember({"linear", "binary"}))->capture_default_str();
    p->add_option("-o,--output", prox.output, "Write the result here instead of stdout");

    SweepArgs sweep;
    sweep.ks = {1, 2, 3, 4};
    auto *s = app.add_subcommand("sweep", "SNR gain against lambda * gamma for K nonzeros");
    common(s);
    s->add_option("--K", sweep.ks, "Comma-separated nonzero counts")->delimiter(',')->capture_default_str();
    s->add_option("--n", sweep.n)->capture_default_str();
    s->add_option("--snr", sweep.snr, "Input SNR in dB")->capture_default_str();
    s->add_option("--lambda-factor", sweep.lambda_factor, "lambda / sigma")->capture_default_str();
    s->add_option("--trials", sweep.trials, "Default 1000, or 10000 with --full");
    s->add_flag("--full", full, "Full-scale trial counts");

    SweepArgs scale;
    scale.ks = {1, 2};
    auto *sc = app.add_subcommand("scale-sweep", "Repeat the sweep over a range of noise levels");
    common(sc);
    sc->add_option("--K", scale.ks)->delimiter(',')->capture_default_str();
    sc->add_option("--n", scale.n)->capture_default_str();
    sc->add_option("--snr", scale.snr)->capture_default_str();
    sc->add_option("--lambda-factor", scale.lambda_factor)->capture_default_str();
    sc->add_option("--trials", scale.trials, "Default 1000, or 10000 with --full");
    sc->add_option("--sigma-min", scale.sigma_min)->capture_default_str();
    sc->add_option("--sigma-max", scale.sigma_max)->capture_default_str();
    sc->add_option("--sigma-points", scale.sigma_points)->capture_default_str();
    sc->add_flag("--full", full);

    DenoiseArgs den;
    auto *d = app.add_subcommand("denoise", "Denoise the synthetic tonal scene with every penalty");
    common(d);
    d->add_option("--snr", den.snr)->capture_default_str();
    d->add_option("--noise", den.noise)->check(CLI::IsMember({"pink", "white"}))->capture_default_str();
    d->add_option("--max-iters", den.max_iters)->capture_default_str();
    d->add_option("--tol", den.tol)->capture_default_str();
    d->add_option("--scene-wav", den.scene_wav, "Also write the clean scene as 16-bit WAV");

    DeconvArgs dec;
    auto *dc = app.add_subcommand("deconv", "Sparse deconvolution of Ricker-filtered spike trains");
    common(dc);
    dc->add_option("--snr", dec.snr)->delimiter(',')->capture_default_str();
    dc->add_option("--trials", dec.trials, "Default 100, or 500 with --full");
    dc->add_option("--tuning-trials", dec.tuning_trials)->capture_default_str();
    dc->add_option("--methods", dec.methods)
        ->delimiter(',')
        ->check(CLI::IsMember({"proposed", "sgl", "ips", "l1"}))
        ->capture_default_str();
    dc->add_flag("--redraw-reflectivity", dec.redraw, "New reflectivity per trial");
    dc->add_option("--max-iters", dec.max_iters)->capture_default_str();
    dc->add_option("--tol", dec.tol)->capture_default_str();
    dc->add_flag("--full", full);

    SelftestOptions st;
    std::string sabotage = "none";
    auto *t = app.add_subcommand("selftest", "Check the operators against the oracle and invariants");
    common(t, false);
    t->add_option("--cases", st.cases)->check(CLI::PositiveNumber)->capture_default_str();
    t->add_option("--sabotage", sabotage, "Inject a fault to exercise the checks")
        ->check(CLI::IsMember({"none", "h-offset"}))
        ->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (p->parsed())
            return cmd_prox(prox, out);
        if (s->parsed())
            return cmd_sweep(sweep, seed, full, output, out);
        if (sc->parsed())
            return cmd_scale_sweep(scale, seed, full, output, out);
        if (d->parsed())
            return cmd_denoise(den, seed, output, out);
        if (dc->parsed())
            return cmd_deconv(dec, seed, full, output, out);
        st.seed = seed;
        st.sabotage = sabotage == "h-offset" ? Sabotage::h_offset : Sabotage::none;
        return run_selftest(st, out);
    } catch (const UsageError &e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const ParseError &e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
}

} // namespace isosparse
