//------------------------------------------------------------------------------
// cli.cpp
//
// Subcommand plumbing: potential | simulate | sweep | compare | classify.
// All numeric output goes through the CSV writer (17 significant digits, LF),
// with a '# meta' header echoing the merged configuration so identical
// command lines produce byte-identical files.
//------------------------------------------------------------------------------

#include "volcano/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "volcano/csv.hpp"
#include "volcano/dynamics.hpp"
#include "volcano/experiments.hpp"
#include "volcano/integrator.hpp"
#include "volcano/model.hpp"

namespace volcano {

namespace {

constexpr int kExitOk        = 0;
constexpr int kExitUsage     = 1;
constexpr int kExitNumerical = 2;

struct RunConfig {
    // model parameters; either --ratio or the (--epsilon, --omega-drive) pair
    double omega2      = 1.0;
    double lambda      = 0.1;
    double ratio       = 3.0;
    double epsilon     = 0.0;
    double omega_drive = 0.0;
    double smallness   = 0.03; // reference mapping: eps omega^2 / Omega^2

    // coupling mode and initial conditions
    std::string mode     = "partial";
    double      gamma    = 8.699;
    double      x0       = 0.5;
    double      v0       = 0.0;
    double      w0       = 0.1;
    double      w0_rate  = 0.0;
    double      w0_accel = 0.01;

    // integrator
    std::string method        = "rk45";
    double      h             = 0.01;
    double      rel_tol       = 1e-9;
    double      abs_tol       = 1e-12;
    std::size_t stride        = 1;
    double      horizon       = 500.0;
    double      escape_factor = 3.0;

    // potential
    double xmin    = -2.0;
    double xmax    = 2.0;
    int    samples = 401;

    // sweep
    double w0_min     = 0.01;
    double w0_max     = 0.5;
    int    w0_steps   = 25;
    double bisect_tol = 1e-3;
    int    jobs       = 0; // 0 = runtime default

    // compare
    std::string system           = "classical";
    std::string cmp_mode         = "full"; // averaged side carries every term
    int         steps_per_period = 50;
    double      compare_horizon  = 0.0; // 0 = auto (three slow periods)

    std::string output = "-";
    std::string config_path; // optional key = value file, merged under flags
};

//------------------------------------------------------------------------------
// small helpers
//------------------------------------------------------------------------------

std::optional<CouplingMode> parse_mode(const std::string& s, double gamma) {
    if (s == "uncoupled")
        return CouplingMode{Coupling::Uncoupled, 0.0};
    if (s == "partial")
        return CouplingMode{Coupling::Partial, 0.0};
    if (s == "full")
        return CouplingMode{Coupling::Full, 0.0};
    if (s == "skewed")
        return CouplingMode{Coupling::SkewedPartial, gamma};
    return std::nullopt;
}

int usage_error(const std::string& msg) {
    std::cerr << "error: " << msg << '\n';
    return kExitUsage;
}

//------------------------------------------------------------------------------
// config file: flat "key = value" lines with '#' comments.  Keys are the
// value-taking long options of the active subcommand; underscores and hyphens
// are interchangeable and the provenance keys (version, command) are ignored,
// so a '# meta' header pastes straight back in.  File values
// fill in only where the command line stayed silent, and they land in the
// bound fields through each option's own conversion callback, so the merged
// result is indistinguishable from having typed the flags (CLI11's own
// set_config never fires for a subcommand: App::_process runs config files
// only on the parent-less top-level app).
//------------------------------------------------------------------------------

bool apply_config_file(CLI::App* cmd, const std::string& path, std::string& err) {
    std::ifstream f(path);
    if (!f) {
        err = "cannot open config file: " + path;
        return false;
    }
    // the drive specification is exclusive (--ratio vs the pair), so a command
    // line that picked either form silences all three drive keys in the file
    const bool drive_on_cmdline = cmd->count("--ratio") > 0 ||
                                  cmd->count("--epsilon") > 0 ||
                                  cmd->count("--omega-drive") > 0;
    std::vector<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const std::string at = path + ":" + std::to_string(lineno) + ": ";
        const std::string s  = CLI::detail::trim_copy(line);
        if (s.empty() || s[0] == '#')
            continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            err = at + "expected 'key = value'";
            return false;
        }
        std::string       key   = CLI::detail::trim_copy(s.substr(0, eq));
        const std::string value = CLI::detail::trim_copy(s.substr(eq + 1));
        std::replace(key.begin(), key.end(), '_', '-');
        if (key.empty() || value.empty()) {
            err = at + "expected 'key = value'";
            return false;
        }
        // the tool's own '# meta' echo leads with these provenance keys;
        // ignoring them keeps "strip '# meta ' and rerun" a valid round trip
        if (key == "version" || key == "command")
            continue;
        if (key == "config") {
            err = at + "config files cannot chain into other config files";
            return false;
        }
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
            err = at + "duplicate key '" + key + "'";
            return false;
        }
        seen.push_back(key);
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (opt == nullptr || opt->get_expected_min() == 0) {
            err = at + "unknown key '" + key + "' for subcommand '" +
                  cmd->get_name() + "'";
            return false;
        }
        const bool drive_key =
            key == "ratio" || key == "epsilon" || key == "omega-drive";
        if (drive_key && drive_on_cmdline)
            continue;
        if (opt->count() > 0)
            continue; // flags override file values
        try {
            opt->add_result(value);
            opt->run_callback();
        } catch (const CLI::Error& e) {
            err = at + "bad value for '" + key + "': " + e.what();
            return false;
        }
    }
    return true;
}

// resolved model setup for one invocation
struct ModelSetup {
    double          r = 0.0; // authoritative drive ratio
    bool            ratio_only = true;
    ModelParams     slow;    // epsilon = 0 placeholder; slow dynamics read eff
    EffectiveParams eff;     // built from the exact ratio
};

// applies the "exactly one of --ratio | (--epsilon, --omega-drive)" rule
std::optional<ModelSetup> resolve_model(const CLI::App* cmd, const RunConfig& rc,
                                        std::string& err) {
    const bool has_ratio = cmd->count("--ratio") > 0;
    const bool has_eps   = cmd->count("--epsilon") > 0;
    const bool has_om    = cmd->count("--omega-drive") > 0;

    if (has_ratio && (has_eps || has_om)) {
        err = "give either --ratio or the (--epsilon, --omega-drive) pair, not both";
        return std::nullopt;
    }
    if (!has_ratio && (has_eps != has_om)) {
        err = "--epsilon and --omega-drive must be supplied together";
        return std::nullopt;
    }
    if (!has_ratio && !has_eps) {
        err = "specify --ratio or the (--epsilon, --omega-drive) pair";
        return std::nullopt;
    }

    ModelSetup ms;
    if (has_ratio) {
        if (rc.ratio < 0.0) {
            err = "--ratio must be non-negative";
            return std::nullopt;
        }
        ms.r          = rc.ratio;
        ms.ratio_only = true;
    } else {
        if (rc.epsilon < 0.0 || rc.omega_drive <= 0.0) {
            err = "--epsilon must be >= 0 and --omega-drive > 0";
            return std::nullopt;
        }
        ms.r = rc.epsilon * rc.epsilon * rc.omega2 /
               (rc.omega_drive * rc.omega_drive);
        ms.ratio_only = false;
    }
    ms.slow = ModelParams{rc.omega2, rc.lambda, 0.0, 1.0, 1.0};
    ms.eff  = effective_coefficients(rc.omega2, rc.lambda, ms.r);
    if (!ms.slow.valid()) {
        err = "invalid model parameters (need omega2 > 0, lambda >= 0)";
        return std::nullopt;
    }
    return ms;
}

// driven parameters for the compare command
ModelParams driven_params(const RunConfig& rc, const ModelSetup& ms) {
    if (ms.ratio_only)
        return params_from_ratio(rc.omega2, rc.lambda, ms.r, rc.smallness);
    ModelParams p;
    p.omega_sq  = rc.omega2;
    p.lambda    = rc.lambda;
    p.epsilon   = rc.epsilon;
    p.big_omega = rc.omega_drive;
    return p;
}

int write_table(const RunConfig& rc, const std::vector<std::string>& meta,
                const std::vector<std::string>& columns,
                const std::vector<std::vector<double>>& rows,
                const std::vector<std::string>& trailing = {}) {
    if (rc.output == "-") {
        write_csv(std::cout, meta, columns, rows, trailing);
        return std::cout.good() ? kExitOk : usage_error("failed writing to stdout");
    }
    std::ofstream f(rc.output, std::ios::binary);
    if (!f)
        return usage_error("cannot open output path: " + rc.output);
    write_csv(f, meta, columns, rows, trailing);
    f.flush();
    if (!f.good())
        return usage_error("failed writing output file: " + rc.output);
    return kExitOk;
}

void meta_line(std::vector<std::string>& m, const std::string& key, double v) {
    m.push_back("# meta " + key + " = " + format_double(v));
}

void meta_line(std::vector<std::string>& m, const std::string& key,
               const std::string& v) {
    m.push_back("# meta " + key + " = " + v);
}

std::vector<std::string> meta_common(const char* command, const RunConfig& rc,
                                     const ModelSetup& ms) {
    std::vector<std::string> m;
    meta_line(m, "version", kVersion);
    meta_line(m, "command", command);
    meta_line(m, "omega2", rc.omega2);
    meta_line(m, "lambda", rc.lambda);
    // '# meta' holds exactly the ingestible config: echo the drive in the
    // form it was given and report the other form as a derived comment,
    // otherwise a pasted-back header would carry both and trip the
    // exactly-one-drive-spec rule
    if (ms.ratio_only) {
        meta_line(m, "ratio", ms.r);
    } else {
        meta_line(m, "epsilon", rc.epsilon);
        meta_line(m, "omega_drive", rc.omega_drive);
        m.push_back("# derived ratio = " + format_double(ms.r));
    }
    return m;
}

void meta_integrator(std::vector<std::string>& m, const RunConfig& rc) {
    meta_line(m, "method", rc.method);
    if (rc.method == "rk4")
        meta_line(m, "step", rc.h);
    meta_line(m, "rel_tol", rc.rel_tol);
    meta_line(m, "abs_tol", rc.abs_tol);
    meta_line(m, "stride", static_cast<double>(rc.stride));
    meta_line(m, "escape_factor", rc.escape_factor);
}

void meta_initial_conditions(std::vector<std::string>& m, const RunConfig& rc,
                             bool quantum) {
    meta_line(m, "x0", rc.x0);
    meta_line(m, "v0", rc.v0);
    if (quantum) {
        meta_line(m, "w0", rc.w0);
        meta_line(m, "w0_rate", rc.w0_rate);
        meta_line(m, "w0_accel", rc.w0_accel);
    }
}

std::string event_comment(const Event& ev, bool with_width) {
    std::string line = "# event " + event_kind_name(ev.kind) +
                       " t=" + format_double(ev.t) +
                       " x=" + format_double(ev.y[0]);
    if (with_width)
        line += " W=" + format_double(ev.y[2]);
    return line;
}

// VOLCANO_JOBS is the fallback when --jobs is absent
std::optional<int> resolve_jobs(const CLI::App* cmd, const RunConfig& rc,
                                std::string& err) {
    if (cmd->count("--jobs") > 0)
        return rc.jobs;
    const char* env = std::getenv("VOLCANO_JOBS");
    if (env == nullptr || *env == '\0')
        return 0;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0) {
        err = std::string("VOLCANO_JOBS is not a non-negative integer: ") + env;
        return std::nullopt;
    }
    return static_cast<int>(v);
}

//------------------------------------------------------------------------------
// subcommand handlers
//------------------------------------------------------------------------------

int cmd_potential(const CLI::App* cmd, const RunConfig& rc) {
    std::string err;
    const auto ms = resolve_model(cmd, rc, err);
    if (!ms)
        return usage_error(err);
    if (!(rc.xmax > rc.xmin))
        return usage_error("--xmax must exceed --xmin");
    if (rc.samples < 2)
        return usage_error("--samples must be at least 2");

    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(rc.samples));
    const double dx = (rc.xmax - rc.xmin) / static_cast<double>(rc.samples - 1);
    for (int i = 0; i < rc.samples; ++i) {
        const double x = rc.xmin + static_cast<double>(i) * dx;
        rows.push_back({x, potential_slow(x, ms->eff)});
    }

    auto meta = meta_common("potential", rc, *ms);
    meta_line(meta, "xmin", rc.xmin);
    meta_line(meta, "xmax", rc.xmax);
    meta_line(meta, "samples", static_cast<double>(rc.samples));
    return write_table(rc, meta, {"x", "V"}, rows);
}

int cmd_simulate(const CLI::App* cmd, const RunConfig& rc) {
    std::string err;
    const auto ms = resolve_model(cmd, rc, err);
    if (!ms)
        return usage_error(err);
    const auto mode = parse_mode(rc.mode, rc.gamma);
    if (!mode)
        return usage_error("unknown --mode (use uncoupled|partial|full|skewed)");
    if (rc.method != "rk45" && rc.method != "rk4")
        return usage_error("unknown --method (use rk45|rk4)");
    if (!(rc.horizon > 0.0))
        return usage_error("--horizon must be positive");

    IntegratorConfig cfg;
    cfg.method        = rc.method == "rk4" ? Method::RK4 : Method::DormandPrince;
    cfg.h             = rc.h;
    cfg.rel_tol       = rc.rel_tol;
    cfg.abs_tol       = rc.abs_tol;
    cfg.t_end         = rc.horizon;
    cfg.sample_stride = rc.stride;
    cfg.escape_threshold =
        ms->eff.volcano ? rc.escape_factor * ms->eff.turning_point : 0.0;
    cfg.watch_width = true;
    cfg.dim         = 5;

    const State y0{rc.x0, rc.v0, rc.w0, rc.w0_rate, rc.w0_accel};
    const ModelParams&     p   = ms->slow;
    const EffectiveParams& eff = ms->eff;
    const CouplingMode     cm  = *mode;
    auto f = [&p, &eff, &cm](const State& y, double, State& dy) {
        quantum_slow_deriv(y, eff, p, cm, dy);
    };
    const Trajectory tr = integrate(f, y0, 0.0, cfg);

    std::vector<std::vector<double>> rows;
    rows.reserve(tr.times.size());
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const State& y = tr.states[i];
        rows.push_back({tr.times[i], y[0], y[1], y[2], y[3], y[4],
                        energy_slow(y, eff)});
    }

    auto meta = meta_common("simulate", rc, *ms);
    meta_line(meta, "mode", rc.mode);
    if (mode->kind == Coupling::SkewedPartial)
        meta_line(meta, "gamma", rc.gamma);
    meta_initial_conditions(meta, rc, true);
    meta_line(meta, "horizon", rc.horizon);
    meta_integrator(meta, rc);

    std::vector<std::string> trailing;
    if (tr.event.kind != EventKind::None)
        trailing.push_back(event_comment(tr.event, true));

    const int wr = write_table(rc, meta, {"t", "x", "v", "W", "Wdot", "Wddot", "energy"},
                               rows, trailing);
    if (wr != kExitOk)
        return wr;
    if (tr.event.kind == EventKind::WidthNonPositive) {
        std::cerr << "closure breakdown (W <= 0) at t = "
                  << format_double(tr.event.t) << '\n';
        return kExitNumerical;
    }
    if (tr.event.kind == EventKind::StepFailure) {
        std::cerr << "adaptive step collapse at t = "
                  << format_double(tr.event.t) << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}

int cmd_classify(const CLI::App* cmd, const RunConfig& rc) {
    std::string err;
    const auto ms = resolve_model(cmd, rc, err);
    if (!ms)
        return usage_error(err);
    const auto mode = parse_mode(rc.mode, rc.gamma);
    if (!mode)
        return usage_error("unknown --mode (use uncoupled|partial|full|skewed)");
    if (!(rc.horizon > 0.0))
        return usage_error("--horizon must be positive");

    ClassifyOptions opt;
    opt.v0            = rc.v0;
    opt.w_rate0       = rc.w0_rate;
    opt.w_accel0      = rc.w0_accel;
    opt.escape_factor = rc.escape_factor;
    opt.rel_tol       = rc.rel_tol;
    opt.abs_tol       = rc.abs_tol;

    const OrbitClass oc =
        classify_orbit(rc.x0, rc.w0, *mode, ms->slow, ms->eff, rc.horizon, opt);
    // breakdown is one of the three classification outcomes, not a tool
    // failure, so every verdict exits 0
    switch (oc.outcome) {
        case OrbitClass::Outcome::Bounded:
            std::cout << "BOUNDED\n";
            break;
        case OrbitClass::Outcome::Escaped:
            std::cout << "ESCAPED\n";
            break;
        case OrbitClass::Outcome::ClosureBreakdown:
            std::cout << "CLOSURE_BREAKDOWN\n";
            break;
    }
    return kExitOk;
}

int cmd_sweep(const CLI::App* cmd, const RunConfig& rc) {
    std::string err;
    const auto ms = resolve_model(cmd, rc, err);
    if (!ms)
        return usage_error(err);
    const auto mode = parse_mode(rc.mode, rc.gamma);
    if (!mode)
        return usage_error("unknown --mode (use uncoupled|partial|full|skewed)");
    if (rc.w0_steps < 1)
        return usage_error("--w0-steps must be at least 1");
    if (rc.w0_steps > 1 && !(rc.w0_max > rc.w0_min))
        return usage_error("--w0-max must exceed --w0-min");
    if (!(rc.bisect_tol > 0.0))
        return usage_error("--bisect-tol must be positive");
    if (!(rc.horizon > 0.0))
        return usage_error("--horizon must be positive");
    const auto jobs = resolve_jobs(cmd, rc, err);
    if (!jobs)
        return usage_error(err);

    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(rc.w0_steps));
    if (rc.w0_steps == 1) {
        grid.push_back(rc.w0_min);
    } else {
        const double dw =
            (rc.w0_max - rc.w0_min) / static_cast<double>(rc.w0_steps - 1);
        for (int i = 0; i < rc.w0_steps; ++i)
            grid.push_back(rc.w0_min + static_cast<double>(i) * dw);
    }

    ClassifyOptions opt;
    opt.v0            = rc.v0;
    opt.w_rate0       = rc.w0_rate;
    opt.w_accel0      = rc.w0_accel;
    opt.escape_factor = rc.escape_factor;
    opt.rel_tol       = rc.rel_tol;
    opt.abs_tol       = rc.abs_tol;

    const SweepResult sr = boundary_curve(grid, *mode, ms->slow, ms->eff,
                                          rc.horizon, rc.bisect_tol, *jobs, opt);

    std::vector<std::vector<double>> rows;
    rows.reserve(sr.points.size());
    for (const auto& pt : sr.points)
        rows.push_back({pt.W0, pt.x_max, pt.bracket_invalid ? 1.0 : 0.0});

    // --jobs deliberately left out of the header: the result is identical for
    // any parallelism degree and the file must be byte-identical too
    auto meta = meta_common("sweep", rc, *ms);
    meta_line(meta, "mode", rc.mode);
    if (mode->kind == Coupling::SkewedPartial)
        meta_line(meta, "gamma", rc.gamma);
    meta_line(meta, "w0_min", rc.w0_min);
    meta_line(meta, "w0_max", rc.w0_max);
    meta_line(meta, "w0_steps", static_cast<double>(rc.w0_steps));
    meta_line(meta, "bisect_tol", rc.bisect_tol);
    meta_line(meta, "horizon", rc.horizon);
    meta_line(meta, "w0_accel", rc.w0_accel);
    meta_line(meta, "escape_factor", rc.escape_factor);
    meta_line(meta, "rel_tol", rc.rel_tol);
    meta_line(meta, "abs_tol", rc.abs_tol);
    return write_table(rc, meta, {"W0", "x_max", "flag"}, rows);
}

int cmd_compare(const CLI::App* cmd, const RunConfig& rc) {
    std::string err;
    const auto ms = resolve_model(cmd, rc, err);
    if (!ms)
        return usage_error(err);
    if (rc.system != "classical" && rc.system != "quantum")
        return usage_error("unknown --system (use classical|quantum)");
    const auto mode = parse_mode(rc.cmp_mode, rc.gamma);
    if (!mode)
        return usage_error("unknown --mode (use uncoupled|partial|full|skewed)");
    if (rc.steps_per_period < 4)
        return usage_error("--steps-per-period must be at least 4");
    if (ms->ratio_only && !(rc.smallness > 0.0))
        return usage_error("--smallness must be positive");

    const ModelParams p = driven_params(rc, *ms);
    const CompareSystem sys = rc.system == "quantum" ? CompareSystem::Quantum
                                                     : CompareSystem::Classical;

    // default horizon: three slow oscillation periods of the mean (capped so
    // near-barrier amplitudes with diverging periods stay tractable)
    double horizon = rc.compare_horizon;
    if (horizon <= 0.0) {
        const double ax = std::fabs(rc.x0);
        if (ms->eff.volcano && ax > 0.0 &&
            ax < ms->eff.turning_point * (1.0 - 1e-9))
            horizon = std::min(3.0 * period_quadrature_oracle(ax, ms->eff), 200.0);
        else
            horizon = 30.0;
    }

    CompareOptions opt;
    opt.steps_per_period = static_cast<std::size_t>(rc.steps_per_period);
    opt.mode             = *mode;
    opt.escape_factor    = rc.escape_factor;

    State ic{};
    ic[0] = rc.x0;
    ic[1] = rc.v0;
    if (sys == CompareSystem::Quantum) {
        ic[2] = rc.w0;
        ic[3] = rc.w0_rate;
        ic[4] = rc.w0_accel;
    }

    CompareResult res;
    try {
        res = compare_full_vs_averaged(p, ic, horizon, sys, opt);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }

    std::vector<std::vector<double>> rows;
    rows.reserve(res.t.size());
    for (std::size_t k = 0; k < res.t.size(); ++k)
        rows.push_back({res.t[k], res.slow[k], res.strobe[k],
                        res.fast_corrected[k], res.abs_err[k]});

    auto meta = meta_common("compare", rc, *ms);
    meta_line(meta, "system", rc.system);
    if (sys == CompareSystem::Quantum) {
        meta_line(meta, "mode", rc.cmp_mode);
        if (mode->kind == Coupling::SkewedPartial)
            meta_line(meta, "gamma", rc.gamma);
    }
    if (ms->ratio_only)
        meta_line(meta, "smallness", rc.smallness);
    meta_initial_conditions(meta, rc, sys == CompareSystem::Quantum);
    meta_line(meta, "horizon", horizon);
    meta_line(meta, "steps_per_period", static_cast<double>(rc.steps_per_period));
    meta_line(meta, "escape_factor", rc.escape_factor);

    std::vector<std::string> trailing;
    trailing.push_back("# summary max_dev=" + format_double(res.max_dev) +
                       " rms_dev=" + format_double(res.rms_dev));
    if (res.failed)
        trailing.push_back("# event " + event_kind_name(res.fail_kind) +
                           " t=" + format_double(res.fail_time));

    const int wr = write_table(rc, meta,
                               {"t", "slow", "strobe", "fast_corrected", "abs_err"},
                               rows, trailing);
    if (wr != kExitOk)
        return wr;
    if (res.failed && (res.fail_kind == EventKind::WidthNonPositive ||
                       res.fail_kind == EventKind::StepFailure)) {
        std::cerr << (res.fail_kind == EventKind::WidthNonPositive
                          ? "closure breakdown (W <= 0) at t = "
                          : "adaptive step collapse at t = ")
                  << format_double(res.fail_time) << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}

//------------------------------------------------------------------------------
// option registration
//------------------------------------------------------------------------------

void add_model_opts(CLI::App* cmd, RunConfig& rc) {
    cmd->add_option("--omega2", rc.omega2,
                    "squared natural frequency of the inverted harmonic part")
        ->capture_default_str();
    cmd->add_option("--lambda", rc.lambda, "quartic stiffness")
        ->capture_default_str();
    cmd->add_option("--ratio", rc.ratio,
                    "drive ratio r = eps^2 omega^2 / Omega^2");
    cmd->add_option("--epsilon", rc.epsilon,
                    "drive amplitude (requires --omega-drive)");
    cmd->add_option("--omega-drive", rc.omega_drive,
                    "drive angular frequency (requires --epsilon)");
    cmd->add_option("--config", rc.config_path,
                    "read options from a key = value file (flags override)");
}

void add_output_opt(CLI::App* cmd, RunConfig& rc) {
    cmd->add_option("-o,--output", rc.output, "output path, '-' for stdout")
        ->capture_default_str();
}

void add_mode_opts(CLI::App* cmd, RunConfig& rc) {
    cmd->add_option("--mode", rc.mode,
                    "width coupling: uncoupled|partial|full|skewed")
        ->capture_default_str();
    cmd->add_option("--gamma", rc.gamma,
                    "skewness coefficient S = gamma <x> (skewed mode)")
        ->capture_default_str();
}

void add_ic_opts(CLI::App* cmd, RunConfig& rc) {
    cmd->add_option("--x0", rc.x0, "initial mean position")->capture_default_str();
    cmd->add_option("--v0", rc.v0, "initial mean velocity")->capture_default_str();
    cmd->add_option("--w0", rc.w0, "initial width W(0)")->capture_default_str();
    cmd->add_option("--w0-rate", rc.w0_rate, "initial dW/dt")->capture_default_str();
    cmd->add_option("--w0-accel", rc.w0_accel, "initial d2W/dt2")
        ->capture_default_str();
}

void add_tolerance_opts(CLI::App* cmd, RunConfig& rc) {
    cmd->add_option("--rel-tol", rc.rel_tol, "adaptive relative tolerance")
        ->capture_default_str();
    cmd->add_option("--abs-tol", rc.abs_tol, "adaptive absolute tolerance")
        ->capture_default_str();
    cmd->add_option("--escape-factor", rc.escape_factor,
                    "escape threshold in units of the turning point")
        ->capture_default_str();
}

// every double option must parse to a finite value
bool all_finite(const RunConfig& rc) {
    const double vals[] = {rc.omega2,  rc.lambda,   rc.ratio,    rc.epsilon,
                           rc.omega_drive, rc.smallness, rc.gamma, rc.x0,
                           rc.v0,      rc.w0,       rc.w0_rate,  rc.w0_accel,
                           rc.h,       rc.rel_tol,  rc.abs_tol,  rc.horizon,
                           rc.escape_factor, rc.xmin, rc.xmax,   rc.w0_min,
                           rc.w0_max,  rc.bisect_tol, rc.compare_horizon};
    return std::all_of(std::begin(vals), std::end(vals),
                       [](double v) { return std::isfinite(v); });
}

} // namespace

//------------------------------------------------------------------------------
// entry point
//------------------------------------------------------------------------------

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"slow-dynamics toolkit for the periodically driven double well"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    RunConfig rc;

    CLI::App* c_pot = app.add_subcommand(
        "potential", "tabulate the effective slow potential V_s(x)");
    add_model_opts(c_pot, rc);
    add_output_opt(c_pot, rc);
    c_pot->add_option("--xmin", rc.xmin, "left edge")->capture_default_str();
    c_pot->add_option("--xmax", rc.xmax, "right edge")->capture_default_str();
    c_pot->add_option("--samples", rc.samples, "number of grid points")
        ->capture_default_str();

    CLI::App* c_sim = app.add_subcommand(
        "simulate", "integrate the averaged moment system and write a trajectory");
    add_model_opts(c_sim, rc);
    add_output_opt(c_sim, rc);
    add_mode_opts(c_sim, rc);
    add_ic_opts(c_sim, rc);
    add_tolerance_opts(c_sim, rc);
    c_sim->add_option("--method", rc.method, "integrator: rk45|rk4")
        ->capture_default_str();
    c_sim->add_option("--step", rc.h, "fixed step size (rk4)")
        ->capture_default_str();
    c_sim->add_option("--stride", rc.stride, "record every N-th accepted step")
        ->capture_default_str();
    c_sim->add_option("--horizon", rc.horizon, "integration end time")
        ->capture_default_str();

    CLI::App* c_cls = app.add_subcommand(
        "classify", "print BOUNDED / ESCAPED / CLOSURE_BREAKDOWN for one orbit");
    add_model_opts(c_cls, rc);
    add_mode_opts(c_cls, rc);
    add_ic_opts(c_cls, rc);
    add_tolerance_opts(c_cls, rc);
    c_cls->add_option("--horizon", rc.horizon, "classification horizon")
        ->capture_default_str();

    CLI::App* c_swp = app.add_subcommand(
        "sweep", "escape boundary x_max over a grid of initial widths");
    add_model_opts(c_swp, rc);
    add_output_opt(c_swp, rc);
    add_mode_opts(c_swp, rc);
    add_tolerance_opts(c_swp, rc);
    c_swp->add_option("--w0-min", rc.w0_min, "smallest initial width")
        ->capture_default_str();
    c_swp->add_option("--w0-max", rc.w0_max, "largest initial width")
        ->capture_default_str();
    c_swp->add_option("--w0-steps", rc.w0_steps, "number of grid points")
        ->capture_default_str();
    c_swp->add_option("--w0-rate", rc.w0_rate, "initial dW/dt")
        ->capture_default_str();
    c_swp->add_option("--w0-accel", rc.w0_accel, "initial d2W/dt2")
        ->capture_default_str();
    c_swp->add_option("--bisect-tol", rc.bisect_tol, "bisection bracket tolerance")
        ->capture_default_str();
    c_swp->add_option("--horizon", rc.horizon, "classification horizon")
        ->capture_default_str();
    c_swp->add_option("--jobs", rc.jobs,
                      "parallel workers (0 = runtime default; env VOLCANO_JOBS)")
        ->capture_default_str();

    CLI::App* c_cmp = app.add_subcommand(
        "compare", "driven system vs averaged system, sampled stroboscopically");
    add_model_opts(c_cmp, rc);
    add_output_opt(c_cmp, rc);
    c_cmp->add_option("--mode", rc.cmp_mode,
                      "width coupling of the averaged side (default full)")
        ->capture_default_str();
    c_cmp->add_option("--gamma", rc.gamma,
                      "skewness coefficient S = gamma <x> (skewed mode)")
        ->capture_default_str();
    add_ic_opts(c_cmp, rc);
    c_cmp->add_option("--system", rc.system, "classical|quantum")
        ->capture_default_str();
    c_cmp->add_option("--smallness", rc.smallness,
                      "eps omega^2 / Omega^2 of the reference drive mapping")
        ->capture_default_str();
    c_cmp->add_option("--steps-per-period", rc.steps_per_period,
                      "fixed RK4 steps per drive period")
        ->capture_default_str();
    c_cmp->add_option("--horizon", rc.compare_horizon,
                      "comparison window (0 = three slow periods)")
        ->capture_default_str();
    c_cmp->add_option("--escape-factor", rc.escape_factor,
                      "escape threshold in units of the turning point")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e); // prints help or the error message
        return code == 0 ? kExitOk : kExitUsage;
    }

    CLI::App* active = nullptr;
    for (CLI::App* cmd : {c_pot, c_sim, c_cls, c_swp, c_cmp})
        if (cmd->parsed())
            active = cmd;
    if (active != nullptr && active->count("--config") > 0) {
        std::string err;
        if (!apply_config_file(active, rc.config_path, err))
            return usage_error(err);
    }

    if (!all_finite(rc))
        return usage_error("all numeric options must be finite");

    try {
        if (c_pot->parsed())
            return cmd_potential(c_pot, rc);
        if (c_sim->parsed())
            return cmd_simulate(c_sim, rc);
        if (c_cls->parsed())
            return cmd_classify(c_cls, rc);
        if (c_swp->parsed())
            return cmd_sweep(c_swp, rc);
        if (c_cmp->parsed())
            return cmd_compare(c_cmp, rc);
    } catch (const std::invalid_argument& e) {
        return usage_error(e.what());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return usage_error("no subcommand given");
}

} // namespace volcano
