#include "mginf/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>

#include <CLI11.hpp>
#include <json.hpp>

#include "mginf/busy.hpp"
#include "mginf/csv.hpp"
#include "mginf/rates.hpp"
#include "mginf/sim.hpp"
#include "mginf/transient.hpp"

namespace mginf::cli {

namespace {

using nlohmann::json;

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

double parse_real(const std::string& text, const std::string& flag) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw UsageError(flag + ": '" + text + "' is not a number");
    }
    return v;
}

// `start:stop:step` or a single time point.
void expand_times(const std::string& spec, const std::string& flag, std::vector<double>& out) {
    const auto first = spec.find(':');
    if (first == std::string::npos) {
        out.push_back(parse_real(spec, flag));
        return;
    }
    const auto second = spec.find(':', first + 1);
    if (second == std::string::npos) {
        throw UsageError(flag + ": expected start:stop:step, got '" + spec + "'");
    }
    const double start = parse_real(spec.substr(0, first), flag);
    const double stop = parse_real(spec.substr(first + 1, second - first - 1), flag);
    const double step = parse_real(spec.substr(second + 1), flag);
    if (!(step > 0.0) || !(stop >= start)) {
        throw UsageError(flag + ": need step > 0 and stop >= start in '" + spec + "'");
    }
    const double count = std::floor((stop - start) / step + 1e-9) + 1.0;
    if (count > 1e7) {
        throw UsageError(flag + ": time grid '" + spec + "' has too many points");
    }
    for (long i = 0; i < static_cast<long>(count); ++i) {
        out.push_back(start + static_cast<double>(i) * step);
    }
}

std::vector<double> default_times(const QueueParams& params) {
    std::vector<double> t;
    expand_times("0:" + format_double(20.0 * params.service_mean()) + ":" + format_double(params.service_mean() / 10.0),
                 "--t", t);
    return t;
}

std::vector<double> times_for(const RunConfig& c, const QueueParams& params) {
    if (!c.times.empty()) {
        return c.times;
    }
    if (c.command == Command::simulate) {
        const double b = params.service_mean();
        return {b, 2.0 * b, 5.0 * b};
    }
    return default_times(params);
}

GridSpec grid_for(const RunConfig& c, const QueueParams& params) {
    const GridSpec d = default_grid(params);
    return {c.h.value_or(d.h), c.t_max.value_or(d.t_max)};
}

Execution exec_for(const RunConfig& c) {
    return c.serial ? Execution::serial : Execution::parallel;
}

QueueParams params_for(const RunConfig& c) {
    return QueueParams(c.lambda, parse_model(c.dist_spec));
}

std::string sidecar_path(const std::string& output) {
    std::filesystem::path p(output);
    std::filesystem::path side = p;
    side.replace_extension(".json");
    if (side == p) {
        side = p.string() + ".sidecar.json";
    }
    return side.string();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    os << contents;
    os.flush();
    if (!os) {
        throw IoError("failed writing '" + path + "'");
    }
}

json finite_or_null(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

json column_json(const std::vector<double>& values) {
    json a = json::array();
    for (double v : values) {
        a.push_back(finite_or_null(v));
    }
    return a;
}

void emit(const RunConfig& c, const CsvTable& table, json meta, std::ostream& out, std::ostream& err) {
    std::string main_text;
    std::string side_text;
    if (c.format == OutputFormat::csv) {
        std::ostringstream os;
        write_csv(os, table);
        main_text = os.str();
        side_text = meta.dump(2) + "\n";
    } else {
        json cols = json::object();
        for (std::size_t i = 0; i < table.header.size(); ++i) {
            cols[table.header[i]] = column_json(table.columns[i]);
        }
        meta["columns"] = std::move(cols);
        main_text = meta.dump(2) + "\n";
    }
    if (c.output_path.empty()) {
        out << main_text;
        if (!side_text.empty()) {
            err << side_text;
        }
        return;
    }
    write_file(c.output_path, main_text);
    if (!side_text.empty()) {
        write_file(sidecar_path(c.output_path), side_text);
    }
}

json base_meta(const RunConfig& c, const QueueParams& params) {
    return json{{"lambda", c.lambda},
                {"dist", to_string(params.service())},
                {"service_mean", params.service_mean()},
                {"rho", params.rho()}};
}

double mean_of(const std::vector<CycleSample>& cycles, double CycleSample::*field) {
    double s = 0.0;
    for (const auto& cs : cycles) {
        s += cs.*field;
    }
    return s / static_cast<double>(cycles.size());
}

double se_of(const std::vector<CycleSample>& cycles, double CycleSample::*field, double m) {
    double s = 0.0;
    for (const auto& cs : cycles) {
        const double d = cs.*field - m;
        s += d * d;
    }
    const double n = static_cast<double>(cycles.size());
    return n > 1 ? std::sqrt(s / (n - 1.0) / n) : 0.0;
}

json cycle_summary(const QueueParams& params, const std::vector<CycleSample>& cycles, const BusyTable& busy,
                   const RegenTable& regen) {
    const double busy_mean = mean_of(cycles, &CycleSample::busy_len);
    const double idle_mean = mean_of(cycles, &CycleSample::idle_len);
    const double cycle_mean = mean_of(cycles, &CycleSample::cycle_len);
    std::vector<double> busy_len(cycles.size()), cycle_len(cycles.size());
    for (std::size_t i = 0; i < cycles.size(); ++i) {
        busy_len[i] = cycles[i].busy_len;
        cycle_len[i] = cycles[i].cycle_len;
    }
    const double ks_busy = ks_statistic(busy_len, [&busy](double x) { return 1.0 - busy.g_tail.at(x); });
    const double ks_cycle = ks_statistic(cycle_len, [&regen](double x) { return 1.0 - regen.f_tail.at(x); });
    return json{{"cycles", cycles.size()},
                {"busy_mean", busy_mean},
                {"busy_mean_se", se_of(cycles, &CycleSample::busy_len, busy_mean)},
                {"busy_mean_closed", busy_mean_closed(params)},
                {"idle_mean", idle_mean},
                {"idle_mean_se", se_of(cycles, &CycleSample::idle_len, idle_mean)},
                {"cycle_mean", cycle_mean},
                {"cycle_mean_se", se_of(cycles, &CycleSample::cycle_len, cycle_mean)},
                {"cycle_mean_closed", cycle_mean_closed(params)},
                {"ks_busy", ks_busy},
                {"ks_cycle", ks_cycle},
                {"ks_critical_0_001", 1.95 / std::sqrt(static_cast<double>(cycles.size()))}};
}

json busy_meta(const BusyTable& busy, const RegenTable& regen, const QueueParams& params) {
    return json{{"N", busy.series_terms},
                {"truncation_bound", busy.truncation_bound},
                {"h", busy.g_tail.step},
                {"T_max", busy.g_tail.t_max()},
                {"mu", regen.mu},
                {"busy_mean", busy_mean_closed(params)},
                {"tail_correction", regen.tail_correction},
                {"tail_correction_error", regen.tail_correction_error},
                {"grid_error_note", busy.grid_error_note}};
}

void add_rate_meta(json& meta, const RateReport& r) {
    meta["regime"] = to_string(r.regime);
    meta["decay_rate"] = r.decay_rate;
    if (r.root) {
        meta["s1"] = r.root->s1;
        meta["s1_residual"] = r.root->residual;
        meta["s1_at_boundary"] = r.root->at_boundary;
    }
    if (r.alpha) {
        meta["alpha"] = *r.alpha;
        meta["t_asymptotic"] = r.t_asymptotic;
        meta["bound_regime_denominator"] = "alpha-1";
        meta["bound_regime_alpha_plus_1"] = column_json(r.bound_curve_printed);
    }
    meta["mu"] = r.mu;
    meta["condition5_sup"] = r.condition5.sup;
    meta["condition5_at_largest"] = finite_or_null(r.condition5.at_largest);
    meta["condition5_t_largest"] = finite_or_null(r.condition5.t_largest);
    meta["epsilon"] = r.epsilon;
    meta["fitted_slope"] = finite_or_null(r.fitted_slope);
    meta["series_terms"] = r.busy.series_terms;
    meta["truncation_bound"] = r.busy.truncation_bound;
    meta["h"] = r.busy.g_tail.step;
    meta["T_max"] = r.busy.g_tail.t_max();
    meta["tail_correction"] = r.regen.tail_correction;
    meta["tail_correction_error"] = r.regen.tail_correction_error;
}

int run_transient(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const QueueParams params = params_for(c);
    const auto times = times_for(c, params);
    const TransientCurve curve = transient_curve(params, times, exec_for(c));
    CsvTable t;
    t.add("t", curve.times);
    t.add("rho_t", curve.rho_t);
    t.add("phi_exact", curve.phi);
    t.add("phi_bound_eq1", curve.bound_eq1);
    json meta = base_meta(c, params);
    meta["c_rho"] = c_rho(params);
    meta["sup_truncation"] = sup_truncation(params.rho());
    emit(c, t, std::move(meta), out, err);
    return kOk;
}

int run_busy(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const QueueParams params = params_for(c);
    const GridSpec grid = grid_for(c, params);
    const BusyTable busy = stadje_tail(params, grid.h, grid.t_max, c.tol, exec_for(c));
    const RegenTable regen = regen_tail(params, busy, exec_for(c));
    std::vector<double> times(busy.g_tail.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        times[i] = busy.g_tail.time(i);
    }
    CsvTable t;
    t.add("t", std::move(times));
    t.add("g_tail", busy.g_tail.values);
    t.add("f_tail", regen.f_tail.values);
    t.add("V", regen.v_of_t.values);
    t.add("u", regen.u_of_t.values);
    json meta = busy_meta(busy, regen, params);
    meta.update(base_meta(c, params));
    emit(c, t, std::move(meta), out, err);
    return kOk;
}

int run_bounds(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const QueueParams params = params_for(c);
    const auto times = times_for(c, params);
    ReportOptions opts;
    opts.epsilon = c.epsilon;
    opts.grid = grid_for(c, params);
    opts.tol = c.tol;
    const RateReport r = rate_report(params, times, opts, exec_for(c));
    CsvTable t;
    t.add("t", r.times);
    t.add("phi_exact", r.exact_curve);
    t.add("bound_eq1", r.bound_eq1);
    t.add("bound_regime", r.bound_curve);
    t.add("ratio_u_over_V", r.u_over_v);
    t.add("ratio_V_halving", r.v_halving);
    json meta = base_meta(c, params);
    add_rate_meta(meta, r);
    emit(c, t, std::move(meta), out, err);
    return kOk;
}

int run_simulate(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const QueueParams params = params_for(c);
    const Execution exec = exec_for(c);
    const auto cycles = run_cycles(params, c.cycles, c.seed, exec);
    const GridSpec grid = grid_for(c, params);
    const BusyTable busy = stadje_tail(params, grid.h, grid.t_max, c.tol, exec);
    const RegenTable regen = regen_tail(params, busy, exec);

    json by_t = json::array();
    for (double t : times_for(c, params)) {
        const EmpiricalPhi e = empirical_phi(params, t, c.reps, c.seed, exec);
        by_t.push_back(json{{"t", t}, {"phi", e.phi}, {"standard_error", e.standard_error},
                            {"phi_exact", phi_exact(params, t)}});
    }
    std::vector<double> index(cycles.size()), busy_len(cycles.size()), idle(cycles.size()), len(cycles.size());
    for (std::size_t i = 0; i < cycles.size(); ++i) {
        index[i] = static_cast<double>(i);
        busy_len[i] = cycles[i].busy_len;
        idle[i] = cycles[i].idle_len;
        len[i] = cycles[i].cycle_len;
    }
    CsvTable t;
    t.add("index", std::move(index));
    t.add("busy_len", std::move(busy_len));
    t.add("idle_len", std::move(idle));
    t.add("cycle_len", std::move(len));

    json meta = cycle_summary(params, cycles, busy, regen);
    meta.update(base_meta(c, params));
    meta["seed"] = c.seed;
    meta["reps"] = c.reps;
    meta["phi_empirical_by_t"] = std::move(by_t);
    meta["truncation_bound"] = busy.truncation_bound;
    meta["h"] = busy.g_tail.step;
    emit(c, t, std::move(meta), out, err);
    return kOk;
}

int run_compare(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const QueueParams params = params_for(c);
    const Execution exec = exec_for(c);
    const auto times = times_for(c, params);
    ReportOptions opts;
    opts.epsilon = c.epsilon;
    opts.grid = grid_for(c, params);
    opts.tol = c.tol;
    opts.sim = SimOptions{c.reps, c.seed};
    const RateReport r = rate_report(params, times, opts, exec);
    const auto cycles = run_cycles(params, c.cycles, c.seed, exec);

    CsvTable t;
    t.add("t", r.times);
    t.add("phi_exact", r.exact_curve);
    t.add("phi_empirical", *r.empirical_curve);
    t.add("bound_eq1", r.bound_eq1);
    t.add("bound_regime", r.bound_curve);

    json meta = base_meta(c, params);
    add_rate_meta(meta, r);
    meta["busy_mean"] = busy_mean_closed(params);
    meta["phi_empirical_se"] = r.empirical_standard_error;
    meta["seed"] = c.seed;
    meta["reps"] = c.reps;
    meta["simulation"] = cycle_summary(params, cycles, r.busy, r.regen);
    emit(c, t, std::move(meta), out, err);
    return kOk;
}

}  // namespace

std::string usage() {
    return "usage: mginf <transient|busy|bounds|simulate|compare> --lambda L --dist SPEC [options]\n"
           "  SPEC: exp:rate=R | hyperexp:w=W1,W2;rates=R1,R2 | erlang:k=K,rate=R |\n"
           "        lomax:alpha=A,scale=S | weibull:shape=K,scale=S\n"
           "  exit codes: 0 ok, 2 invalid input, 3 numerical certificate failure, 4 I/O error\n";
}

RunConfig parse_args(const std::vector<std::string>& args) {
    CLI::App app{"M/G/inf transient law, busy period and convergence-rate toolkit", "mginf"};
    app.set_help_flag("--help", "print usage");
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig c;
    std::string format = "csv";
    std::vector<std::string> t_specs;
    std::vector<double> t_points;
    long long reps = static_cast<long long>(c.reps);
    long long cycles = static_cast<long long>(c.cycles);
    double h = 0.0, t_max = 0.0;

    app.add_option("--lambda", c.lambda, "Poisson arrival rate")->required();
    app.add_option("--dist", c.dist_spec, "service-time law")->required();
    app.add_option("--seed", c.seed, "64-bit simulation seed");
    app.add_option("--output", c.output_path, "output path (sidecar JSON next to it)");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    auto* h_opt = app.add_option("--h", h, "convolution grid step");
    auto* tmax_opt = app.add_option("--tmax", t_max, "convolution grid horizon");
    app.add_option("--tol", c.tol, "busy-period series truncation tolerance");
    app.add_option("--t", t_specs, "time grid start:stop:step or a single time (repeatable)");
    app.add_option("--t-point", t_points, "extra time point (repeatable)");
    app.add_option("--reps", reps, "replications per time point");
    app.add_option("--cycles", cycles, "simulated regeneration cycles");
    app.add_option("--epsilon", c.epsilon, "epsilon of the heavy-tail bound");
    app.add_option("--threads", c.threads, "OpenMP threads (0: runtime default)");
    app.add_flag("--serial", c.serial, "use the serial reference kernels");

    const std::pair<const char*, Command> commands[] = {
        {"transient", Command::transient}, {"busy", Command::busy},         {"bounds", Command::bounds},
        {"simulate", Command::simulate},   {"compare", Command::compare},
    };
    for (const auto& [name, cmd] : commands) {
        app.add_subcommand(name)->callback([&c, cmd = cmd] { c.command = cmd; });
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    c.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
    if (!(c.lambda > 0.0) || !std::isfinite(c.lambda)) {
        throw UsageError("--lambda must be positive");
    }
    if (reps <= 0) {
        throw UsageError("--reps must be a positive integer");
    }
    if (cycles <= 0) {
        throw UsageError("--cycles must be a positive integer");
    }
    c.reps = static_cast<std::size_t>(reps);
    c.cycles = static_cast<std::size_t>(cycles);
    if (!(c.tol > 0.0)) {
        throw UsageError("--tol must be positive");
    }
    if (!(c.epsilon >= 0.0)) {
        throw UsageError("--epsilon must be nonnegative");
    }
    if (c.threads < 0) {
        throw UsageError("--threads must be nonnegative");
    }
    if (h_opt->count() > 0) {
        if (!(h > 0.0)) {
            throw UsageError("--h must be positive");
        }
        c.h = h;
    }
    if (tmax_opt->count() > 0) {
        c.t_max = t_max;
    }
    for (const auto& spec : t_specs) {
        expand_times(spec, "--t", c.times);
    }
    c.times.insert(c.times.end(), t_points.begin(), t_points.end());
    for (double t : c.times) {
        if (!(t >= 0.0) || !std::isfinite(t)) {
            throw UsageError("--t: time points must be finite and nonnegative");
        }
    }
    std::sort(c.times.begin(), c.times.end());
    c.times.erase(std::unique(c.times.begin(), c.times.end()), c.times.end());

    std::optional<QueueParams> params;
    try {
        params.emplace(c.lambda, parse_model(c.dist_spec));
    } catch (const std::exception& e) {
        throw UsageError(std::string("--dist: ") + e.what());
    }

    if (c.command != Command::transient) {
        const GridSpec grid = grid_for(c, *params);
        if (!(grid.h < grid.t_max)) {
            throw UsageError("--h must be smaller than --tmax");
        }
        if (grid.t_max < 10.0 * params->service_mean()) {
            throw UsageError("--tmax must be at least 10 mean service times");
        }
    }
    if (c.command == Command::bounds || c.command == Command::compare) {
        try {
            rate_regime(*params);
        } catch (const RegimeError& e) {
            throw UsageError(std::string("--dist: ") + e.what());
        }
    }
    if ((c.command == Command::simulate || c.command == Command::compare) && c.reps < 10000) {
        throw UsageError("--reps must be at least 10000 for empirical sup-distance estimates");
    }
    return c;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    set_thread_count(config.threads);
    switch (config.command) {
        case Command::transient:
            return run_transient(config, out, err);
        case Command::busy:
            return run_busy(config, out, err);
        case Command::bounds:
            return run_bounds(config, out, err);
        case Command::simulate:
            return run_simulate(config, out, err);
        case Command::compare:
            return run_compare(config, out, err);
    }
    return kValidation;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return run(parse_args(args), out, err);
    } catch (const CLI::CallForHelp&) {
        out << usage();
        return kOk;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n" << usage();
        return kValidation;
    } catch (const SeriesTruncationError& e) {
        err << "error: " << e.what() << " (required N = " << e.required_terms() << ")\n";
        return kCertificate;
    } catch (const RunawayCycleError& e) {
        err << "error: " << e.what() << "\n";
        return kCertificate;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    }
}

}  // namespace mginf::cli
