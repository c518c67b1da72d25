#include "toymodel/config.hpp"

#include "toymodel/ensemble.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace toymodel {

namespace {

struct CommandName {
    Command command;
    std::string_view name;
};

constexpr CommandName kCommands[] = {
    {Command::Simulate, "simulate"}, {Command::Converge, "converge"}, {Command::Cost, "cost"},
    {Command::Ensemble, "ensemble"}, {Command::Bias, "bias"},
};

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string canonical_key(std::string key)
{
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

// "--t_max=1" -> "--t-max=1"; values are left alone.
std::string canonical_flag(const std::string& token)
{
    if (token.size() < 3 || token.rfind("--", 0) != 0) return token;
    const auto eq = token.find('=');
    std::string name = canonical_key(token.substr(0, eq));
    return eq == std::string::npos ? name : name + token.substr(eq);
}

std::vector<std::string> file_tokens(std::string_view text)
{
    std::vector<std::string> tokens;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const std::string content = trim(line);
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos) {
            throw UsageError("config line " + std::to_string(line_no) + ": expected 'key = value', got '" +
                             content + "'");
        }
        const std::string key = canonical_key(trim(content.substr(0, eq)));
        if (key.empty()) throw UsageError("config line " + std::to_string(line_no) + ": empty key");
        if (key == "config") throw UsageError("config: nested config files are not supported");
        tokens.push_back("--" + key);
        tokens.push_back(trim(content.substr(eq + 1)));
    }
    return tokens;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected)
{
    throw UsageError(std::string(key) + ": expected " + std::string(expected) + ", got '" + std::string(value) +
                     "'");
}

double parse_real(std::string_view key, std::string_view text)
{
    const std::string s = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) {
        bad_value(key, text, "a finite real number");
    }
    return value;
}

double parse_positive(std::string_view key, std::string_view text)
{
    const double value = parse_real(key, text);
    if (!(value > 0.0)) bad_value(key, text, "a positive number");
    return value;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text)
{
    const std::string s = trim(text);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) bad_value(key, text, "a non-negative integer");
    return value;
}

std::size_t parse_count(std::string_view key, std::string_view text)
{
    const std::uint64_t value = parse_unsigned(key, text);
    if (value == 0) bad_value(key, text, "a positive integer");
    return static_cast<std::size_t>(value);
}

bool parse_bool(std::string_view key, std::string_view text)
{
    const std::string s = trim(text);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    bad_value(key, text, "true or false");
}

std::vector<std::string> split_list(std::string_view text)
{
    std::vector<std::string> items;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto end = comma == std::string_view::npos ? text.size() : comma;
        items.push_back(trim(text.substr(start, end - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return items;
}

std::string format_real(double value)
{
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::string join_reals(const std::vector<double>& values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        out += format_real(values[i]);
    }
    return out;
}

std::string_view window_name(SampleWindow window)
{
    return window == SampleWindow::StepStarts ? "step-starts" : "all-times";
}

}  // namespace

std::string_view to_string(Command command) noexcept
{
    for (const auto& c : kCommands) {
        if (c.command == command) return c.name;
    }
    return "?";
}

std::size_t RunConfig::resolved_lattice_size() const
{
    if (lattice_size) return *lattice_size;
    return command == Command::Ensemble || command == Command::Bias ? 40 : 100;
}

std::vector<SchemeKind> RunConfig::resolved_schemes() const
{
    if (!schemes.empty()) return schemes;
    switch (command) {
        case Command::Simulate:
        case Command::Ensemble: return {SchemeKind::Mass};
        default: return {kAllSchemes.begin(), kAllSchemes.end()};
    }
}

std::vector<double> RunConfig::resolved_dts() const
{
    if (!dts.empty()) return dts;
    if (command == Command::Converge || command == Command::Cost) return {0.1, 0.05, 0.025, 0.0125};
    return {0.1};
}

double RunConfig::resolved_t_max() const
{
    if (t_max) return *t_max;
    switch (command) {
        case Command::Simulate: return 5.0;
        case Command::Converge:
        case Command::Cost: return 1.0;
        default: return 1e4;
    }
}

std::vector<NormExponent> RunConfig::exponents() const
{
    std::vector<NormExponent> out;
    for (double s : norm_exponents) out.emplace_back(s);
    return out;
}

std::size_t RunConfig::resolved_record_stride() const
{
    if (record_stride) return *record_stride;
    return command == Command::Ensemble || command == Command::Bias ? 10 : 1;
}

OutputFormat RunConfig::resolved_format() const
{
    if (format) return *format;
    if (output && output->size() >= 5 && output->compare(output->size() - 5, 5, ".json") == 0) {
        return OutputFormat::Json;
    }
    return OutputFormat::Csv;
}

std::string RunConfig::resolved_output() const
{
    if (output) return *output;
    return std::string(to_string(command)) + (resolved_format() == OutputFormat::Json ? ".json" : ".csv");
}

EnsembleSpec RunConfig::ensemble_spec() const
{
    EnsembleSpec spec;
    spec.samples = samples;
    spec.lattice_size = resolved_lattice_size();
    spec.scheme = resolved_schemes().front();
    spec.grid = TimeGrid::from_horizon(resolved_dts().front(), resolved_t_max());
    spec.norm_exponents = exponents();
    spec.seed = seed;
    spec.record_stride = resolved_record_stride();
    return spec;
}

std::string RunConfig::echo() const
{
    std::ostringstream out;
    out << "# command: " << to_string(command) << '\n';
    std::string names;
    for (SchemeKind s : resolved_schemes()) names += (names.empty() ? "" : ",") + to_string(s);
    out << "schemes = " << names << '\n';
    if (command == Command::Simulate) out << "ic = " << ic << '\n';
    out << "N = " << resolved_lattice_size() << '\n';
    out << "dt = " << join_reals(resolved_dts()) << '\n';
    out << "t-max = " << format_real(resolved_t_max()) << '\n';
    out << "surrogate-dt = " << format_real(surrogate_dt) << '\n';
    out << "window = " << window_name(window) << '\n';
    out << "seed = " << seed << '\n';
    out << "sample = " << sample << '\n';
    out << "samples = " << samples << '\n';
    out << "s = " << join_reals(norm_exponents) << '\n';
    out << "closure = " << to_string(closure) << '\n';
    out << "abs-tol = " << format_real(solver.abs_tol) << '\n';
    out << "rel-tol = " << format_real(solver.rel_tol) << '\n';
    out << "step-tol = " << format_real(solver.step_tol) << '\n';
    out << "max-iters = " << solver.max_iters << '\n';
    out << "line-search = " << (solver.line_search ? "true" : "false") << '\n';
    out << "predictor = " << (solver.predictor == Predictor::RK2 ? "rk2" : "previous") << '\n';
    out << "projection-predictor = "
        << (solver.projection_predictor == ProjectionPredictor::BogackiShampine3 ? "bs3" : "rk4") << '\n';
    out << "projection-abs-tol = " << format_real(solver.projection_abs_tol) << '\n';
    out << "refresh-projection-gradients = " << (solver.refresh_projection_gradients ? "true" : "false") << '\n';
    out << "record-stride = " << resolved_record_stride() << '\n';
    out << "format = " << (resolved_format() == OutputFormat::Json ? "json" : "csv") << '\n';
    return out.str();
}

std::string usage()
{
    return "usage: toymodel <command> [--key value ...] [--config FILE]\n"
           "commands:\n"
           "  simulate   one trajectory, writes a diagnostics series\n"
           "  converge   pointwise error and invariant drift against a fine RK4 surrogate\n"
           "  cost       mean Newton iterations and function evaluations per step\n"
           "  ensemble   random-phase ensemble averages of h^s norms and drifts\n"
           "  bias       the ensemble repeated for every scheme\n"
           "keys (flags or `key = value` lines in the config file):\n"
           "  scheme|schemes   trapezoidal,midpoint,mass,energy,rk4,projection or all\n"
           "  ic               shock | random (simulate)\n"
           "  N                lattice size (100; 40 for ensemble and bias)\n"
           "  dt               step, or comma list for converge/cost (0.1,0.05,0.025,0.0125)\n"
           "  t-max            horizon (simulate 5, converge/cost 1, ensemble/bias 1e4)\n"
           "  surrogate-dt     reference RK4 step for converge (1e-4)\n"
           "  window           step-starts | all-times: times entering the error max (step-starts)\n"
           "  seed, sample     RNG seed (20170101) and ensemble member for --ic random (0)\n"
           "  samples|M        ensemble size (100)\n"
           "  s                norm exponents, comma list (4)\n"
           "  closure          dirichlet | periodic\n"
           "  abs-tol, rel-tol, step-tol, max-iters   Newton controls (1e-50, 1e-15, 1e-15, 50)\n"
           "  line-search, predictor (previous|rk2)\n"
           "  projection-predictor (rk4|bs3), projection-abs-tol (1e-12), refresh-projection-gradients\n"
           "  output, format (csv|json), record-stride (1; 10 for ensemble and bias), threads (0 = all cores)\n"
           "The TOYMODEL_OUTPUT_DIR environment variable prefixes relative output paths.\n"
           "exit codes: 0 ok, 2 usage, 3 numerical failure, 4 I/O\n";
}

RunConfig parse_config(std::span<const std::string> args, std::string_view file_text)
{
    if (args.empty()) throw UsageError("missing command");
    RunConfig cfg;
    const auto found = std::find_if(std::begin(kCommands), std::end(kCommands),
                                    [&](const CommandName& c) { return c.name == args.front(); });
    if (found == std::end(kCommands)) throw UsageError("unknown command '" + args.front() + "'");
    cfg.command = found->command;

    std::vector<std::string> flags;
    for (std::size_t i = 1; i < args.size(); ++i) flags.push_back(canonical_flag(args[i]));

    // A config file named on the command line, when no text was passed in.
    std::string loaded;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        std::string path;
        if (flags[i] == "--config" && i + 1 < flags.size()) {
            path = flags[i + 1];
        } else if (flags[i].rfind("--config=", 0) == 0) {
            path = flags[i].substr(9);
        } else {
            continue;
        }
        if (!file_text.empty()) throw UsageError("config: given both as text and as a file");
        std::ifstream in(path);
        if (!in) throw UsageError("config: cannot read '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        loaded = buf.str();
    }
    if (!loaded.empty()) file_text = loaded;

    std::vector<std::string> tokens = file_tokens(file_text);
    tokens.insert(tokens.end(), flags.begin(), flags.end());

    CLI::App app{"toymodel", "toymodel"};
    app.set_help_flag();
    std::map<std::string, std::string> values;
    auto opt = [&](const std::string& names, const std::string& key) {
        app.add_option(names, values[key])->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    };
    opt("--scheme,--schemes", "scheme");
    opt("--ic", "ic");
    opt("--N,--n,--lattice-size", "N");
    opt("--dt", "dt");
    opt("--t-max", "t-max");
    opt("--surrogate-dt", "surrogate-dt");
    opt("--window", "window");
    opt("--seed", "seed");
    opt("--sample", "sample");
    opt("--samples,--M", "samples");
    opt("--s,--norm-exponents", "s");
    opt("--closure", "closure");
    opt("--abs-tol", "abs-tol");
    opt("--rel-tol", "rel-tol");
    opt("--step-tol", "step-tol");
    opt("--max-iters", "max-iters");
    opt("--line-search", "line-search");
    opt("--predictor", "predictor");
    opt("--projection-predictor", "projection-predictor");
    opt("--projection-abs-tol", "projection-abs-tol");
    opt("--refresh-projection-gradients", "refresh-projection-gradients");
    opt("--output", "output");
    opt("--format", "format");
    opt("--record-stride", "record-stride");
    opt("--threads", "threads");
    opt("--config", "config");

    // CLI11 wants argv order reversed.
    std::vector<std::string> reversed(tokens.rbegin(), tokens.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    auto given = [&](const std::string& key) { return app.count("--" + key) > 0; };

    if (given("scheme")) {
        for (const auto& name : split_list(values["scheme"])) {
            if (name == "all") {
                cfg.schemes.insert(cfg.schemes.end(), kAllSchemes.begin(), kAllSchemes.end());
            } else if (auto s = parse_scheme(name)) {
                cfg.schemes.push_back(*s);
            } else {
                bad_value("scheme", name, "a scheme name");
            }
        }
    }
    if (given("ic")) {
        cfg.ic = trim(values["ic"]);
        if (cfg.ic != "shock" && cfg.ic != "random") bad_value("ic", cfg.ic, "shock or random");
    }
    if (given("N")) cfg.lattice_size = parse_count("N", values["N"]);
    if (given("dt")) {
        for (const auto& item : split_list(values["dt"])) cfg.dts.push_back(parse_positive("dt", item));
    }
    if (given("t-max")) cfg.t_max = parse_positive("t-max", values["t-max"]);
    if (given("surrogate-dt")) cfg.surrogate_dt = parse_positive("surrogate-dt", values["surrogate-dt"]);
    if (given("window")) {
        const std::string w = trim(values["window"]);
        if (w == "step-starts") {
            cfg.window = SampleWindow::StepStarts;
        } else if (w == "all-times") {
            cfg.window = SampleWindow::AllTimes;
        } else {
            bad_value("window", w, "step-starts or all-times");
        }
    }
    if (given("seed")) cfg.seed = parse_unsigned("seed", values["seed"]);
    if (given("sample")) cfg.sample = parse_unsigned("sample", values["sample"]);
    if (given("samples")) cfg.samples = parse_count("samples", values["samples"]);
    if (given("s")) {
        cfg.norm_exponents.clear();
        for (const auto& item : split_list(values["s"])) cfg.norm_exponents.push_back(parse_real("s", item));
        std::sort(cfg.norm_exponents.begin(), cfg.norm_exponents.end());
        cfg.norm_exponents.erase(std::unique(cfg.norm_exponents.begin(), cfg.norm_exponents.end()),
                                 cfg.norm_exponents.end());
    }
    if (given("closure")) {
        const std::string c = trim(values["closure"]);
        if (c == "dirichlet") {
            cfg.closure = Closure::Dirichlet;
        } else if (c == "periodic") {
            cfg.closure = Closure::Periodic;
        } else {
            bad_value("closure", c, "dirichlet or periodic");
        }
    }
    if (given("abs-tol")) cfg.solver.abs_tol = parse_positive("abs-tol", values["abs-tol"]);
    if (given("rel-tol")) cfg.solver.rel_tol = parse_positive("rel-tol", values["rel-tol"]);
    if (given("step-tol")) cfg.solver.step_tol = parse_positive("step-tol", values["step-tol"]);
    if (given("max-iters")) {
        const std::size_t n = parse_count("max-iters", values["max-iters"]);
        if (n > 10000) bad_value("max-iters", values["max-iters"], "at most 10000");
        cfg.solver.max_iters = static_cast<int>(n);
    }
    if (given("line-search")) cfg.solver.line_search = parse_bool("line-search", values["line-search"]);
    if (given("predictor")) {
        const std::string p = trim(values["predictor"]);
        if (p == "previous") {
            cfg.solver.predictor = Predictor::Previous;
        } else if (p == "rk2") {
            cfg.solver.predictor = Predictor::RK2;
        } else {
            bad_value("predictor", p, "previous or rk2");
        }
    }
    if (given("projection-predictor")) {
        const std::string p = trim(values["projection-predictor"]);
        if (p == "rk4") {
            cfg.solver.projection_predictor = ProjectionPredictor::RK4;
        } else if (p == "bs3") {
            cfg.solver.projection_predictor = ProjectionPredictor::BogackiShampine3;
        } else {
            bad_value("projection-predictor", p, "rk4 or bs3");
        }
    }
    if (given("projection-abs-tol")) {
        cfg.solver.projection_abs_tol = parse_positive("projection-abs-tol", values["projection-abs-tol"]);
    }
    if (given("refresh-projection-gradients")) {
        cfg.solver.refresh_projection_gradients =
            parse_bool("refresh-projection-gradients", values["refresh-projection-gradients"]);
    }
    if (given("output")) {
        cfg.output = trim(values["output"]);
        if (cfg.output->empty()) bad_value("output", "", "a path");
    }
    if (given("format")) {
        const std::string f = trim(values["format"]);
        if (f == "csv") {
            cfg.format = OutputFormat::Csv;
        } else if (f == "json") {
            cfg.format = OutputFormat::Json;
        } else {
            bad_value("format", f, "csv or json");
        }
    }
    if (given("record-stride")) cfg.record_stride = parse_count("record-stride", values["record-stride"]);
    if (given("threads")) cfg.threads = static_cast<std::size_t>(parse_unsigned("threads", values["threads"]));

    // Cross-key checks.
    const auto schemes = cfg.resolved_schemes();
    const auto dts = cfg.resolved_dts();
    const bool single = cfg.command == Command::Simulate || cfg.command == Command::Ensemble;
    if (single && schemes.size() != 1) {
        throw UsageError("scheme: " + std::string(to_string(cfg.command)) + " takes exactly one scheme");
    }
    if (cfg.command != Command::Converge && cfg.command != Command::Cost && dts.size() != 1) {
        throw UsageError("dt: " + std::string(to_string(cfg.command)) + " takes a single step");
    }
    try {
        for (double dt : dts) (void)aligned_steps(cfg.resolved_t_max(), dt);
        if (cfg.command == Command::Converge) {
            for (double dt : dts) (void)aligned_steps(dt, cfg.surrogate_dt);
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("dt: ") + e.what());
    }
    if (cfg.closure == Closure::Periodic && cfg.command != Command::Simulate) {
        throw UsageError("closure: periodic closure is only available for simulate");
    }
    return cfg;
}

}  // namespace toymodel
