#pragma once

#include "toymodel/experiments.hpp"
#include "toymodel/newton.hpp"
#include "toymodel/schemes.hpp"
#include "toymodel/state.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace toymodel {

enum class Command { Simulate, Converge, Cost, Ensemble, Bias };

[[nodiscard]] std::string_view to_string(Command command) noexcept;

enum class OutputFormat { Csv, Json };

/// Bad command line or configuration; the message names the offending key.
class UsageError : public std::invalid_argument {
public:
    explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

/// Fully validated run configuration. Optional fields are resolved per command
/// by the accessors below.
struct RunConfig {
    Command command = Command::Simulate;
    std::vector<SchemeKind> schemes;          // empty: command default
    std::string ic = "shock";                 // simulate only: shock | random
    std::optional<std::size_t> lattice_size;  // N
    std::vector<double> dts;                  // empty: command default
    std::optional<double> t_max;
    double surrogate_dt = 1e-4;
    SampleWindow window = SampleWindow::StepStarts;
    std::uint64_t seed = 20170101;
    std::uint64_t sample = 0;                 // simulate --ic random: which ensemble member
    std::size_t samples = 100;
    std::vector<double> norm_exponents{4.0};
    Closure closure = Closure::Dirichlet;
    SolverConfig solver;
    std::optional<std::string> output;
    std::optional<OutputFormat> format;
    std::optional<std::size_t> record_stride;
    std::size_t threads = 0;

    [[nodiscard]] std::size_t resolved_lattice_size() const;
    [[nodiscard]] std::vector<SchemeKind> resolved_schemes() const;
    [[nodiscard]] std::vector<double> resolved_dts() const;
    [[nodiscard]] double resolved_t_max() const;
    [[nodiscard]] std::vector<NormExponent> exponents() const;
    /// 1 for single trajectories, 10 for ensemble and bias runs.
    [[nodiscard]] std::size_t resolved_record_stride() const;
    [[nodiscard]] OutputFormat resolved_format() const;
    /// Output path before the TOYMODEL_OUTPUT_DIR override.
    [[nodiscard]] std::string resolved_output() const;
    [[nodiscard]] EnsembleSpec ensemble_spec() const;

    /// `key = value` lines that parse back to this configuration.
    [[nodiscard]] std::string echo() const;
};

/// Parses `args` (the command first, then flags) on top of `file_text` in the
/// flat `key = value` format. Keys match the long flag names; `-` and `_` are
/// interchangeable. A `config` flag names a file to read when file_text is empty.
/// Throws UsageError.
[[nodiscard]] RunConfig parse_config(std::span<const std::string> args, std::string_view file_text = {});

/// Usage text listing commands and keys.
[[nodiscard]] std::string usage();

}  // namespace toymodel
