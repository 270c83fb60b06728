#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "padicqm/measurement.hpp"

namespace padicqm {

/// Config-file or invariant violation (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical contract violation, e.g. norm drift beyond tolerance (CLI exit
/// code 3).
struct ContractError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ScenarioKind { TwoSlit, Ctqw, Collapse, Spectrum };

struct ScanSpec {
    double time;
    int scale;
    Rational center;
};

/// Flat key=value scenario configuration; unknown keys are errors and every
/// invariant violation names the offending field.
struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::TwoSlit;

    int p = 3;
    int R = 1;
    int K = 3;
    double alpha = 1.0;
    double m_p = 0.5;
    double m_inf = 0.5;
    double omega = 1.0;
    std::uint64_t seed = 12345;

    // two-slit / collapse
    Rational s = Rational(1);
    int L = 2;
    double sigma = 0.5;
    std::vector<double> times = {0.0, 0.5, 1.0};
    double real_extent = 30.0;
    double real_spacing = 0.01;
    int quad_refine = -1;  // -1: default K+4

    // ctqw
    std::string matrix_path;
    std::string matrix_format = "dense";  // dense | edges
    double gamma = 1.0;
    int level = 3;
    std::vector<std::int64_t> sites;  // empty: 0..N-1
    std::int64_t start_site = 0;

    // collapse
    std::vector<ScanSpec> scans;

    /// Parses a flat key=value file ('#' comments); throws ConfigError on
    /// unknown keys or malformed values.
    static ScenarioConfig parse(ScenarioKind kind, const std::string& path);
    /// Checks every invariant, naming the violated field in the message.
    void validate() const;

    int refinement() const { return quad_refine < 0 ? K + 4 : quad_refine; }
    /// Resolved key=value lines for output-file header comments.
    std::vector<std::string> resolved() const;
};

/// Scenario runners. Each writes CSV outputs (with the resolved config as a
/// header comment block) into out_dir; ContractError signals a numerical
/// contract violation.
void run_two_slit(const ScenarioConfig& cfg, const std::string& out_dir);
void run_ctqw(const ScenarioConfig& cfg, const std::string& out_dir);
void run_collapse(const ScenarioConfig& cfg, const std::string& out_dir);
void run_spectrum(const ScenarioConfig& cfg, const std::string& out_dir);

/// Dispatch on the scenario kind.
void run_scenario(const ScenarioConfig& cfg, const std::string& out_dir);

/// Normalized two-slit initial data of the model: the p-adic two-ball state
/// A_p { Omega(p^L |x-s|) + Omega(p^L |x+s|) } in spectral form and the
/// two-Gaussian packet at +-s.
struct TwoSlitInitial {
    SpectralState padic;
    RealPacketState real;
    /// Indicator-expansion tail mass of the p-adic initial state.
    double tail_mass;
};
TwoSlitInitial make_two_slit_initial(const ScenarioConfig& cfg);

}  // namespace padicqm
