#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tlsdrive/io.hpp"

namespace tlsdrive {

struct PropagateArgs {
    double t0 = 0.0;
    double t1 = 0.0;
    std::size_t points = 1;
};

struct HeffArgs {
    std::optional<double> lambda;
    std::size_t m = 1;
    std::string branch = "principal";
};

struct SpectrumArgs {
    int lmin = -2;
    int lmax = 2;
    int periods = 0;  // 0 takes the K -> infinity limit
    int max_terms = 3;
    double floor = 0.02;
    std::string branch = "principal";
    double horizon_periods = 40.0;
};

struct ClassifyArgs {
    double tol = 1e-3;
    int max_index = 64;
    std::string branch = "principal";
};

// field is "<name><step>", e.g. "tau2" or "delta1"; steps are 1-based.
struct Axis {
    std::string field;
    double lo = 0.0;
    double hi = 0.0;
    std::size_t steps = 1;
};

struct ScanArgs {
    std::vector<std::string> vary;
    std::string metric = "eps_m";
    std::string model = "empirical";  // empirical | dominant | rabi
    std::string branch = "principal";
    std::optional<std::string> solve;  // "<field>=lo:hi", root of B_N(T) per cell
    double horizon_periods = 40.0;
    unsigned threads = 0;
};

struct BeatArgs {
    double resonant_tol = 0.01;
    double detuned_ratio = 10.0;
    double horizon = 0.0;  // 0: two beat periods
    int samples_per_period = 64;
    std::optional<std::string> envelope_csv;
};

Axis parse_axis(const std::string& text);

int cmd_propagate(const tls::io::Config& cfg, const PropagateArgs& args, std::ostream& out);
int cmd_heff(const tls::io::Config& cfg, const HeffArgs& args, std::ostream& out);
int cmd_spectrum(const tls::io::Config& cfg, const SpectrumArgs& args, std::ostream& out);
int cmd_classify(const tls::io::Config& cfg, const ClassifyArgs& args, std::ostream& out);
int cmd_scan(const tls::io::Config& cfg, const ScanArgs& args, std::ostream& out);
int cmd_beat(const tls::io::Config& cfg, const BeatArgs& args, std::ostream& out);

}  // namespace tlsdrive
