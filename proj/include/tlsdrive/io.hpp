#pragma once

#include <initializer_list>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tlsdrive/core.hpp"

namespace tls::io {

// Flat key/value text:
//   # comment
//   name      = fig1b
//   delta[]   = 50, 40
//   epsilon[] = 1, 1
//   theta[]   = 0, pi/3        (optional, zeros by default)
//   tau[]     = 0.0314, 0.0392 (or area[] = pi/2, pi/2 for E_n tau_n)
// Numbers accept a factor of pi: "pi", "2pi", "3*pi/4", "-pi/2".
struct Config {
    std::vector<DriveStep> steps;
    std::map<std::string, std::string> settings;  // scalar keys, verbatim

    PulseSequence sequence() const { return PulseSequence(steps); }
    // Scalar setting, or fallback when absent.
    std::string get(const std::string& key, const std::string& fallback = {}) const;
    double number(const std::string& key, double fallback) const;
};

// Throws Error(ParseError) with the offending line number.
Config parse_config(std::string_view text);
Config load_config(const std::string& path);
std::string format_config(const Config& config);

double parse_number(std::string_view text);

// 17 significant digits, round-trip exact.
std::string format_number(double value);

class CsvWriter {
public:
    CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header);
    CsvWriter(std::ostream& out, const std::vector<std::string>& header);

    void row(std::span<const double> values);
    void row(std::initializer_list<double> values) { row(std::span<const double>(values.begin(), values.size())); }

private:
    std::ostream& out_;
    std::size_t columns_;
};

}  // namespace tls::io
