#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "tlsdrive/io.hpp"

namespace tls::io {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

double plain_number(std::string_view s) {
    s = trim(s);
    if (s.empty()) throw Error(ErrorCode::ParseError, "empty number");
    if (s == "pi") return kPi;
    if (s.size() > 2 && s.substr(s.size() - 2) == "pi") return plain_number(s.substr(0, s.size() - 2)) * kPi;
    double v = 0.0;
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) throw Error(ErrorCode::ParseError, "bad number '" + std::string(s) + "'");
    return v;
}

double product(std::string_view s) {
    double v = 1.0;
    std::size_t start = 0;
    while (true) {
        const auto star = s.find('*', start);
        v *= plain_number(s.substr(start, star == std::string_view::npos ? star : star - start));
        if (star == std::string_view::npos) return v;
        start = star + 1;
    }
}

std::vector<double> number_list(std::string_view s, std::size_t line) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto item = trim(s.substr(start, comma == std::string_view::npos ? comma : comma - start));
        if (item.empty()) fail(line, "empty array entry");
        try {
            out.push_back(parse_number(item));
        } catch (const Error& e) {
            fail(line, e.what());
        }
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

double parse_number(std::string_view text) {
    text = trim(text);
    double sign = 1.0;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        if (text.front() == '-') sign = -1.0;
        text.remove_prefix(1);
    }
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return sign * product(text);
    const double den = product(text.substr(slash + 1));
    if (den == 0.0) throw Error(ErrorCode::ParseError, "division by zero");
    return sign * product(text.substr(0, slash)) / den;
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
    const auto it = settings.find(key);
    return it == settings.end() ? fallback : it->second;
}

double Config::number(const std::string& key, double fallback) const {
    const auto it = settings.find(key);
    return it == settings.end() ? fallback : parse_number(it->second);
}

Config parse_config(std::string_view text) {
    std::map<std::string, std::vector<double>> arrays;
    Config cfg;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        auto line = text.substr(start, end - start);
        start = end + 1;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(line_no, "expected key = value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) fail(line_no, "missing key");
        if (key.size() > 2 && key.substr(key.size() - 2) == "[]") {
            const std::string name(trim(key.substr(0, key.size() - 2)));
            if (arrays.count(name)) fail(line_no, "duplicate array '" + name + "'");
            arrays[name] = number_list(value, line_no);
        } else {
            cfg.settings[std::string(key)] = std::string(value);
        }
    }

    auto take = [&](const char* name, bool required) -> std::vector<double> {
        const auto it = arrays.find(name);
        if (it == arrays.end()) {
            if (required) throw Error(ErrorCode::ParseError, std::string("missing array ") + name + "[]");
            return {};
        }
        auto v = std::move(it->second);
        arrays.erase(it);
        return v;
    };
    const auto delta = take("delta", true);
    const auto epsilon = take("epsilon", true);
    auto theta = take("theta", false);
    const auto tau = take("tau", false);
    const auto area = take("area", false);
    if (!arrays.empty()) throw Error(ErrorCode::ParseError, "unknown array " + arrays.begin()->first + "[]");
    if (tau.empty() == area.empty()) throw Error(ErrorCode::ParseError, "give exactly one of tau[] and area[]");
    const std::size_t n = delta.size();
    if (theta.empty()) theta.assign(n, 0.0);
    const auto& dur = tau.empty() ? area : tau;
    if (epsilon.size() != n || theta.size() != n || dur.size() != n) {
        throw Error(ErrorCode::ParseError, "arrays must have equal length");
    }
    for (std::size_t i = 0; i < n; ++i) {
        DriveStep s{delta[i], epsilon[i], theta[i], dur[i]};
        if (tau.empty()) {
            const double E = s.energy();
            if (!(E > 0.0)) throw Error(ErrorCode::ParseError, "area[] needs a nonzero energy");
            s.tau = area[i] / E;
        }
        cfg.steps.push_back(s);
    }
    cfg.steps = validate(std::move(cfg.steps));
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string format_config(const Config& config) {
    std::string out;
    for (const auto& [k, v] : config.settings) out += k + " = " + v + "\n";
    auto array = [&](const char* name, auto field) {
        out += std::string(name) + "[] = ";
        for (std::size_t i = 0; i < config.steps.size(); ++i) {
            if (i) out += ", ";
            out += format_number(field(config.steps[i]));
        }
        out += "\n";
    };
    array("delta", [](const DriveStep& s) { return s.delta; });
    array("epsilon", [](const DriveStep& s) { return s.epsilon; });
    array("theta", [](const DriveStep& s) { return s.theta; });
    array("tau", [](const DriveStep& s) { return s.tau; });
    return out;
}

}  // namespace tls::io
