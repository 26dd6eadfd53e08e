#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <thread>

#include "tlsdrive/effective.hpp"
#include "tlsdrive/oracle.hpp"
#include "tlsdrive/phenomena.hpp"
#include "tlsdrive/propagator.hpp"
#include "tlsdrive/spectrum.hpp"

namespace tlsdrive {

using tls::io::format_number;

namespace {

void kv(std::ostream& out, const std::string& key, double value) { out << key << " = " << format_number(value) << '\n'; }

struct FieldRef {
    tls::FreeParameter kind;
    std::size_t step;  // 0-based
};

FieldRef parse_field(const std::string& name, std::size_t steps) {
    static const std::pair<const char*, tls::FreeParameter> kinds[] = {
        {"delta", tls::FreeParameter::Detuning},
        {"epsilon", tls::FreeParameter::Coupling},
        {"theta", tls::FreeParameter::Phase},
        {"tau", tls::FreeParameter::Durations},
    };
    for (const auto& [prefix, kind] : kinds) {
        const std::string p = prefix;
        if (name.rfind(p, 0) != 0) continue;
        const std::string digits = name.substr(p.size());
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) break;
        const std::size_t n = std::stoul(digits);
        if (n < 1 || n > steps) throw tls::Error(tls::ErrorCode::ParseError, "step out of range in '" + name + "'");
        return {kind, n - 1};
    }
    throw tls::Error(tls::ErrorCode::ParseError, "unknown field '" + name + "' (use delta<n>, epsilon<n>, theta<n>, tau<n>)");
}

double& field_of(tls::DriveStep& s, tls::FreeParameter kind) {
    switch (kind) {
        case tls::FreeParameter::Detuning: return s.delta;
        case tls::FreeParameter::Coupling: return s.epsilon;
        case tls::FreeParameter::Phase: return s.theta;
        case tls::FreeParameter::Durations: return s.tau;
    }
    return s.tau;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto k = s.find(sep, start);
        out.push_back(s.substr(start, k == std::string::npos ? k : k - start));
        if (k == std::string::npos) return out;
        start = k + 1;
    }
}

tls::SpectralModel scan_model(const tls::PulseSequence& seq, const std::string& model, tls::BranchConvention branch) {
    if (model == "empirical") return tls::two_step_empirical_model(seq, branch);
    if (model == "rabi") return tls::rabi_model(seq, branch);
    if (model == "dominant") return tls::dominant_model(tls::fourier_limit(seq, {}, branch));
    throw tls::Error(tls::ErrorCode::ParseError, "unknown model '" + model + "'");
}

}  // namespace

Axis parse_axis(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw tls::Error(tls::ErrorCode::ParseError, "expected field=min:max[:steps]");
    Axis a;
    a.field = text.substr(0, eq);
    const auto parts = split(text.substr(eq + 1), ':');
    if (parts.size() < 2 || parts.size() > 3) throw tls::Error(tls::ErrorCode::ParseError, "expected min:max[:steps]");
    a.lo = tls::io::parse_number(parts[0]);
    a.hi = tls::io::parse_number(parts[1]);
    if (parts.size() == 3) {
        const double n = tls::io::parse_number(parts[2]);
        if (!(n >= 1.0) || n != std::floor(n)) throw tls::Error(tls::ErrorCode::ParseError, "steps must be a positive integer");
        a.steps = static_cast<std::size_t>(n);
    }
    return a;
}

int cmd_propagate(const tls::io::Config& cfg, const PropagateArgs& args, std::ostream& out) {
    if (args.points < 1) throw tls::Error(tls::ErrorCode::ParseError, "need at least one time point");
    const tls::Evolver ev(cfg.sequence());
    tls::io::CsvWriter csv(out, {"t", "P12", "A", "B", "C", "D"});
    const auto times = args.points == 1 ? std::vector<double>{args.t0} : tls::linspace(args.t0, args.t1, args.points);
    for (double t : times) {
        const auto u = ev.evolve(t);
        csv.row({t, u.transition(), u.A, u.B, u.C, u.D});
    }
    return 0;
}

int cmd_heff(const tls::io::Config& cfg, const HeffArgs& args, std::ostream& out) {
    const auto seq = cfg.sequence();
    const auto branch = tls::parse_branch(args.branch);
    const auto used = args.lambda ? tls::jump_sequence(seq, *args.lambda, args.m) : seq;
    const auto h = tls::effective_hamiltonian(used, branch);
    kv(out, "delta_eff", h.delta);
    kv(out, "epsilon_eff", h.epsilon);
    kv(out, "theta_eff", h.theta);
    kv(out, "omega_eff", h.omega());
    kv(out, "Theta", h.omega() * h.period);
    kv(out, "period", h.period);
    out << "flipped = " << (h.flipped ? 1 : 0) << '\n';
    const auto [q1, q2] = tls::quasienergies(used);
    kv(out, "quasienergy_1", q1);
    kv(out, "quasienergy_2", q2);
    return 0;
}

int cmd_spectrum(const tls::io::Config& cfg, const SpectrumArgs& args, std::ostream& out) {
    if (args.lmin > args.lmax) throw tls::Error(tls::ErrorCode::ParseError, "lmin must not exceed lmax");
    const auto seq = cfg.sequence();
    const auto branch = tls::parse_branch(args.branch);
    const tls::LRange range{args.lmin, args.lmax};
    const auto spec =
        args.periods > 0 ? tls::fourier_numeric(seq, range, args.periods, branch) : tls::fourier_limit(seq, range, branch);
    const auto model = tls::dominant_model(spec, args.max_terms, args.floor);
    const double horizon = args.horizon_periods * seq.period();
    const auto err = tls::model_error(seq, model, horizon);

    out << "kind,family,index,frequency,amplitude,phase\n";
    auto row = [&](const char* kind, const tls::SpectralComponent& c) {
        out << kind << ',' << tls::to_string(c.family) << ',' << c.index << ',' << format_number(c.frequency) << ','
            << format_number(c.amplitude) << ',' << format_number(c.phase) << '\n';
    };
    out << "component,offset,0,0," << format_number(spec.offset) << ",0\n";
    for (const auto& c : spec.components) row("component", c);
    for (const auto& c : model.components) row("model", c);
    out << "eps_m,other,0," << format_number(horizon) << ',' << format_number(err.value) << ",0\n";
    return 0;
}

int cmd_classify(const tls::io::Config& cfg, const ClassifyArgs& args, std::ostream& out) {
    tls::ClassifyOptions o;
    o.tol = args.tol;
    o.max_index = args.max_index;
    o.branch = tls::parse_branch(args.branch);
    const auto r = tls::classify(cfg.sequence(), o);
    out << r.to_text();
    out << "theta " << format_number(r.theta) << '\n';
    return 0;
}

int cmd_scan(const tls::io::Config& cfg, const ScanArgs& args, std::ostream& out) {
    if (args.vary.empty() || args.vary.size() > 2) throw tls::Error(tls::ErrorCode::ParseError, "give one or two --vary axes");
    const std::size_t nsteps = cfg.steps.size();
    std::vector<Axis> axes;
    std::vector<FieldRef> refs;
    for (const auto& v : args.vary) {
        axes.push_back(parse_axis(v));
        refs.push_back(parse_field(axes.back().field, nsteps));
    }
    std::optional<FieldRef> solve_ref;
    tls::Bracket bracket;
    std::string solve_name;
    if (args.solve) {
        const auto a = parse_axis(*args.solve);
        solve_name = a.field;
        solve_ref = parse_field(a.field, nsteps);
        bracket = {a.lo, a.hi};
    }
    if (args.metric != "eps_m" && args.metric != "omega_eff" && args.metric != "P12max") {
        throw tls::Error(tls::ErrorCode::ParseError, "unknown metric '" + args.metric + "'");
    }
    const auto branch = tls::parse_branch(args.branch);

    auto value = [](const Axis& a, std::size_t i) {
        return a.steps == 1 ? a.lo : a.lo + (a.hi - a.lo) * static_cast<double>(i) / static_cast<double>(a.steps - 1);
    };
    const std::size_t n0 = axes[0].steps, n1 = axes.size() > 1 ? axes[1].steps : 1;
    const std::size_t cells = n0 * n1;
    struct Cell {
        double solved = std::numeric_limits<double>::quiet_NaN();
        double metric = std::numeric_limits<double>::quiet_NaN();
        std::string error;
    };
    std::vector<Cell> results(cells);

    auto run = [&](std::size_t idx) {
        Cell& cell = results[idx];
        try {
            auto steps = cfg.steps;
            const std::size_t i = idx / n1, j = idx % n1;
            field_of(steps[refs[0].step], refs[0].kind) = value(axes[0], i);
            if (axes.size() > 1) field_of(steps[refs[1].step], refs[1].kind) = value(axes[1], j);
            tls::PulseSequence seq(steps);
            if (solve_ref) {
                seq = tls::design_manipulation(seq, tls::DesignTarget::CompleteTransition, solve_ref->kind, bracket,
                                               solve_ref->step);
                auto solved = seq[solve_ref->step];
                cell.solved = field_of(solved, solve_ref->kind);
            }
            const double horizon = args.horizon_periods * seq.period();
            if (args.metric == "omega_eff") {
                cell.metric = tls::effective_hamiltonian(seq, branch).omega();
            } else if (args.metric == "P12max") {
                const tls::Evolver ev(seq);
                const auto t = tls::linspace(0.0, horizon, static_cast<std::size_t>(args.horizon_periods * 64 * seq.size()) + 1);
                const auto p = ev.sample(t);
                cell.metric = *std::max_element(p.begin(), p.end());
            } else {
                cell.metric = tls::model_error(seq, scan_model(seq, args.model, branch), horizon).value;
            }
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
    };

    unsigned threads = args.threads ? args.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, cells));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t idx; (idx = next.fetch_add(1)) < cells;) run(idx);
        });
    }
    for (auto& t : pool) t.join();

    std::vector<std::string> header;
    for (const auto& a : axes) header.push_back(a.field);
    if (solve_ref) header.push_back(solve_name);
    header.push_back(args.metric);
    tls::io::CsvWriter csv(out, header);
    std::size_t failed = 0;
    for (std::size_t idx = 0; idx < cells; ++idx) {
        std::vector<double> row{value(axes[0], idx / n1)};
        if (axes.size() > 1) row.push_back(value(axes[1], idx % n1));
        if (solve_ref) row.push_back(results[idx].solved);
        row.push_back(results[idx].metric);
        csv.row(row);
        if (!results[idx].error.empty()) {
            if (failed++ < 5) std::cerr << "cell " << idx << ": " << results[idx].error << '\n';
        }
    }
    if (failed) std::cerr << failed << " of " << cells << " cells failed\n";
    return 0;
}

int cmd_beat(const tls::io::Config& cfg, const BeatArgs& args, std::ostream& out) {
    const auto seq = cfg.sequence();
    tls::BeatOptions o;
    o.resonant_tol = args.resonant_tol;
    o.detuned_ratio = args.detuned_ratio;
    const auto b = tls::beat_prediction(seq, o);
    out << "n1 = " << b.n1 << '\n';
    kv(out, "varpi1", b.varpi1);
    kv(out, "varpi1_prime", b.varpi1_prime);
    kv(out, "omega_b", b.omega_b);
    kv(out, "t_p", b.t_p);
    out << "beat = " << (b.is_beat() ? 1 : 0) << '\n';

    const double T = seq.period();
    const double horizon = args.horizon > 0.0 ? args.horizon : (b.omega_b > 0.0 ? 4.0 * tls::kPi / b.omega_b : 40.0 * T);
    kv(out, "eps_m", tls::model_error(seq, b.as_model(), horizon).value);

    const double dt = T / std::max(args.samples_per_period, 4);
    const auto n = static_cast<std::size_t>(horizon / dt) + 1;
    const auto t = tls::linspace(0.0, dt * static_cast<double>(n - 1), n);
    const auto p = tls::Evolver(seq).sample(t);
    try {
        const auto env = tls::oracle::envelope_extract(p, 0.0, dt);
        kv(out, "omega_b_measured", env.omega_b);
        kv(out, "envelope_residual", env.residual);
        if (seq.size() == 2) {
            const auto ph = tls::phase_from_beat(env.omega_b, seq, 0.02);
            kv(out, "phase_difference", ph.difference);
        }
    } catch (const tls::Error& e) {
        out << "envelope = " << e.what() << '\n';
    }
    if (args.envelope_csv) {
        std::ofstream f(*args.envelope_csv);
        if (!f) throw tls::Error(tls::ErrorCode::ParseError, "cannot write " + *args.envelope_csv);
        tls::io::CsvWriter csv(f, {"t", "P12", "beat_model"});
        for (std::size_t i = 0; i < n; ++i) csv.row({t[i], p[i], b(t[i])});
    }
    return 0;
}

}  // namespace tlsdrive
