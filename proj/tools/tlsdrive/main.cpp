#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "tlsdrive/core.hpp"

namespace {

constexpr int kInputError = 1;
constexpr int kNumericalError = 2;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact dynamics of periodically step-driven two-level systems"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::string config_path, out_path;
    auto with_io = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "Sequence definition file")->required();
        sub->add_option("-o,--out", out_path, "Write output here instead of stdout");
    };

    tlsdrive::PropagateArgs prop;
    auto* propagate = app.add_subcommand("propagate", "P12 and propagator coefficients on a time grid");
    with_io(propagate);
    propagate->add_option("--t0", prop.t0, "First time")->capture_default_str();
    propagate->add_option("--t1", prop.t1, "Last time")->capture_default_str();
    propagate->add_option("-n,--points", prop.points, "Number of grid points")->capture_default_str();

    tlsdrive::HeffArgs heff;
    double lambda = 0.0;
    auto* heff_cmd = app.add_subcommand("heff", "Effective Hamiltonian and quasienergies");
    with_io(heff_cmd);
    auto* lambda_opt = heff_cmd->add_option("--lambda", lambda, "Jump fraction of step m");
    heff_cmd->add_option("--m", heff.m, "Step entered part-way (1-based)")->capture_default_str();
    heff_cmd->add_option("--branch", heff.branch, "principal | positive-trace | adaptive")->capture_default_str();

    tlsdrive::SpectrumArgs spec;
    auto* spectrum = app.add_subcommand("spectrum", "Fourier components, reduced model and its error");
    with_io(spectrum);
    spectrum->add_option("--lmin", spec.lmin)->capture_default_str();
    spectrum->add_option("--lmax", spec.lmax)->capture_default_str();
    spectrum->add_option("--periods", spec.periods, "Periods K; 0 for the long-time limit")->capture_default_str();
    spectrum->add_option("--max-terms", spec.max_terms)->capture_default_str();
    spectrum->add_option("--floor", spec.floor, "Smallest amplitude kept in the model")->capture_default_str();
    spectrum->add_option("--branch", spec.branch)->capture_default_str();
    spectrum->add_option("--horizon", spec.horizon_periods, "Error horizon in periods")->capture_default_str();

    tlsdrive::ClassifyArgs cls;
    auto* classify = app.add_subcommand("classify", "Phenomena report, one flag per line");
    with_io(classify);
    classify->add_option("--tol", cls.tol)->capture_default_str();
    classify->add_option("--max-index", cls.max_index)->capture_default_str();
    classify->add_option("--branch", cls.branch)->capture_default_str();

    tlsdrive::ScanArgs scan;
    std::string solve;
    auto* scan_cmd = app.add_subcommand("scan", "Parameter grid, rows in grid order");
    with_io(scan_cmd);
    scan_cmd->add_option("--vary", scan.vary, "field=min:max:steps, e.g. delta2=20:60:41 (up to two)")->required();
    scan_cmd->add_option("--metric", scan.metric, "eps_m | omega_eff | P12max")->capture_default_str();
    scan_cmd->add_option("--model", scan.model, "Model for eps_m: empirical | dominant | rabi")->capture_default_str();
    scan_cmd->add_option("--branch", scan.branch)->capture_default_str();
    auto* solve_opt = scan_cmd->add_option("--solve", solve, "field=lo:hi solved per cell for Delta_eff = 0");
    scan_cmd->add_option("--horizon", scan.horizon_periods, "Horizon in periods")->capture_default_str();
    scan_cmd->add_option("-j,--threads", scan.threads, "Worker threads (0: all cores)")->capture_default_str();

    tlsdrive::BeatArgs beat;
    std::string envelope;
    auto* beat_cmd = app.add_subcommand("beat", "Beat prediction, measured envelope and phase estimate");
    with_io(beat_cmd);
    beat_cmd->add_option("--resonant-tol", beat.resonant_tol)->capture_default_str();
    beat_cmd->add_option("--detuned-ratio", beat.detuned_ratio)->capture_default_str();
    beat_cmd->add_option("--horizon", beat.horizon, "Simulated time; 0 for two beat periods")->capture_default_str();
    beat_cmd->add_option("--samples-per-period", beat.samples_per_period)->capture_default_str();
    auto* env_opt = beat_cmd->add_option("--envelope", envelope, "CSV of t, P12 and the beat model");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kInputError;
    }

    try {
        const auto cfg = tls::io::load_config(config_path);
        std::ofstream file;
        if (!out_path.empty()) {
            file.open(out_path);
            if (!file) throw tls::Error(tls::ErrorCode::ParseError, "cannot write " + out_path);
        }
        std::ostream& out = out_path.empty() ? std::cout : file;
        out.precision(17);

        if (*propagate) return tlsdrive::cmd_propagate(cfg, prop, out);
        if (*heff_cmd) {
            if (*lambda_opt) heff.lambda = lambda;
            return tlsdrive::cmd_heff(cfg, heff, out);
        }
        if (*spectrum) return tlsdrive::cmd_spectrum(cfg, spec, out);
        if (*classify) return tlsdrive::cmd_classify(cfg, cls, out);
        if (*scan_cmd) {
            if (*solve_opt) scan.solve = solve;
            return tlsdrive::cmd_scan(cfg, scan, out);
        }
        if (*beat_cmd) {
            if (*env_opt) beat.envelope_csv = envelope;
            return tlsdrive::cmd_beat(cfg, beat, out);
        }
    } catch (const tls::Error& e) {
        std::cerr << "tlsdrive: " << e.what() << '\n';
        return tls::is_numerical(e.code()) ? kNumericalError : kInputError;
    } catch (const std::exception& e) {
        std::cerr << "tlsdrive: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}
