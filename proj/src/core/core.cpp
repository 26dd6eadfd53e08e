#include "tlsdrive/core.hpp"

#include <algorithm>
#include <numeric>

namespace tls {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptySequence: return "EmptySequence";
        case ErrorCode::NonPositiveDuration: return "NonPositiveDuration";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::BranchAmbiguity: return "BranchAmbiguity";
        case ErrorCode::DegenerateFrequency: return "DegenerateFrequency";
        case ErrorCode::PreconditionViolation: return "PreconditionViolation";
        case ErrorCode::NoRoot: return "NoRoot";
        case ErrorCode::NoEnvelope: return "NoEnvelope";
        case ErrorCode::Undersampled: return "Undersampled";
        case ErrorCode::SetupViolation: return "SetupViolation";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

bool is_numerical(ErrorCode code) {
    switch (code) {
        case ErrorCode::BranchAmbiguity:
        case ErrorCode::DegenerateFrequency:
        case ErrorCode::NoRoot:
        case ErrorCode::NoEnvelope:
            return true;
        default:
            return false;
    }
}

double wrap_angle(double theta) {
    double r = std::remainder(theta, 2.0 * kPi);  // [-pi, pi]
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

std::vector<DriveStep> validate(std::vector<DriveStep> steps) {
    if (steps.empty()) throw Error(ErrorCode::EmptySequence, "sequence has no steps");
    for (std::size_t n = 0; n < steps.size(); ++n) {
        DriveStep& s = steps[n];
        if (!std::isfinite(s.delta) || !std::isfinite(s.epsilon) || !std::isfinite(s.theta) ||
            !std::isfinite(s.tau)) {
            throw Error(ErrorCode::NonFinite, "step " + std::to_string(n + 1) + " has a non-finite field");
        }
        if (!(s.tau > 0.0)) {
            throw Error(ErrorCode::NonPositiveDuration,
                        "step " + std::to_string(n + 1) + " has duration " + std::to_string(s.tau));
        }
        if (s.epsilon < 0.0) {
            s.epsilon = -s.epsilon;
            s.theta += kPi;
        }
        s.theta = wrap_angle(s.theta);
    }
    return steps;
}

PulseSequence validate(const PulseSequence& sequence) {
    return PulseSequence(std::vector<DriveStep>(sequence.steps().begin(), sequence.steps().end()));
}

PulseSequence::PulseSequence(std::vector<DriveStep> steps) : steps_(validate(std::move(steps))) {
    cumulative_.resize(steps_.size() + 1);
    cumulative_[0] = 0.0;
    for (std::size_t n = 0; n < steps_.size(); ++n) cumulative_[n + 1] = cumulative_[n] + steps_[n].tau;
    period_ = cumulative_.back();
}

double PulseSequence::min_duration() const {
    double m = steps_.front().tau;
    for (const auto& s : steps_) m = std::min(m, s.tau);
    return m;
}

const char* to_string(BranchConvention branch) {
    switch (branch) {
        case BranchConvention::Principal: return "principal";
        case BranchConvention::PositiveTrace: return "positive-trace";
        case BranchConvention::Adaptive: return "adaptive";
    }
    return "unknown";
}

BranchConvention parse_branch(const std::string& text) {
    if (text == "principal") return BranchConvention::Principal;
    if (text == "positive-trace" || text == "positive") return BranchConvention::PositiveTrace;
    if (text == "adaptive") return BranchConvention::Adaptive;
    throw Error(ErrorCode::OutOfRange, "unknown branch convention '" + text + "'");
}

const char* to_string(SpectralFamily family) {
    switch (family) {
        case SpectralFamily::Offset: return "offset";
        case SpectralFamily::Sideband: return "sideband";
        case SpectralFamily::Harmonic: return "harmonic";
        case SpectralFamily::Other: return "other";
    }
    return "other";
}

double SpectralModel::operator()(double t) const {
    double p = offset;
    for (const auto& c : components) p += c.amplitude * std::cos(c.frequency * t - c.phase);
    return p;
}

SpectralModel& SpectralModel::add(double frequency, double amplitude, double phase, int index,
                                  SpectralFamily family) {
    if (frequency < 0.0) {
        frequency = -frequency;
        phase = -phase;
    }
    if (amplitude < 0.0) {
        amplitude = -amplitude;
        phase += kPi;
    }
    components.push_back({frequency, amplitude, wrap_angle(phase), index, family});
    return *this;
}

bool BeatPrediction::is_beat(double ratio) const {
    double diff = std::abs(varpi1_prime - varpi1);
    return diff > 0.0 && std::abs(varpi1 + varpi1_prime) > ratio * diff;
}

double BeatPrediction::operator()(double t) const {
    double a = std::sin(varpi1 * (t - t_p));
    double b = std::sin(varpi1_prime * (t - t_p));
    return 0.5 * (a * a + b * b);
}

SpectralModel BeatPrediction::as_model() const {
    SpectralModel m{0.5, {}};
    m.add(2.0 * varpi1, -0.25, 2.0 * varpi1 * t_p);
    m.add(2.0 * varpi1_prime, -0.25, 2.0 * varpi1_prime * t_p);
    return m;
}

}  // namespace tls
