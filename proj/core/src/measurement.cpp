#include "tsvsim/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tsvsim {

namespace {

void require_measurable(const PureState& s, const Operator& op, const char* what) {
    if (s.dim() != op.dim()) {
        throw std::invalid_argument(std::string(what) + ": state/operator dimension mismatch");
    }
    if (!op.is_spin_observable()) {
        throw std::invalid_argument(std::string(what) + ": operator does not have eigenvalues +-1");
    }
}

}  // namespace

PointerConfig::PointerConfig(double lambda, double delta, long long ensemble_size, double coupling_exponent)
    : lambda_(lambda), delta_(delta), ensemble_size_(ensemble_size), exponent_(coupling_exponent) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("PointerConfig: lambda must be finite and >= 0");
    }
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw std::invalid_argument("PointerConfig: delta must be finite and > 0");
    }
    if (ensemble_size < 1) {
        throw std::invalid_argument("PointerConfig: ensemble size must be >= 1");
    }
    if (coupling_exponent != 0.5 && coupling_exponent != 1.0) {
        throw std::invalid_argument("PointerConfig: coupling exponent must be 0.5 or 1.0");
    }
    coupling_ = lambda_ / std::pow(static_cast<double>(ensemble_size_), exponent_);
}

PointerConfig PointerConfig::from_ratio(double coupling_over_delta, double delta, long long ensemble_size,
                                        double coupling_exponent) {
    if (ensemble_size < 1) {
        throw std::invalid_argument("PointerConfig: ensemble size must be >= 1");
    }
    double lambda = coupling_over_delta * delta * std::pow(static_cast<double>(ensemble_size), coupling_exponent);
    return PointerConfig(lambda, delta, ensemble_size, coupling_exponent);
}

StrongResult strong_measure(const PureState& s, const Operator& op, RandomStream& rng) {
    require_measurable(s, op, "strong_measure");
    const Amplitudes& v = s.amplitudes();
    Amplitudes op_v = op.apply(v);
    Amplitudes up = 0.5 * (v + op_v);
    Amplitudes down = 0.5 * (v - op_v);
    double p_up = up.squaredNorm();
    double p_down = down.squaredNorm();
    double u = rng.uniform() * (p_up + p_down);
    // u < p_up with p_up == 0 is impossible, so a zero-norm branch is never chosen.
    Spin sign = u < p_up ? Spin::Up : Spin::Down;
    const Amplitudes& branch = sign == Spin::Up ? up : down;
    return StrongResult{StrongOutcome{sign, op.axis()}, PureState::normalized(branch)};
}

PureState apply_pointer_kraus(const PureState& s, const Operator& op, double coupling, double delta,
                              double reading) {
    const Amplitudes& v = s.amplitudes();
    Amplitudes op_v = op.apply(v);
    // exp(-(q -+ g)^2 / (4 delta^2)) in log space, shifted so the larger weight is 1.
    double inv = 1.0 / (4.0 * delta * delta);
    double log_up = -(reading - coupling) * (reading - coupling) * inv;
    double log_down = -(reading + coupling) * (reading + coupling) * inv;
    double top = std::max(log_up, log_down);
    double w_up = std::exp(log_up - top);
    double w_down = std::exp(log_down - top);
    // w+ P+ v + w- P- v = ((w+ + w-) v + (w+ - w-) A v) / 2
    Amplitudes out = 0.5 * ((w_up + w_down) * v + (w_up - w_down) * op_v);
    return PureState::normalized(out);
}

WeakResult weak_measure(const PureState& s, const Operator& op, const PointerConfig& cfg, RandomStream& rng) {
    require_measurable(s, op, "weak_measure");
    const double g = cfg.coupling();
    const double delta = cfg.delta();
    double p_up = born_probability(s, op, Spin::Up);
    double p_down = born_probability(s, op, Spin::Down);
    double u = rng.uniform() * (p_up + p_down);
    double centre = u < p_up ? g : -g;
    double q = centre + delta * rng.normal();

    WeakReading reading;
    reading.value = q;
    reading.orientation = op.axis();
    reading.binarized = binarize(q);
    return WeakResult{reading, apply_pointer_kraus(s, op, g, delta, q)};
}

WeakResult weak_measure_pair(const PureState& s, const Operator& op2, Side side, const PointerConfig& cfg,
                             RandomStream& rng) {
    if (s.dim() != 4) {
        throw std::invalid_argument("weak_measure_pair: expected a two-spin state");
    }
    return weak_measure(s, embed(op2, side), cfg, rng);
}

}  // namespace tsvsim
