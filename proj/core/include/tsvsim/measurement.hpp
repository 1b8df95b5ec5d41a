#pragma once

// Strong (projective) and weak (Gaussian pointer) spin measurements.
//
// The weak measurement is the impulsive limit of a von Neumann coupling
// H = g(t) * coupling * A * P_pointer with a Gaussian pointer of width delta.
// Tracing out the pointer leaves a Kraus operator per reading q:
//
//   M(q) = (2 pi delta^2)^(-1/4) exp(-(q - coupling * A)^2 / (4 delta^2))
//
// For a +-1 observable A = P+ - P- this is a weighted sum of the two
// eigenprojectors, so readings are drawn from the two-Gaussian mixture
// p+ N(+coupling, delta^2) + p- N(-coupling, delta^2).

#include <optional>

#include "tsvsim/random_stream.hpp"
#include "tsvsim/spinalg.hpp"

namespace tsvsim {

/// Weak-coupling parameters: pointer kick lambda / N^exponent, noise delta.
class PointerConfig {
  public:
    /// Throws std::invalid_argument for lambda < 0, delta <= 0, N < 1 or an
    /// exponent other than 0.5 or 1.0.
    PointerConfig(double lambda, double delta, long long ensemble_size, double coupling_exponent = 0.5);

    /// Builds a config with coupling = ratio * delta for a given N.
    static PointerConfig from_ratio(double coupling_over_delta, double delta, long long ensemble_size,
                                    double coupling_exponent = 0.5);

    double lambda() const noexcept { return lambda_; }
    double delta() const noexcept { return delta_; }
    long long ensemble_size() const noexcept { return ensemble_size_; }
    double coupling_exponent() const noexcept { return exponent_; }

    /// g = lambda / N^exponent.
    double coupling() const noexcept { return coupling_; }

    /// delta >= 10 g. Configurations outside this regime are allowed.
    bool is_weak() const noexcept { return delta_ >= 10.0 * coupling_; }

  private:
    double lambda_;
    double delta_;
    long long ensemble_size_;
    double exponent_;
    double coupling_;
};

enum class Binary { Up, Down };

constexpr char code(Binary b) noexcept { return b == Binary::Up ? 'U' : 'D'; }
constexpr Spin to_spin(Binary b) noexcept { return b == Binary::Up ? Spin::Up : Spin::Down; }

/// Up for positive readings; an exact zero also resolves to Up.
constexpr Binary binarize(double reading) noexcept { return reading >= 0.0 ? Binary::Up : Binary::Down; }

struct WeakReading {
    double value = 0.0;
    std::optional<Orientation> orientation;
    int row_index = 0;  // 1..9 inside a protocol schedule, 0 otherwise
    Binary binarized = Binary::Up;
};

struct StrongOutcome {
    Spin sign = Spin::Up;
    std::optional<Orientation> orientation;
};

struct StrongResult {
    StrongOutcome outcome;
    PureState state;
};

struct WeakResult {
    WeakReading reading;
    PureState state;
};

/// Born-sampled projective measurement; the state collapses onto the
/// outcome eigenspace.
StrongResult strong_measure(const PureState& s, const Operator& op, RandomStream& rng);

/// Gaussian-pointer measurement with Kraus back-action.
WeakResult weak_measure(const PureState& s, const Operator& op, const PointerConfig& cfg, RandomStream& rng);

/// weak_measure with op2 embedded on one side of a two-spin state.
WeakResult weak_measure_pair(const PureState& s, const Operator& op2, Side side, const PointerConfig& cfg,
                             RandomStream& rng);

/// Applies the normalized Kraus operator for a given reading. Exposed for
/// tests and for replaying recorded readings.
PureState apply_pointer_kraus(const PureState& s, const Operator& op, double coupling, double delta,
                              double reading);

}  // namespace tsvsim
