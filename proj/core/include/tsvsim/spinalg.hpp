#pragma once

// Exact complex linear algebra for a single spin-1/2 (dimension 2) and a
// pair of spins (dimension 4). All orientations lie in one fixed
// measurement plane, taken as the z-x plane of the Bloch sphere, so a
// direction is a single angle.
//
// Basis ordering for pairs is |LR>: index = 2 * left + right with
// 0 = up, 1 = down along z.

#include <complex>
#include <cstddef>
#include <optional>

#include <Eigen/Core>

namespace tsvsim {

using Complex = std::complex<double>;

// Fixed capacity of 4 keeps every state and operator on the stack.
using Amplitudes = Eigen::Matrix<Complex, Eigen::Dynamic, 1, Eigen::ColMajor, 4, 1>;
using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 4, 4>;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kPi = 3.14159265358979323846;

enum class Side { Left, Right };

// Outcome of a +-1 spin observable.
enum class Spin : int { Up = +1, Down = -1 };

constexpr int value(Spin s) noexcept { return static_cast<int>(s); }
constexpr Spin flipped(Spin s) noexcept { return s == Spin::Up ? Spin::Down : Spin::Up; }
constexpr Spin spin_from_sign(double x) noexcept { return x >= 0.0 ? Spin::Up : Spin::Down; }

/// A direction in the measurement plane, canonicalized to [0, 2*pi).
class Orientation {
  public:
    constexpr Orientation() = default;
    explicit Orientation(double radians);

    static Orientation from_degrees(double degrees);

    double radians() const noexcept { return radians_; }
    double degrees() const noexcept;

    /// Signed difference this - other, wrapped to (-pi, pi].
    double angle_to(Orientation other) const noexcept;

    /// Same direction within `tol` radians (modulo 2*pi).
    bool same_as(Orientation other, double tol = 1e-9) const noexcept;

    friend bool operator==(Orientation, Orientation) = default;

  private:
    double radians_ = 0.0;
};

/// Normalized state vector of dimension 2 or 4.
class PureState {
  public:
    /// Validates length and unit norm (within kNormTolerance).
    explicit PureState(Amplitudes amplitudes);

    /// Rescales to unit norm; throws std::invalid_argument on a zero vector.
    static PureState normalized(const Amplitudes& amplitudes);

    static PureState basis(std::size_t dim, std::size_t index);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }
    const Amplitudes& amplitudes() const noexcept { return amplitudes_; }
    Complex operator[](std::size_t i) const { return amplitudes_(static_cast<Eigen::Index>(i)); }

    /// <this|other>
    Complex inner(const PureState& other) const;

  private:
    Amplitudes amplitudes_;
};

/// Hermitian operator on a 2- or 4-dimensional space. Operators built from
/// an Orientation remember their axis and the side they act on.
class Operator {
  public:
    /// Validates shape and hermiticity (within kHermitianTolerance).
    explicit Operator(Matrix entries);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    const Matrix& matrix() const noexcept { return entries_; }

    /// True when op^2 = I, i.e. all eigenvalues are +-1.
    bool is_spin_observable(double tol = 1e-10) const;

    /// Projector (I + s * op) / 2 onto the eigenspace of eigenvalue s.
    /// Only meaningful for spin observables.
    Matrix eigenprojector(Spin s) const;

    Amplitudes apply(const Amplitudes& v) const;

    std::optional<Orientation> axis() const noexcept { return axis_; }
    std::optional<Side> side() const noexcept { return side_; }

    Operator with_axis(Orientation axis, std::optional<Side> side = std::nullopt) const;

    Operator operator+(const Operator& other) const;
    Operator operator*(double scale) const;

  private:
    Matrix entries_;
    std::optional<Orientation> axis_;
    std::optional<Side> side_;
};

Operator identity_operator(std::size_t dim);
Operator sigma_x();
Operator sigma_y();
Operator sigma_z();

/// cos(angle) * sigma_z + sin(angle) * sigma_x.
Operator spin_operator(Orientation o);

/// Eigenvector of a 2x2 spin observable for the requested eigenvalue. The
/// first non-negligible amplitude is made real and positive.
PureState eigenpair(const Operator& op, Spin sign);

/// (|ud> - |du>) / sqrt(2).
PureState singlet_state();

/// op (x) I for Left, I (x) op for Right.
Operator embed(const Operator& op, Side side);

/// Spin observable with `s` as its +1 eigenvector: 2|s><s| - I.
Operator observable_for(const PureState& s);

/// ||P_sign s||^2.
double born_probability(const PureState& s, const Operator& op, Spin sign);

/// <s|op|s>; throws if the imaginary part exceeds 1e-10.
double expectation(const PureState& s, const Operator& op);

/// |<a|b>|^2.
double fidelity(const PureState& a, const PureState& b);

/// Normalized P_sign s. Throws std::domain_error when the projection vanishes.
PureState project(const PureState& s, const Operator& op, Spin sign);

}  // namespace tsvsim
