#pragma once

// Two-state-vector calculus: a system between a pre-selection |psi> and a
// post-selection <phi| is described by the pair (|psi>, <phi|).

#include <stdexcept>

#include "tsvsim/measurement.hpp"
#include "tsvsim/spinalg.hpp"

namespace tsvsim {

inline constexpr double kDegenerateOverlap = 1e-9;

/// Pre- and post-selection jointly incompatible with the requested quantity.
class DegenerateSelectionError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

class TwoStateVector {
  public:
    /// `backward` is the ket |phi> whose bra <phi| is the post-selection.
    TwoStateVector(PureState forward, PureState backward);

    const PureState& forward() const noexcept { return forward_; }
    const PureState& backward() const noexcept { return backward_; }

    /// <phi|psi>
    Complex overlap() const noexcept { return overlap_; }
    bool degenerate() const noexcept { return std::abs(overlap_) < kDegenerateOverlap; }

  private:
    PureState forward_;
    PureState backward_;
    Complex overlap_;
};

class UnitaryEvolution {
  public:
    /// Throws std::invalid_argument unless U U^dagger = I within 1e-10.
    explicit UnitaryEvolution(Matrix u);
    static UnitaryEvolution identity(std::size_t dim);

    const Matrix& matrix() const noexcept { return u_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(u_.rows()); }

  private:
    Matrix u_;
};

enum class Direction { Forward, Backward };

/// Forward applies U to |psi>; Backward applies U^dagger to |phi>, i.e. the
/// bra <phi| picks up a U on its right.
TwoStateVector evolve(const TwoStateVector& tsv, const UnitaryEvolution& u, Direction direction);

/// |<phi|P_s|psi>|^2 / sum_s' |<phi|P_s'|psi>|^2 for a +-1 observable.
/// Throws DegenerateSelectionError when the denominator vanishes.
double abl_probability(const TwoStateVector& tsv, const Operator& op, Spin sign);

/// <phi|A|psi> / <phi|psi>. Throws DegenerateSelectionError when
/// |<phi|psi>| < 1e-9.
Complex weak_value(const TwoStateVector& tsv, const Operator& op);

/// Mean pointer reading over `trials` fresh copies of `state`, divided by
/// the coupling g. Converges to <state|op|state>.
double ensemble_weak_average(const PureState& state, const Operator& op, const PointerConfig& cfg, long long trials,
                             RandomStream& rng);

}  // namespace tsvsim
