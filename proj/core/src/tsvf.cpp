#include "tsvsim/tsvf.hpp"

#include <cmath>
#include <stdexcept>

namespace tsvsim {

TwoStateVector::TwoStateVector(PureState forward, PureState backward)
    : forward_(std::move(forward)), backward_(std::move(backward)) {
    if (forward_.dim() != backward_.dim()) {
        throw std::invalid_argument("TwoStateVector: forward and backward dimensions differ");
    }
    overlap_ = backward_.inner(forward_);
}

UnitaryEvolution::UnitaryEvolution(Matrix u) : u_(std::move(u)) {
    if (u_.rows() != u_.cols() || (u_.rows() != 2 && u_.rows() != 4)) {
        throw std::invalid_argument("UnitaryEvolution: expected a 2x2 or 4x4 matrix");
    }
    Matrix prod = u_ * u_.adjoint();
    double err = (prod - Matrix::Identity(u_.rows(), u_.cols())).cwiseAbs().maxCoeff();
    if (err > 1e-10) {
        throw std::invalid_argument("UnitaryEvolution: matrix is not unitary");
    }
}

UnitaryEvolution UnitaryEvolution::identity(std::size_t dim) {
    auto n = static_cast<Eigen::Index>(dim);
    return UnitaryEvolution(Matrix::Identity(n, n));
}

TwoStateVector evolve(const TwoStateVector& tsv, const UnitaryEvolution& u, Direction direction) {
    if (u.dim() != tsv.forward().dim()) {
        throw std::invalid_argument("evolve: dimension mismatch");
    }
    if (direction == Direction::Forward) {
        return TwoStateVector(PureState::normalized(u.matrix() * tsv.forward().amplitudes()), tsv.backward());
    }
    return TwoStateVector(tsv.forward(), PureState::normalized(u.matrix().adjoint() * tsv.backward().amplitudes()));
}

double abl_probability(const TwoStateVector& tsv, const Operator& op, Spin sign) {
    if (op.dim() != tsv.forward().dim()) {
        throw std::invalid_argument("abl_probability: dimension mismatch");
    }
    if (!op.is_spin_observable()) {
        throw std::invalid_argument("abl_probability: operator does not have eigenvalues +-1");
    }
    const Amplitudes& psi = tsv.forward().amplitudes();
    const Amplitudes& phi = tsv.backward().amplitudes();
    double up = std::norm(phi.dot(op.eigenprojector(Spin::Up) * psi));
    double down = std::norm(phi.dot(op.eigenprojector(Spin::Down) * psi));
    double total = up + down;
    if (total < kDegenerateOverlap * kDegenerateOverlap) {
        throw DegenerateSelectionError("abl_probability: pre- and post-selection incompatible with this observable");
    }
    return (sign == Spin::Up ? up : down) / total;
}

Complex weak_value(const TwoStateVector& tsv, const Operator& op) {
    if (op.dim() != tsv.forward().dim()) {
        throw std::invalid_argument("weak_value: dimension mismatch");
    }
    if (tsv.degenerate()) {
        throw DegenerateSelectionError("weak_value: pre- and post-selected states are orthogonal");
    }
    Complex numerator = tsv.backward().amplitudes().dot(op.matrix() * tsv.forward().amplitudes());
    return numerator / tsv.overlap();
}

double ensemble_weak_average(const PureState& state, const Operator& op, const PointerConfig& cfg, long long trials,
                             RandomStream& rng) {
    if (trials < 1) {
        throw std::invalid_argument("ensemble_weak_average: trials must be >= 1");
    }
    if (cfg.coupling() <= 0.0) {
        throw std::invalid_argument("ensemble_weak_average: zero coupling");
    }
    double sum = 0.0;
    for (long long i = 0; i < trials; ++i) {
        sum += weak_measure(state, op, cfg, rng).reading.value;
    }
    return sum / static_cast<double>(trials) / cfg.coupling();
}

}  // namespace tsvsim
