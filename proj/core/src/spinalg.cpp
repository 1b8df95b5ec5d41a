#include "tsvsim/spinalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tsvsim {

namespace {

void require_dim(std::size_t dim, const char* what) {
    if (dim != 2 && dim != 4) {
        throw std::invalid_argument(std::string(what) + ": dimension must be 2 or 4, got " +
                                    std::to_string(dim));
    }
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                                    " vs " + std::to_string(b) + ")");
    }
}

Amplitudes canonical_phase(Amplitudes v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double mag = std::abs(v(i));
        if (mag > 1e-12) {
            v *= std::conj(v(i)) / mag;
            v(i) = Complex(mag, 0.0);
            break;
        }
    }
    return v;
}

}  // namespace

// ---------------------------------------------------------------- Orientation

Orientation::Orientation(double radians) {
    double r = std::fmod(radians, 2 * kPi);
    if (r < 0) {
        r += 2 * kPi;
    }
    // fmod of a value just below 2*pi can round up onto 2*pi.
    if (r >= 2 * kPi) {
        r = 0.0;
    }
    radians_ = r;
}

Orientation Orientation::from_degrees(double degrees) {
    return Orientation(degrees * kPi / 180.0);
}

double Orientation::degrees() const noexcept {
    return radians_ * 180.0 / kPi;
}

double Orientation::angle_to(Orientation other) const noexcept {
    double d = radians_ - other.radians_;
    if (d > kPi) {
        d -= 2 * kPi;
    } else if (d <= -kPi) {
        d += 2 * kPi;
    }
    return d;
}

bool Orientation::same_as(Orientation other, double tol) const noexcept {
    return std::abs(angle_to(other)) <= tol;
}

// ----------------------------------------------------------------- PureState

PureState::PureState(Amplitudes amplitudes) : amplitudes_(std::move(amplitudes)) {
    require_dim(dim(), "PureState");
    double n2 = amplitudes_.squaredNorm();
    if (std::abs(n2 - 1.0) > kNormTolerance) {
        throw std::invalid_argument("PureState: amplitudes are not normalized (|v|^2 = " +
                                    std::to_string(n2) + ")");
    }
}

PureState PureState::normalized(const Amplitudes& amplitudes) {
    double n = amplitudes.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw std::invalid_argument("PureState: cannot normalize a zero or non-finite vector");
    }
    return PureState(amplitudes / n);
}

PureState PureState::basis(std::size_t dim, std::size_t index) {
    require_dim(dim, "PureState::basis");
    if (index >= dim) {
        throw std::invalid_argument("PureState::basis: index out of range");
    }
    Amplitudes v = Amplitudes::Zero(static_cast<Eigen::Index>(dim));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return PureState(v);
}

Complex PureState::inner(const PureState& other) const {
    require_same_dim(dim(), other.dim(), "inner");
    return amplitudes_.dot(other.amplitudes_);  // Eigen's dot conjugates the left operand.
}

// ------------------------------------------------------------------ Operator

Operator::Operator(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
        throw std::invalid_argument("Operator: matrix must be square");
    }
    require_dim(dim(), "Operator");
    double err = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
    if (err > kHermitianTolerance) {
        throw std::invalid_argument("Operator: matrix is not Hermitian (max deviation " +
                                    std::to_string(err) + ")");
    }
}

bool Operator::is_spin_observable(double tol) const {
    Matrix sq = entries_ * entries_;
    Matrix id = Matrix::Identity(entries_.rows(), entries_.cols());
    return (sq - id).cwiseAbs().maxCoeff() <= tol;
}

Matrix Operator::eigenprojector(Spin s) const {
    Matrix id = Matrix::Identity(entries_.rows(), entries_.cols());
    return 0.5 * (id + static_cast<double>(value(s)) * entries_);
}

Amplitudes Operator::apply(const Amplitudes& v) const {
    require_same_dim(dim(), static_cast<std::size_t>(v.size()), "Operator::apply");
    return entries_ * v;
}

Operator Operator::with_axis(Orientation axis, std::optional<Side> side) const {
    Operator copy = *this;
    copy.axis_ = axis;
    copy.side_ = side;
    return copy;
}

Operator Operator::operator+(const Operator& other) const {
    require_same_dim(dim(), other.dim(), "Operator::operator+");
    return Operator(Matrix(entries_ + other.entries_));
}

Operator Operator::operator*(double scale) const {
    return Operator(Matrix(entries_ * scale));
}

// ------------------------------------------------------------- constructors

Operator identity_operator(std::size_t dim) {
    require_dim(dim, "identity_operator");
    auto n = static_cast<Eigen::Index>(dim);
    return Operator(Matrix::Identity(n, n));
}

Operator sigma_x() {
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return Operator(m);
}

Operator sigma_y() {
    Matrix m(2, 2);
    m << 0.0, Complex(0, -1), Complex(0, 1), 0.0;
    return Operator(m);
}

Operator sigma_z() {
    Matrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return Operator(m);
}

Operator spin_operator(Orientation o) {
    double c = std::cos(o.radians());
    double s = std::sin(o.radians());
    Matrix m(2, 2);
    m << c, s, s, -c;
    return Operator(m).with_axis(o);
}

PureState eigenpair(const Operator& op, Spin sign) {
    if (op.dim() != 2) {
        throw std::invalid_argument("eigenpair: expected a 2x2 operator");
    }
    if (!op.is_spin_observable()) {
        throw std::invalid_argument("eigenpair: operator does not have eigenvalues +-1");
    }
    // Each column of the rank-one projector spans the eigenspace; take the
    // larger one for stability.
    Matrix p = op.eigenprojector(sign);
    Eigen::Index col = p.col(0).norm() >= p.col(1).norm() ? 0 : 1;
    Amplitudes v = p.col(col);
    return PureState::normalized(canonical_phase(v / v.norm()));
}

PureState singlet_state() {
    Amplitudes v(4);
    const double h = 1.0 / std::sqrt(2.0);
    v << 0.0, h, -h, 0.0;
    return PureState(v);
}

Operator embed(const Operator& op, Side side) {
    if (op.dim() != 2) {
        throw std::invalid_argument("embed: expected a 2x2 operator");
    }
    const Matrix& a = op.matrix();
    Matrix out = Matrix::Zero(4, 4);
    for (Eigen::Index i = 0; i < 2; ++i) {
        for (Eigen::Index j = 0; j < 2; ++j) {
            if (side == Side::Left) {
                // (a (x) I)_{(i,k),(j,l)} = a_ij delta_kl
                out(2 * i, 2 * j) = a(i, j);
                out(2 * i + 1, 2 * j + 1) = a(i, j);
            } else {
                // (I (x) a)_{(k,i),(l,j)} = delta_kl a_ij
                out(i, j) = a(i, j);
                out(2 + i, 2 + j) = a(i, j);
            }
        }
    }
    Operator embedded(out);
    if (auto axis = op.axis()) {
        embedded = embedded.with_axis(*axis, side);
    }
    return embedded;
}

Operator observable_for(const PureState& s) {
    const Amplitudes& v = s.amplitudes();
    auto n = v.size();
    Matrix m = 2.0 * (v * v.adjoint()) - Matrix::Identity(n, n);
    // Round-off can leave ~1e-17 anti-Hermitian residue.
    return Operator(Matrix(0.5 * (m + m.adjoint())));
}

double born_probability(const PureState& s, const Operator& op, Spin sign) {
    require_same_dim(s.dim(), op.dim(), "born_probability");
    Amplitudes projected = op.eigenprojector(sign) * s.amplitudes();
    return projected.squaredNorm();
}

double expectation(const PureState& s, const Operator& op) {
    require_same_dim(s.dim(), op.dim(), "expectation");
    Complex e = s.amplitudes().dot(op.matrix() * s.amplitudes());
    if (std::abs(e.imag()) > 1e-10) {
        throw std::logic_error("expectation: non-real expectation of a Hermitian operator");
    }
    return e.real();
}

double fidelity(const PureState& a, const PureState& b) {
    return std::norm(a.inner(b));
}

PureState project(const PureState& s, const Operator& op, Spin sign) {
    require_same_dim(s.dim(), op.dim(), "project");
    Amplitudes projected = op.eigenprojector(sign) * s.amplitudes();
    double n = projected.norm();
    if (n < 1e-15) {
        throw std::domain_error("project: projection onto a probability-zero eigenspace");
    }
    return PureState(projected / n);
}

}  // namespace tsvsim
