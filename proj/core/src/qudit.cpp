#include "qsd/qudit.hpp"

#include "qsd/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qsd {

namespace {
constexpr double kPi = std::numbers::pi;
}

void SymmetricSetSpec::validate() const {
    if (dim < 2) throw std::invalid_argument("SymmetricSetSpec: dim must be >= 2");
    if (num_states < dim)
        throw std::invalid_argument("SymmetricSetSpec: num_states must be >= dim");
    if (coeffs.size() != dim)
        throw std::invalid_argument("SymmetricSetSpec: coefficient count mismatch");
    double norm_sq = 0.0;
    for (int n = 0; n < dim; ++n) {
        if (coeffs[n] < 0.0)
            throw std::invalid_argument("SymmetricSetSpec: coefficients must be nonnegative");
        norm_sq += coeffs[n] * coeffs[n];
    }
    if (std::abs(norm_sq - 1.0) > kNormTol)
        throw std::invalid_argument("SymmetricSetSpec: coefficients not normalized, sum c^2 = " +
                                    std::to_string(norm_sq));
}

Complex SymmetricSetSpec::omega(int power) const {
    const double angle = 2.0 * kPi * power / num_states;
    return {std::cos(angle), std::sin(angle)};
}

RealVec hyperspherical_coeffs(const HypersphericalParams& params) {
    const int dim = static_cast<int>(params.angles.size()) + 1;
    if (dim < 2) throw std::invalid_argument("hyperspherical_coeffs: need at least one angle");
    for (int m = 0; m < params.angles.size(); ++m) {
        const double a = params.angles[m];
        if (!(a >= 0.0 && a <= kPi))
            throw std::invalid_argument("hyperspherical_coeffs: angle out of [0, pi]");
    }

    RealVec c(dim);
    double prefix = 1.0;
    // Peel off one cosine per angle from the back; the last angle fills the
    // leading Bloch pair.
    for (int m = 0; m + 2 < dim; ++m) {
        const double half = 0.5 * params.angles[m];
        c[dim - 1 - m] = prefix * std::cos(half);
        prefix *= std::sin(half);
    }
    const double half = 0.5 * params.angles[dim - 2];
    c[0] = prefix * std::cos(half);
    c[1] = prefix * std::sin(half);

    c /= c.norm();
    return c;
}

RealVec cascade_coeffs(int dim, const CascadeParams& params) {
    if (dim < 2) throw std::invalid_argument("cascade_coeffs: dim must be >= 2");
    if (params.j0 < 1 || params.j0 > dim - 1)
        throw std::invalid_argument("cascade_coeffs: j0 must be in [1, dim-1]");
    if (!(params.alpha >= 0.0 && params.alpha <= 1.0))
        throw std::invalid_argument("cascade_coeffs: alpha must be in [0, 1]");

    RealVec t(dim);
    for (int j = 0; j < dim; ++j) {
        if (j < params.j0) {
            t[j] = 1.0;
        } else {
            const double ramp =
                (j - params.j0 + 1) / static_cast<double>(dim - params.j0) * params.alpha;
            t[j] = std::sqrt(1.0 - std::pow(ramp, 1.0 / dim));
        }
    }
    return t / t.norm();
}

RealVec random_coeffs(int dim, std::uint64_t seed) {
    if (dim < 2) throw std::invalid_argument("random_coeffs: dim must be >= 2");
    Rng rng(seed);
    RealVec c(dim);
    for (int n = 0; n < dim; ++n) c[n] = std::abs(rng.next_normal());
    return c / c.norm();
}

StateVector symmetric_state(const SymmetricSetSpec& spec, int j) {
    spec.validate();
    StateVector psi(spec.dim);
    for (int n = 0; n < spec.dim; ++n) psi[n] = spec.coeffs[n] * spec.omega(j * n);
    return psi;
}

std::vector<StateVector> make_symmetric_set(const SymmetricSetSpec& spec) {
    spec.validate();
    std::vector<StateVector> states;
    states.reserve(spec.num_states);
    for (int j = 0; j < spec.num_states; ++j) states.push_back(symmetric_state(spec, j));
    return states;
}

StateVector symmetry_shift(const StateVector& state, const SymmetricSetSpec& spec, int steps) {
    if (state.size() != spec.dim)
        throw std::invalid_argument("symmetry_shift: state dimension mismatch");
    StateVector out(state.size());
    for (int n = 0; n < state.size(); ++n) out[n] = state[n] * spec.omega(n * steps);
    return out;
}

}  // namespace qsd
