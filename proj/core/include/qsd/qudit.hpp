#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace qsd {

using Complex = std::complex<double>;
using RealVec = Eigen::VectorXd;
using StateVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

constexpr double kNormTol = 1e-12;

/// N equally likely symmetric pure states in dimension D:
///   |psi_j> = sum_n c_n w^{jn} |n>,   w = exp(2 pi i / N),
/// with real nonnegative coefficients c, sum c_n^2 = 1, and 2 <= D <= N.
struct SymmetricSetSpec {
    int dim = 0;         // D
    int num_states = 0;  // N
    RealVec coeffs;      // length D

    /// Throws std::invalid_argument when any invariant is violated.
    void validate() const;

    /// w^power with w = exp(2 pi i / N).
    Complex omega(int power = 1) const;
};

/// D-1 polar angles, each in [0, pi].
struct HypersphericalParams {
    RealVec angles;
};

/// Staircase transmission profile: slits below j0 stay fully open, slits
/// from j0 on are progressively closed as alpha runs from 0 to 1.
struct CascadeParams {
    int j0 = 1;          // 1 <= j0 <= D-1
    double alpha = 0.0;  // in [0, 1]
};

/// Nested polar parametrization of a nonnegative unit vector.
/// D=2 gives (cos(t/2), sin(t/2)). For D>=3 the last component carries the
/// bare cosine of the first angle and the remaining D-1 components are
/// sin(t1/2) times the (D-1)-dimensional parametrization of the remaining
/// angles, so D=3 is (sin(t1/2)cos(t2/2), sin(t1/2)sin(t2/2), cos(t1/2)).
RealVec hyperspherical_coeffs(const HypersphericalParams& params);

/// Biparametric coefficients c_j = t_j / ||t|| with
///   t_j = 1                                          for j <  j0
///   t_j = sqrt(1 - ((j - j0 + 1)/(D - j0) * alpha)^(1/D))   for j >= j0
RealVec cascade_coeffs(int dim, const CascadeParams& params);

/// Unbiased random coefficients: D independent standard normals from the
/// repository generator (see rng.hpp), absolute values, normalized.
/// Deterministic function of (dim, seed).
RealVec random_coeffs(int dim, std::uint64_t seed);

/// Single symmetric state |psi_j>, amplitudes c_n * w^{jn}.
StateVector symmetric_state(const SymmetricSetSpec& spec, int j);

/// All N states of the set, in order j = 0..N-1.
std::vector<StateVector> make_symmetric_set(const SymmetricSetSpec& spec);

/// Applies the symmetry operator U^steps, U = sum_l w^l |l><l|, so that
/// U|psi_j> = |psi_{j+1 mod N}>.
StateVector symmetry_shift(const StateVector& state, const SymmetricSetSpec& spec, int steps);

}  // namespace qsd
