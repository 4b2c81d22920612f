#pragma once

#include "qsd/optics.hpp"
#include "qsd/qudit.hpp"

#include <array>
#include <optional>

namespace qsd {

/// Detector position measuring outcome `outcome` of basis `basis`.
/// Basis 0: (|0> +/- |1>)/sqrt(2), focal plane at x_{0j} = j lambda f/(2d).
/// Basis 1: (|0> +/- i|1>)/sqrt(2), focal plane at x_{1j} = (j-1/2) lambda f/(2d).
/// Basis 2: computational, image plane at x_{2j} = -(j-1/2) d.
struct MubPosition {
    int basis = 0;
    int outcome = 0;
    double x = 0.0;
    Plane plane = Plane::Focal;
};

std::array<MubPosition, 6> mub_positions(const OpticalGeometry& g);

/// Basis vector |b_{mu j}> of the three mutually unbiased qubit bases.
StateVector mub_basis_state(int basis, int outcome);

using MubProbabilities = Eigen::Matrix<double, 3, 2>;

/// Camera pipeline for the six tomography readings: one focal-plane and one
/// image-plane capture, focal readings compensated by the sinc^2 envelope,
/// each basis row normalized to 1. Preparation errors are shared between
/// the two arms (one mask); readout noise is drawn independently per arm.
MubProbabilities mub_probabilities(const StateVector& qubit, const OpticalGeometry& g,
                                   const NoiseModel& noise,
                                   SamplingMode mode = SamplingMode::Point);

/// Linear reconstruction rho = sum_{mu j} p_{mu j} |b_{mu j}><b_{mu j}| - I.
/// Hermitian and unit trace by construction; may have negative eigenvalues
/// on noisy data. Rows of p must each sum to 1 within 1e-6.
ComplexMatrix mub_linear_inversion(const MubProbabilities& probs);

struct MleOptions {
    int max_iterations = 2000;
    double rel_tol = 1e-10;
};

struct MleResult {
    ComplexMatrix rho;
    bool converged = false;
    int iterations = 0;
    double log_likelihood = 0.0;
};

/// Maximum-likelihood refinement over unit-trace positive matrices,
/// parametrized as rho = T T^dag / tr(T T^dag) with lower-triangular T and
/// ascended by accept-only gradient steps, so the returned likelihood is
/// never below that of the (positivity-projected) starting point.
MleResult mle_refine(const MubProbabilities& probs, const ComplexMatrix& start,
                     const MleOptions& options = {});

/// Generic form: maximizes sum_i w_i log <b_i|rho|b_i>.
MleResult mle_maximize(const std::vector<StateVector>& projector_states,
                       const std::vector<double>& weights, const ComplexMatrix& start,
                       const MleOptions& options = {});

struct PhaseRetrievalOptions {
    int restarts = 20;
    std::uint64_t seed = 1;
    int max_iterations = 4000;  // simplex iterations per restart
    double tol = 1e-10;         // objective spread at convergence, relative
                                // to the data scale sum(I_exp^2)
};

struct PhaseRetrievalResult {
    StateVector estimate;              // unit norm, phases[0] = 0
    std::optional<StateVector> twin;   // conjugate-reflected candidate when
                                       // the slit moduli are palindromic
    RealVec phases;                    // recovered phases of `estimate`
    double residual = 0.0;             // squared-residual sum at the optimum
    double scale = 0.0;                // fitted global intensity
    int restarts_used = 0;
    bool underdetermined = false;      // at most one slit carries intensity
    std::vector<double> restart_residuals;
};

/// Least-squares phase retrieval: fits the focal-plane intensity model
///   I_max * |sum_j sqrt(I_j) e^{i phi_j} e^{i k j d x/f}|^2 sinc^2(k a x/f)
/// to the recorded pattern over (phi_1..phi_{D-1}, I_max), phi_0 = 0, by
/// multi-start simplex descent; the best local optimum wins (ties by
/// restart index). Throws when the pattern has fewer samples than D.
PhaseRetrievalResult phase_retrieval(const RealVec& image_intensities,
                                     const IntensityPattern& focal_pattern,
                                     const OpticalGeometry& g,
                                     const PhaseRetrievalOptions& options = {});

/// |<a|b>|^2 for pure states.
double fidelity(const StateVector& a, const StateVector& b);

/// <psi|rho|psi> for a density matrix against a pure target.
double fidelity(const ComplexMatrix& rho, const StateVector& psi);

}  // namespace qsd
