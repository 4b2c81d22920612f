#pragma once

#include "qsd/qudit.hpp"

namespace qsd {

/// Orthonormal rank-one measurement on an N-dimensional space. Column k of
/// `vectors` is the outcome vector |mu_k>; for the minimum-error measurement
/// these are the columns of the N-point DFT matrix.
struct MEMeasurement {
    int num_outcomes = 0;
    ComplexMatrix vectors;  // N x N, columns |mu_k>

    /// Max deviation of sum_k |mu_k><mu_k| from the identity.
    double completeness_error() const;
};

/// Unitary DFT, entry (m, n) = exp(2 pi i m n / N) / sqrt(N).
ComplexMatrix dft_matrix(int n);

/// Minimum-error measurement for N equally likely symmetric states.
MEMeasurement me_measurement(int n);

/// Pads a D-dimensional state with N-D zero amplitudes (projective
/// realization of the D-dimensional POVM on the larger space).
StateVector embed_state(const StateVector& state, int n);

/// Conditional outcome probabilities, entry (k, j) = P(outcome k | state j).
/// Columns (fixed j) sum to 1; for symmetric sets the matrix is circulant.
struct ProbabilityTable {
    int n = 0;
    RealMatrix entries;  // N x N

    double column_sum(int j) const { return entries.col(j).sum(); }
};

/// Exact table for the minimum-error measurement,
/// P(k|j) = |<mu_k|psi_j>|^2 = |sum_n c_n w^{n(j-k)}|^2 / N.
ProbabilityTable outcome_table(const SymmetricSetSpec& spec);

/// Overall success probability, computed two ways that must agree:
/// the average of the table diagonal and the closed form (sum_n c_n)^2 / N.
struct CorrectProbability {
    double trace_form = 0.0;
    double closed_form = 0.0;
    double error_prob = 0.0;  // 1 - closed_form
};
CorrectProbability p_correct(const SymmetricSetSpec& spec);

/// Verifies the optimality condition for a candidate measurement {Pi_k} on
/// the embedded space: with G = sym((1/N) sum_j Pi_j rho_j), every
/// G - rho_j / N must be positive semidefinite. Reports the global minimum
/// eigenvalue over j; pass iff it is >= -tolerance.
struct OptimalityCertificate {
    double min_eigenvalue = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};
OptimalityCertificate optimality_certificate(const SymmetricSetSpec& spec, double tol = 1e-8);

/// Same check for an explicit set of outcome vectors (columns). Used to show
/// that perturbed measurements fail the condition.
OptimalityCertificate check_measurement_optimality(const SymmetricSetSpec& spec,
                                                   const ComplexMatrix& outcome_vectors,
                                                   double tol = 1e-8);

/// Trace-form success probability of an arbitrary orthonormal basis with a
/// fixed outcome-to-state assignment sigma (assignment[j] = outcome index).
double assignment_success(const SymmetricSetSpec& spec, const ComplexMatrix& basis,
                          const std::vector<int>& assignment);

/// Greedy outcome-to-state relabeling: states in order j = 0..N-1 each take
/// the unused outcome with the largest overlap.
std::vector<int> greedy_assignment(const SymmetricSetSpec& spec, const ComplexMatrix& basis);

}  // namespace qsd
