#include "qsd/measurement.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qsd {

namespace {
constexpr double kPi = std::numbers::pi;
}

double MEMeasurement::completeness_error() const {
    const ComplexMatrix sum = vectors * vectors.adjoint();
    return (sum - ComplexMatrix::Identity(num_outcomes, num_outcomes)).cwiseAbs().maxCoeff();
}

ComplexMatrix dft_matrix(int n) {
    if (n < 1) throw std::invalid_argument("dft_matrix: n must be >= 1");
    ComplexMatrix f(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int m = 0; m < n; ++m) {
        for (int k = 0; k < n; ++k) {
            const double angle = 2.0 * kPi * ((static_cast<long long>(m) * k) % n) / n;
            f(m, k) = Complex(std::cos(angle), std::sin(angle)) * scale;
        }
    }
    return f;
}

MEMeasurement me_measurement(int n) {
    if (n < 2) throw std::invalid_argument("me_measurement: n must be >= 2");
    return MEMeasurement{n, dft_matrix(n)};
}

StateVector embed_state(const StateVector& state, int n) {
    if (n < state.size())
        throw std::invalid_argument("embed_state: target dimension smaller than state");
    StateVector out = StateVector::Zero(n);
    out.head(state.size()) = state;
    return out;
}

ProbabilityTable outcome_table(const SymmetricSetSpec& spec) {
    spec.validate();
    const int n = spec.num_states;
    // Circulant generator g(s) = |sum_n c_n w^{ns}|^2 / N; entry (k, j) = g((j-k) mod N).
    RealVec gen(n);
    for (int s = 0; s < n; ++s) {
        Complex acc(0.0, 0.0);
        for (int m = 0; m < spec.dim; ++m) acc += spec.coeffs[m] * spec.omega(m * s);
        gen[s] = std::norm(acc) / n;
    }
    ProbabilityTable table{n, RealMatrix(n, n)};
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) table.entries(k, j) = gen[((j - k) % n + n) % n];
    return table;
}

CorrectProbability p_correct(const SymmetricSetSpec& spec) {
    spec.validate();
    const ProbabilityTable table = outcome_table(spec);
    CorrectProbability result;
    result.trace_form = table.entries.diagonal().mean();
    const double coeff_sum = spec.coeffs.sum();
    result.closed_form = coeff_sum * coeff_sum / spec.num_states;
    result.error_prob = 1.0 - result.closed_form;
    return result;
}

OptimalityCertificate optimality_certificate(const SymmetricSetSpec& spec, double tol) {
    return check_measurement_optimality(spec, me_measurement(spec.num_states).vectors, tol);
}

OptimalityCertificate check_measurement_optimality(const SymmetricSetSpec& spec,
                                                   const ComplexMatrix& outcome_vectors,
                                                   double tol) {
    spec.validate();
    const int n = spec.num_states;
    if (outcome_vectors.rows() != n || outcome_vectors.cols() != n)
        throw std::invalid_argument("check_measurement_optimality: bad outcome matrix shape");

    std::vector<StateVector> embedded;
    embedded.reserve(n);
    for (int j = 0; j < n; ++j) embedded.push_back(embed_state(symmetric_state(spec, j), n));

    ComplexMatrix gamma = ComplexMatrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        const StateVector& mu = outcome_vectors.col(j);
        const Complex overlap = mu.dot(embedded[j]);  // <mu_j|psi_j>
        gamma += (overlap / static_cast<double>(n)) * (mu * embedded[j].adjoint());
    }
    gamma = 0.5 * (gamma + gamma.adjoint()).eval();

    OptimalityCertificate cert;
    cert.tolerance = tol;
    cert.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        const ComplexMatrix m =
            gamma - (embedded[j] * embedded[j].adjoint()) / static_cast<double>(n);
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
        cert.min_eigenvalue = std::min(cert.min_eigenvalue, solver.eigenvalues().minCoeff());
    }
    cert.pass = cert.min_eigenvalue >= -tol;
    return cert;
}

double assignment_success(const SymmetricSetSpec& spec, const ComplexMatrix& basis,
                          const std::vector<int>& assignment) {
    spec.validate();
    const int n = spec.num_states;
    if (basis.rows() != n || basis.cols() != n || static_cast<int>(assignment.size()) != n)
        throw std::invalid_argument("assignment_success: shape mismatch");
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
        const StateVector psi = embed_state(symmetric_state(spec, j), n);
        total += std::norm(basis.col(assignment[j]).dot(psi));
    }
    return total / n;
}

std::vector<int> greedy_assignment(const SymmetricSetSpec& spec, const ComplexMatrix& basis) {
    spec.validate();
    const int n = spec.num_states;
    std::vector<int> assignment(n, -1);
    std::vector<bool> used(n, false);
    for (int j = 0; j < n; ++j) {
        const StateVector psi = embed_state(symmetric_state(spec, j), n);
        double best = -1.0;
        int best_k = -1;
        for (int k = 0; k < n; ++k) {
            if (used[k]) continue;
            const double overlap = std::norm(basis.col(k).dot(psi));
            if (overlap > best) {
                best = overlap;
                best_k = k;
            }
        }
        assignment[j] = best_k;
        used[best_k] = true;
    }
    return assignment;
}

}  // namespace qsd
