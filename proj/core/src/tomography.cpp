#include "qsd/tomography.hpp"

#include "qsd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace qsd {

namespace {
constexpr double kPi = std::numbers::pi;

double sinc(double z) {
    if (std::abs(z) < 1e-8) return 1.0 - z * z / 6.0;
    return std::sin(z) / z;
}
}  // namespace

std::array<MubPosition, 6> mub_positions(const OpticalGeometry& g) {
    g.validate();
    const double fringe = g.lambda * g.f / (2.0 * g.d);  // half fringe period
    return {{
        {0, 0, 0.0, Plane::Focal},
        {0, 1, fringe, Plane::Focal},
        {1, 0, -0.5 * fringe, Plane::Focal},
        {1, 1, 0.5 * fringe, Plane::Focal},
        {2, 0, 0.5 * g.d, Plane::Image},
        {2, 1, -0.5 * g.d, Plane::Image},
    }};
}

StateVector mub_basis_state(int basis, int outcome) {
    if (basis < 0 || basis > 2 || outcome < 0 || outcome > 1)
        throw std::invalid_argument("mub_basis_state: index out of range");
    StateVector b(2);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const double sign = outcome == 0 ? 1.0 : -1.0;
    switch (basis) {
        case 0: b << inv_sqrt2, sign * inv_sqrt2; break;
        case 1: b << inv_sqrt2, Complex(0.0, sign * inv_sqrt2); break;
        case 2:
            b.setZero();
            b[outcome] = 1.0;
            break;
    }
    return b;
}

MubProbabilities mub_probabilities(const StateVector& qubit, const OpticalGeometry& g,
                                   const NoiseModel& noise, SamplingMode mode) {
    if (qubit.size() != 2) throw std::invalid_argument("mub_probabilities: need a qubit");
    RealVec moduli(2), phases(2);
    for (int l = 0; l < 2; ++l) {
        moduli[l] = std::abs(qubit[l]);
        phases[l] = std::arg(qubit[l]);
    }
    const StateVector t = transmission_coefficients(moduli, phases);

    const auto positions = mub_positions(g);
    std::vector<double> focal_x, image_x;
    for (const auto& p : positions)
        (p.plane == Plane::Focal ? focal_x : image_x).push_back(p.x);

    // The mask (and its preparation error) is shared by both arms; the image
    // arm gets its own readout stream.
    const CaptureResult focal = capture_pattern_with_prepared(t, g, noise, PlaneSpec::focal(),
                                                              mode, focal_x);
    NoiseModel image_noise = noise;
    image_noise.prep_amp_sigma = 0.0;
    image_noise.prep_phase_sigma = 0.0;
    image_noise.seed = derive_seed(noise.seed, 1);
    const IntensityPattern image = capture_pattern(focal.prepared, g, image_noise,
                                                   PlaneSpec::image(), mode, image_x);

    const double k = g.wavenumber();
    MubProbabilities p;
    for (const auto& pos : positions) {
        const IntensityPattern& pattern = pos.plane == Plane::Focal ? focal.pattern : image;
        double value = 0.0;
        if (mode == SamplingMode::Pixel) {
            const int idx =
                static_cast<int>(std::floor((pos.x - g.window.x_min) / g.pixel_pitch));
            if (idx < 0 || idx >= static_cast<int>(pattern.intensities.size()))
                throw std::invalid_argument("mub_probabilities: position outside window");
            value = pattern.intensities[idx];
        } else {
            const auto it = std::lower_bound(pattern.positions.begin(), pattern.positions.end(),
                                             pos.x - 1e-15 - 1e-12 * std::abs(pos.x));
            if (it == pattern.positions.end() || std::abs(*it - pos.x) > 1e-15 + 1e-12 * std::abs(pos.x))
                throw std::invalid_argument("mub_probabilities: pattern lacks sample");
            value = pattern.intensities[it - pattern.positions.begin()];
        }
        if (pos.plane == Plane::Focal) {
            const double s = sinc(k * g.a * pos.x / g.f);
            value /= s * s;
        }
        p(pos.basis, pos.outcome) = value;
    }

    for (int mu = 0; mu < 3; ++mu) {
        const double total = p(mu, 0) + p(mu, 1);
        if (total <= 0.0) {
            p(mu, 0) = p(mu, 1) = 0.5;
        } else {
            p(mu, 0) /= total;
            p(mu, 1) /= total;
        }
    }
    return p;
}

ComplexMatrix mub_linear_inversion(const MubProbabilities& probs) {
    for (int mu = 0; mu < 3; ++mu) {
        const double row = probs(mu, 0) + probs(mu, 1);
        if (std::abs(row - 1.0) > 1e-6)
            throw std::invalid_argument("mub_linear_inversion: basis row does not sum to 1");
    }
    ComplexMatrix rho = -ComplexMatrix::Identity(2, 2);
    for (int mu = 0; mu < 3; ++mu) {
        for (int j = 0; j < 2; ++j) {
            const StateVector b = mub_basis_state(mu, j);
            rho += probs(mu, j) * (b * b.adjoint());
        }
    }
    return rho;
}

namespace {

// Positivity projection: clamp eigenvalues, renormalize trace, and return a
// lower-triangular factor T with T T^dag = rho.
ComplexMatrix psd_factor(const ComplexMatrix& start) {
    const ComplexMatrix herm = 0.5 * (start + start.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm);
    RealVec eig = solver.eigenvalues().cwiseMax(1e-12);
    eig /= eig.sum();
    const ComplexMatrix rho =
        solver.eigenvectors() * eig.asDiagonal() * solver.eigenvectors().adjoint();
    Eigen::LLT<ComplexMatrix> llt(rho + 1e-14 * ComplexMatrix::Identity(rho.rows(), rho.cols()));
    return llt.matrixL();
}

double log_likelihood(const std::vector<StateVector>& states, const std::vector<double>& w,
                      const ComplexMatrix& rho) {
    double ll = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (w[i] <= 0.0) continue;
        const double q = std::max(std::real(states[i].dot(rho * states[i])), 1e-300);
        ll += w[i] * std::log(q);
    }
    return ll;
}

}  // namespace

MleResult mle_maximize(const std::vector<StateVector>& projector_states,
                       const std::vector<double>& weights, const ComplexMatrix& start,
                       const MleOptions& options) {
    if (projector_states.size() != weights.size())
        throw std::invalid_argument("mle_maximize: weight count mismatch");
    if (projector_states.empty()) throw std::invalid_argument("mle_maximize: no data");
    const int dim = static_cast<int>(projector_states.front().size());

    ComplexMatrix t_factor = psd_factor(start);
    auto rho_of = [&](const ComplexMatrix& t) {
        const ComplexMatrix s = t * t.adjoint();
        return ComplexMatrix(s / s.trace().real());
    };

    MleResult result;
    const double weight_sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    double ll = log_likelihood(projector_states, weights, rho_of(t_factor));
    double step = 0.1;
    int iter = 0;
    bool converged = false;
    while (iter < options.max_iterations && !converged) {
        ++iter;
        const ComplexMatrix s = t_factor * t_factor.adjoint();
        const double trace = s.trace().real();
        // d/dT* of sum_i w_i log(<b_i|TT^dag|b_i>/tr TT^dag), kept lower-triangular.
        ComplexMatrix grad = ComplexMatrix::Zero(dim, dim);
        for (std::size_t i = 0; i < projector_states.size(); ++i) {
            if (weights[i] <= 0.0) continue;
            const StateVector& b = projector_states[i];
            const double q = std::max(std::real(b.dot(s * b)), 1e-300);
            grad += (weights[i] / q) * (b * (b.adjoint() * t_factor));
        }
        grad -= (weight_sum / trace) * t_factor;
        grad = grad.triangularView<Eigen::Lower>();
        if (grad.norm() < 1e-14) {
            converged = true;
            break;
        }

        bool accepted = false;
        for (int backtrack = 0; backtrack < 40 && !accepted; ++backtrack) {
            const ComplexMatrix trial = t_factor + step * grad;
            const double trial_ll = log_likelihood(projector_states, weights, rho_of(trial));
            if (trial_ll > ll) {
                const double gain = trial_ll - ll;
                t_factor = trial;
                ll = trial_ll;
                step *= 1.5;
                accepted = true;
                if (gain < options.rel_tol * (std::abs(ll) + 1.0)) converged = true;
            } else {
                step *= 0.5;
            }
        }
        if (!accepted) converged = true;  // no ascent direction left
    }

    result.rho = rho_of(t_factor);
    result.converged = converged;
    result.iterations = iter;
    result.log_likelihood = ll;
    return result;
}

MleResult mle_refine(const MubProbabilities& probs, const ComplexMatrix& start,
                     const MleOptions& options) {
    std::vector<StateVector> states;
    std::vector<double> weights;
    for (int mu = 0; mu < 3; ++mu) {
        for (int j = 0; j < 2; ++j) {
            states.push_back(mub_basis_state(mu, j));
            weights.push_back(probs(mu, j));
        }
    }
    return mle_maximize(states, weights, start, options);
}

namespace {

// Nelder-Mead over the free phases; returns the converged point in-place
// and the objective value. `scale` anchors the stopping test so it still
// fires when the optimal objective is (numerically) zero.
double simplex_minimize(std::vector<double>& point, double init_step,
                        const std::function<double(const std::vector<double>&)>& objective,
                        int max_iterations, double tol, double scale) {
    const int n = static_cast<int>(point.size());
    std::vector<std::vector<double>> simplex(n + 1, point);
    std::vector<double> value(n + 1);
    for (int i = 0; i < n; ++i) simplex[i + 1][i] += init_step;
    for (int i = 0; i <= n; ++i) value[i] = objective(simplex[i]);

    auto order = [&] {
        std::vector<int> idx(n + 1);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return value[a] < value[b]; });
        std::vector<std::vector<double>> s2(n + 1);
        std::vector<double> v2(n + 1);
        for (int i = 0; i <= n; ++i) {
            s2[i] = simplex[idx[i]];
            v2[i] = value[idx[i]];
        }
        simplex.swap(s2);
        value.swap(v2);
    };

    for (int iter = 0; iter < max_iterations; ++iter) {
        order();
        if (value[n] - value[0] <= tol * (std::abs(value[0]) + scale)) break;
        double diameter = 0.0;
        for (int i = 1; i <= n; ++i)
            for (int j = 0; j < n; ++j)
                diameter = std::max(diameter, std::abs(simplex[i][j] - simplex[0][j]));
        if (diameter < 1e-9) break;

        std::vector<double> centroid(n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) centroid[j] += simplex[i][j] / n;

        auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (int j = 0; j < n; ++j) p[j] = centroid[j] + coef * (simplex[n][j] - centroid[j]);
            return p;
        };

        const std::vector<double> reflected = blend(-1.0);
        const double fr = objective(reflected);
        if (fr < value[0]) {
            const std::vector<double> expanded = blend(-2.0);
            const double fe = objective(expanded);
            if (fe < fr) {
                simplex[n] = expanded;
                value[n] = fe;
            } else {
                simplex[n] = reflected;
                value[n] = fr;
            }
        } else if (fr < value[n - 1]) {
            simplex[n] = reflected;
            value[n] = fr;
        } else {
            const std::vector<double> contracted = blend(fr < value[n] ? -0.5 : 0.5);
            const double fc = objective(contracted);
            if (fc < std::min(fr, value[n])) {
                simplex[n] = contracted;
                value[n] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    for (int j = 0; j < n; ++j)
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    value[i] = objective(simplex[i]);
                }
            }
        }
    }
    order();
    point = simplex[0];
    return value[0];
}

double wrap_phase(double phi) {
    const double two_pi = 2.0 * kPi;
    double w = std::fmod(phi, two_pi);
    if (w < 0.0) w += two_pi;
    return w;
}

}  // namespace

PhaseRetrievalResult phase_retrieval(const RealVec& image_intensities,
                                     const IntensityPattern& focal_pattern,
                                     const OpticalGeometry& g,
                                     const PhaseRetrievalOptions& options) {
    g.validate();
    const int dim = static_cast<int>(image_intensities.size());
    if (dim < 2) throw std::invalid_argument("phase_retrieval: need at least two slits");
    for (int j = 0; j < dim; ++j)
        if (image_intensities[j] < 0.0)
            throw std::invalid_argument("phase_retrieval: negative slit intensity");
    const int n_samples = static_cast<int>(focal_pattern.positions.size());
    if (n_samples < dim)
        throw std::invalid_argument("phase_retrieval: fewer pattern samples than slits");

    const double k = g.wavenumber();
    RealVec moduli = image_intensities.cwiseSqrt();

    // Per-sample precomputation: phase step k d x / f and sinc^2 envelope.
    std::vector<double> steps(n_samples), envelope(n_samples), data(n_samples);
    for (int s = 0; s < n_samples; ++s) {
        const double x = focal_pattern.positions[s];
        steps[s] = k * g.d * x / g.f;
        const double e = sinc(k * g.a * x / g.f);
        envelope[s] = e * e;
        data[s] = focal_pattern.intensities[s];
    }

    // Model pattern for given free phases (phi_0 = 0), scale profiled out.
    auto model = [&](const std::vector<double>& phi, std::vector<double>& out) {
        for (int s = 0; s < n_samples; ++s) {
            const Complex step(std::cos(steps[s]), std::sin(steps[s]));
            Complex factor(1.0, 0.0);
            Complex acc = moduli[0] * factor;
            for (int j = 1; j < dim; ++j) {
                factor *= step;
                acc += moduli[j] * Complex(std::cos(phi[j - 1]), std::sin(phi[j - 1])) * factor;
            }
            out[s] = std::norm(acc) * envelope[s];
        }
    };
    std::vector<double> shape(n_samples);
    auto fit_scale = [&](const std::vector<double>& m) {
        double num = 0.0, den = 0.0;
        for (int s = 0; s < n_samples; ++s) {
            num += m[s] * data[s];
            den += m[s] * m[s];
        }
        return den > 0.0 ? std::max(0.0, num / den) : 0.0;
    };
    auto objective = [&](const std::vector<double>& phi) {
        model(phi, shape);
        const double scale = fit_scale(shape);
        double delta = 0.0;
        for (int s = 0; s < n_samples; ++s) {
            const double r = scale * shape[s] - data[s];
            delta += r * r;
        }
        return delta;
    };

    PhaseRetrievalResult result;

    const double max_intensity = image_intensities.maxCoeff();
    int significant = 0;
    for (int j = 0; j < dim; ++j)
        if (image_intensities[j] > 1e-12 * max_intensity) ++significant;
    if (significant <= 1) {
        result.underdetermined = true;
        result.phases = RealVec::Zero(dim);
        std::vector<double> zero(dim - 1, 0.0);
        result.residual = objective(zero);
        model(zero, shape);
        result.scale = fit_scale(shape);
        result.estimate = StateVector(moduli.cast<Complex>());
        result.estimate /= result.estimate.norm();
        return result;
    }

    double data_scale = 0.0;
    for (int s = 0; s < n_samples; ++s) data_scale += data[s] * data[s];
    data_scale = std::max(data_scale, 1e-300);

    Rng rng(options.seed);
    std::vector<double> best_point(dim - 1, 0.0);
    double best_value = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < options.restarts; ++restart) {
        std::vector<double> point(dim - 1);
        if (restart == 0) {
            std::fill(point.begin(), point.end(), 0.0);
        } else {
            for (auto& p : point) p = rng.next_uniform(0.0, 2.0 * kPi);
        }
        const double value = simplex_minimize(point, 0.8, objective, options.max_iterations,
                                              options.tol, data_scale);
        result.restart_residuals.push_back(value);
        if (value < best_value) {
            best_value = value;
            best_point = point;
        }
        result.restarts_used = restart + 1;
        // A residual this far below the data scale is a perfect fit up to
        // roundoff; further restarts cannot rank better.
        if (best_value <= 100.0 * options.tol * data_scale) break;
    }

    // Polish the winner with a tight simplex.
    best_value =
        simplex_minimize(best_point, 0.02, objective, options.max_iterations, 1e-15, data_scale);

    RealVec phases(dim);
    phases[0] = 0.0;
    for (int j = 1; j < dim; ++j) phases[j] = wrap_phase(best_point[j - 1]);

    // Conjugate-reflection twin: identical pattern when moduli are palindromic.
    bool palindromic = true;
    for (int j = 0; j < dim; ++j)
        if (std::abs(image_intensities[j] - image_intensities[dim - 1 - j]) >
            1e-9 * std::max(1.0, max_intensity))
            palindromic = false;

    auto state_from = [&](const RealVec& phi) {
        StateVector psi(dim);
        for (int j = 0; j < dim; ++j)
            psi[j] = moduli[j] * Complex(std::cos(phi[j]), std::sin(phi[j]));
        psi /= psi.norm();
        return psi;
    };

    RealVec selected = phases;
    if (palindromic) {
        RealVec twin(dim);
        for (int j = 0; j < dim; ++j)
            twin[j] = wrap_phase(phases[dim - 1] - phases[dim - 1 - j]);
        // Deterministic tie-break between the two candidates.
        bool twin_smaller = false;
        for (int j = 0; j < dim; ++j) {
            if (twin[j] < phases[j] - 1e-12) {
                twin_smaller = true;
                break;
            }
            if (twin[j] > phases[j] + 1e-12) break;
        }
        if (twin_smaller) {
            selected = twin;
            twin = phases;
        }
        result.twin = state_from(twin);
    }

    result.phases = selected;
    result.estimate = state_from(selected);
    std::vector<double> sel(dim - 1);
    for (int j = 1; j < dim; ++j) sel[j - 1] = selected[j];
    result.residual = objective(sel);
    model(sel, shape);
    result.scale = fit_scale(shape);
    return result;
}

double fidelity(const StateVector& a, const StateVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("fidelity: dimension mismatch");
    return std::norm(a.dot(b)) / (a.squaredNorm() * b.squaredNorm());
}

double fidelity(const ComplexMatrix& rho, const StateVector& psi) {
    if (rho.rows() != psi.size() || rho.cols() != psi.size())
        throw std::invalid_argument("fidelity: dimension mismatch");
    return std::real(psi.dot(rho * psi)) / psi.squaredNorm();
}

}  // namespace qsd
