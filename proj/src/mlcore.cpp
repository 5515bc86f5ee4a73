#include "faup/mlcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "faup/error.hpp"

namespace faup {

namespace {

void require_finite(std::span<const double> v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) throw InvalidInputError(std::string(what) + ": non-finite value");
    }
}

// Largest-magnitude entry positive; the first one wins ties.
void fix_sign(Vector& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (std::abs(v[i]) > std::abs(v[best]) + 1e-12) best = i;
    }
    if (!v.empty() && v[best] < 0.0) {
        for (auto& x : v) x = -x;
    }
}

void orthonormalize(std::vector<Vector>& vs) {
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i < vs.size(); ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                const double p = dot(vs[i], vs[j]);
                for (std::size_t t = 0; t < vs[i].size(); ++t) vs[i][t] -= p * vs[j][t];
            }
            const double n = norm(vs[i]);
            for (auto& x : vs[i]) x /= n;
        }
    }
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

SymmetricEigen jacobi_eigen(const Matrix& sym) {
    const std::size_t n = sym.rows();
    if (sym.cols() != n) throw InvalidInputError("jacobi_eigen: matrix must be square");
    Matrix a = sym;
    Matrix v(n, n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) total += a(i, j) * a(i, j);
    const double stop = std::max(total, std::numeric_limits<double>::min()) * 1e-30;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
        if (off <= stop) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
    SymmetricEigen out;
    for (auto i : order) {
        out.values.push_back(a(i, i));
        Vector col(n);
        for (std::size_t k = 0; k < n; ++k) col[k] = v(k, i);
        out.vectors.push_back(std::move(col));
    }
    return out;
}

PcaModel pca_fit(std::span<const Vector> samples, std::size_t k, PcaMethod method) {
    const std::size_t n = samples.size();
    if (n < 2) throw InvalidInputError("pca_fit: need at least two samples");
    const std::size_t d = samples.front().size();
    if (d == 0) throw InvalidInputError("pca_fit: empty samples");
    for (const auto& s : samples) {
        if (s.size() != d) throw InvalidInputError("pca_fit: samples differ in dimension");
        require_finite(s, "pca_fit");
    }
    if (k < 1 || k > std::min(d, n - 1)) {
        throw InvalidInputError("pca_fit: k must lie in [1, min(d, n - 1)]");
    }

    PcaModel m;
    m.mean.assign(d, 0.0);
    for (const auto& s : samples)
        for (std::size_t j = 0; j < d; ++j) m.mean[j] += s[j];
    for (auto& x : m.mean) x /= static_cast<double>(n);

    std::vector<Vector> centered(n, Vector(d));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) centered[i][j] = samples[i][j] - m.mean[j];

    if (method == PcaMethod::automatic) method = d <= n ? PcaMethod::covariance : PcaMethod::gram;
    const double denom = static_cast<double>(n - 1);

    if (method == PcaMethod::covariance) {
        Matrix cov(d, d);
        for (const auto& c : centered)
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = i; j < d; ++j) cov(i, j) += c[i] * c[j];
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i; j < d; ++j) cov(j, i) = cov(i, j) = cov(i, j) / denom;
        auto eig = jacobi_eigen(cov);
        const double top = std::max(eig.values.front(), 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            // Zero-variance directions are kept but flagged.
            if (!(eig.values[i] > top * 1e-10) || top == 0.0) m.truncated = true;
            m.eigenvalues.push_back(std::max(0.0, eig.values[i]));
            m.components.push_back(std::move(eig.vectors[i]));
        }
    } else {
        Matrix gram(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) gram(j, i) = gram(i, j) = dot(centered[i], centered[j]);
        const auto eig = jacobi_eigen(gram);
        const double top = std::max(eig.values.front(), 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            if (!(eig.values[i] > top * 1e-10) || top == 0.0) {
                m.truncated = true;
                break;
            }
            Vector u(d, 0.0);
            for (std::size_t s = 0; s < n; ++s) {
                const double w = eig.vectors[i][s];
                for (std::size_t j = 0; j < d; ++j) u[j] += w * centered[s][j];
            }
            const double un = norm(u);
            for (auto& x : u) x /= un;
            m.components.push_back(std::move(u));
            m.eigenvalues.push_back(eig.values[i] / denom);
        }
    }
    orthonormalize(m.components);
    for (auto& c : m.components) fix_sign(c);
    return m;
}

Vector pca_project(const PcaModel& m, std::span<const double> x) {
    if (x.size() != m.dims()) throw InvalidInputError("pca_project: dimension mismatch");
    Vector centered(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) centered[j] = x[j] - m.mean[j];
    Vector z(m.k());
    for (std::size_t i = 0; i < m.k(); ++i) z[i] = dot(m.components[i], centered);
    return z;
}

Vector pca_reconstruct(const PcaModel& m, std::span<const double> z) {
    if (z.size() != m.k()) throw InvalidInputError("pca_reconstruct: dimension mismatch");
    Vector x = m.mean;
    for (std::size_t i = 0; i < m.k(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) x[j] += z[i] * m.components[i][j];
    return x;
}

SvmTrainResult svm_train_detailed(std::span<const SvmSample> samples, double C, const SvmOptions& opts) {
    if (!(C > 0.0) || !std::isfinite(C)) throw InvalidInputError("svm_train: C must be positive");
    const std::size_t n = samples.size();
    if (n < 2) throw InvalidInputError("svm_train: need at least two samples");
    const std::size_t d = samples.front().x.size();
    bool has_pos = false;
    bool has_neg = false;
    for (const auto& s : samples) {
        if (s.x.size() != d) throw InvalidInputError("svm_train: samples differ in dimension");
        if (s.y != 1 && s.y != -1) throw InvalidInputError("svm_train: labels must be +1 or -1");
        require_finite(s.x, "svm_train");
        (s.y > 0 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) throw InvalidInputError("svm_train: both classes must be present");

    Matrix K(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) K(j, i) = K(i, j) = dot(samples[i].x, samples[j].x);

    Vector alpha(n, 0.0);
    Vector grad(n, -1.0);  // gradient of 0.5 a'Qa - e'a
    auto y = [&](std::size_t t) { return static_cast<double>(samples[t].y); };
    auto in_up = [&](std::size_t t) { return (samples[t].y > 0 && alpha[t] < C) || (samples[t].y < 0 && alpha[t] > 0.0); };
    auto in_low = [&](std::size_t t) { return (samples[t].y > 0 && alpha[t] > 0.0) || (samples[t].y < 0 && alpha[t] < C); };

    SvmTrainResult res;
    const std::size_t max_iter = opts.max_epochs * n;
    double gap = 0.0;
    for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
        // Maximal violating pair.
        std::size_t i = n;
        std::size_t j = n;
        double vmax = -std::numeric_limits<double>::infinity();
        double vmin = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -y(t) * grad[t];
            if (in_up(t) && v > vmax) { vmax = v; i = t; }
            if (in_low(t) && v < vmin) { vmin = v; j = t; }
        }
        gap = (i == n || j == n) ? 0.0 : vmax - vmin;
        if (gap <= opts.tolerance) {
            res.converged = true;
            break;
        }

        const double qii = K(i, i);
        const double qjj = K(j, j);
        const double qij = y(i) * y(j) * K(i, j);
        const double old_i = alpha[i];
        const double old_j = alpha[j];
        if (samples[i].y != samples[j].y) {
            double quad = qii + qjj + 2.0 * qij;
            if (quad <= 0.0) quad = 1e-12;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = diff; }
            } else {
                if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = -diff; }
            }
            if (diff > 0.0) {
                if (alpha[i] > C) { alpha[i] = C; alpha[j] = C - diff; }
            } else {
                if (alpha[j] > C) { alpha[j] = C; alpha[i] = C + diff; }
            }
        } else {
            double quad = qii + qjj - 2.0 * qij;
            if (quad <= 0.0) quad = 1e-12;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) { alpha[i] = C; alpha[j] = sum - C; }
            } else {
                if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = sum; }
            }
            if (sum > C) {
                if (alpha[j] > C) { alpha[j] = C; alpha[i] = sum - C; }
            } else {
                if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = sum; }
            }
        }
        const double di = alpha[i] - old_i;
        const double dj = alpha[j] - old_j;
        for (std::size_t t = 0; t < n; ++t) {
            grad[t] += y(t) * (y(i) * K(t, i) * di + y(j) * K(t, j) * dj);
        }
    }

    SvmModel& m = res.model;
    m.C = C;
    m.weights.assign(d, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] == 0.0) continue;
        for (std::size_t k = 0; k < d; ++k) m.weights[k] += alpha[t] * y(t) * samples[t].x[k];
    }

    // Bias from free support vectors; otherwise the midpoint of the feasible
    // interval left by the bounded ones.
    double sum_b = 0.0;
    std::size_t free_n = 0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
        const double wx = dot(m.weights, samples[t].x);
        const double target = y(t) - wx;  // b that puts the sample on its margin
        if (alpha[t] > 0.0 && alpha[t] < C) {
            sum_b += target;
            ++free_n;
        } else if ((alpha[t] == 0.0) == (samples[t].y > 0)) {
            lo = std::max(lo, target);
        } else {
            hi = std::min(hi, target);
        }
    }
    if (free_n > 0) {
        m.bias = sum_b / static_cast<double>(free_n);
    } else if (std::isfinite(lo) && std::isfinite(hi)) {
        m.bias = 0.5 * (lo + hi);
    } else {
        m.bias = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
    }

    const double wn = norm(m.weights);
    m.margin = wn > 0.0 ? 2.0 / wn : std::numeric_limits<double>::infinity();
    int svs = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yf = y(t) * (dot(m.weights, samples[t].x) + m.bias);
        if (alpha[t] > 0.0 || yf <= 1.0 + 1e-6) ++svs;
    }
    m.sv_count = svs;

    res.alphas = alpha;
    res.kkt_residual = svm_kkt_residual(samples, alpha, m.weights, m.bias, C);
    res.dual_objective = std::accumulate(alpha.begin(), alpha.end(), 0.0) - 0.5 * wn * wn;
    return res;
}

SvmModel svm_train(std::span<const SvmSample> samples, double C, const SvmOptions& opts) {
    return svm_train_detailed(samples, C, opts).model;
}

SvmPrediction svm_predict(const SvmModel& m, std::span<const double> x) {
    if (x.size() != m.weights.size()) throw InvalidInputError("svm_predict: dimension mismatch");
    SvmPrediction p;
    p.score = dot(m.weights, x) + m.bias;
    p.label = p.score >= 0.0 ? 1 : -1;
    return p;
}

double svm_primal_objective(std::span<const double> w, double b, std::span<const SvmSample> samples, double C) {
    double hinge = 0.0;
    for (const auto& s : samples) {
        hinge += std::max(0.0, 1.0 - s.y * (dot(w, s.x) + b));
    }
    return 0.5 * dot(w, w) + C * hinge;
}

double svm_kkt_residual(std::span<const SvmSample> samples, std::span<const double> alphas,
                        std::span<const double> w, double b, double C) {
    double worst = 0.0;
    // Dual variables within this of a bound count as at the bound.
    const double at_bound = 1e-12 * std::max(1.0, C);
    for (std::size_t t = 0; t < samples.size(); ++t) {
        const double m = samples[t].y * (dot(w, samples[t].x) + b);
        double v = 0.0;
        if (alphas[t] <= at_bound) {
            v = std::max(0.0, 1.0 - m);
        } else if (alphas[t] >= C - at_bound) {
            v = std::max(0.0, m - 1.0);
        } else {
            v = std::abs(m - 1.0);
        }
        worst = std::max(worst, v);
    }
    return worst;
}

}  // namespace faup
