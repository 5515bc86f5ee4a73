#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "oracles.hpp"

namespace oracle {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> project(const std::vector<double>& v, const std::vector<double>& y, double C) {
    auto at = [&](double lambda, std::vector<double>* out) {
        double g = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double a = std::clamp(v[i] - lambda * y[i], 0.0, C);
            g += y[i] * a;
            if (out) (*out)[i] = a;
        }
        return g;
    };
    double hi = C + 1.0;
    for (double x : v) hi = std::max(hi, std::abs(x) + C + 1.0);
    double lo = -hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (at(mid, nullptr) > 0.0 ? lo : hi) = mid;
    }
    std::vector<double> out(v.size());
    at(0.5 * (lo + hi), &out);
    return out;
}

}  // namespace

QpSolution qp_oracle_train(std::span<const faup::SvmSample> samples, double C, double target_gap) {
    const std::size_t n = samples.size();
    if (n > 12) throw std::invalid_argument("qp oracle: more than 12 samples");
    if (n == 0) throw std::invalid_argument("qp oracle: no samples");
    const std::size_t d = samples[0].x.size();
    if (d > 3) throw std::invalid_argument("qp oracle: more than 3 features");

    std::vector<double> y(n);
    std::vector<std::vector<double>> Q(n, std::vector<double>(n));
    double frob = 0.0;
    for (std::size_t i = 0; i < n; ++i) y[i] = samples[i].y;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            Q[i][j] = y[i] * y[j] * dot(samples[i].x, samples[j].x);
            frob += Q[i][j] * Q[i][j];
        }
    }
    const double step = 1.0 / std::max(std::sqrt(frob), 1e-12);

    auto grad = [&](const std::vector<double>& a) {
        std::vector<double> g(n, -1.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) g[i] += Q[i][j] * a[j];
        return g;
    };

    QpSolution sol;
    auto evaluate = [&](const std::vector<double>& a) {
        std::vector<double> w(d, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < d; ++k) w[k] += a[i] * y[i] * samples[i].x[k];
        const double ww = dot(w, w);
        double sum_a = 0.0;
        for (double x : a) sum_a += x;
        // The primal is convex and piecewise linear in b with breakpoints where
        // a sample sits on its margin.
        auto primal_at = [&](double b) {
            double h = 0.0;
            for (std::size_t i = 0; i < n; ++i) h += std::max(0.0, 1.0 - y[i] * (dot(w, samples[i].x) + b));
            return 0.5 * ww + C * h;
        };
        double best = std::numeric_limits<double>::infinity();
        double lo_b = 0.0;
        double hi_b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double b = y[i] - dot(w, samples[i].x);
            const double p = primal_at(b);
            if (p < best - 1e-13) {
                best = p;
                lo_b = hi_b = b;
            } else if (p <= best + 1e-13) {
                lo_b = std::min(lo_b, b);
                hi_b = std::max(hi_b, b);
            }
        }
        sol.weights = w;
        sol.bias = 0.5 * (lo_b + hi_b);
        sol.primal = primal_at(sol.bias);
        sol.dual = sum_a - 0.5 * ww;
        sol.gap = sol.primal - sol.dual;
    };

    std::vector<double> a(n, 0.0);
    std::vector<double> z = a;
    double t = 1.0;
    for (sol.iterations = 1; sol.iterations <= 2'000'000; ++sol.iterations) {
        const auto g = grad(z);
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = z[i] - step * g[i];
        const auto next = project(v, y, C);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        for (std::size_t i = 0; i < n; ++i) z[i] = next[i] + ((t - 1.0) / t_next) * (next[i] - a[i]);
        a = next;
        t = t_next;
        if (sol.iterations % 200 == 0) {
            evaluate(a);
            if (sol.gap <= target_gap) return sol;
            t = 1.0;  // restart keeps the momentum from oscillating
            z = a;
        }
    }
    evaluate(a);
    return sol;
}

}  // namespace oracle
