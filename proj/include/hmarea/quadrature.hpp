#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hmarea/analytic.hpp"
#include "hmarea/errors.hpp"
#include "hmarea/parallel.hpp"
#include "hmarea/regions.hpp"

namespace hmarea {

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;  // |finest - previous level|
    long long evals = 0;
    std::vector<std::string> warnings;
};

struct QuadOptions {
    double tol = 1e-9;
    int q0 = 16;        // initial radial Gauss-Legendre nodes
    int m0 = 64;        // initial angular nodes
    int q_cap = 256;
    int m_cap = 4096;
    unsigned workers = 1;
};

/// Gauss-Legendre nodes and weights on [-1, 1], ascending nodes.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussRule gauss_legendre(int q) {
    if (q < 1) throw InvalidArgument("Gauss-Legendre rule needs at least one node");
    GaussRule rule{std::vector<double>(static_cast<std::size_t>(q)), std::vector<double>(static_cast<std::size_t>(q))};
    const int half = (q + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= q; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = q * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= q; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = q * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(q - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(q - 1 - i)] = w;
    }
    if (q % 2 == 1) rule.nodes[static_cast<std::size_t>(q / 2)] = 0.0;
    return rule;
}

namespace detail {

/// int_0^R F(r e^{i theta}) r dr with the given rule.
template <class Field>
double radial_integral(const Field& field, const GaussRule& rule, double radius, double theta) {
    const Complex dir = std::polar(1.0, theta);
    CompensatedSum acc;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double r = 0.5 * radius * (rule.nodes[i] + 1.0);
        acc.add(rule.weights[i] * field(dir * r) * r);
    }
    return 0.5 * radius * acc.value();
}

/// Angular nodes/weights for one refinement level.
struct AngularRule {
    std::vector<double> theta;
    std::vector<double> weight;
};

inline AngularRule trapezoid_rule(int m) {
    AngularRule a;
    a.theta.resize(static_cast<std::size_t>(m));
    a.weight.assign(static_cast<std::size_t>(m), 2.0 * std::numbers::pi / m);
    for (int j = 0; j < m; ++j) a.theta[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * j / m;
    return a;
}

/// Gauss-Legendre with m nodes on every profile segment.
inline AngularRule segmented_rule(std::size_t segments, int m) {
    const GaussRule g = gauss_legendre(m);
    const double width = 2.0 * std::numbers::pi / static_cast<double>(segments);
    AngularRule a;
    a.theta.reserve(segments * static_cast<std::size_t>(m));
    a.weight.reserve(segments * static_cast<std::size_t>(m));
    for (std::size_t s = 0; s < segments; ++s) {
        const double lo = width * static_cast<double>(s);
        for (int k = 0; k < m; ++k) {
            a.theta.push_back(lo + 0.5 * width * (g.nodes[static_cast<std::size_t>(k)] + 1.0));
            a.weight.push_back(0.5 * width * g.weights[static_cast<std::size_t>(k)]);
        }
    }
    return a;
}

template <class Field>
double polar_level(const Field& field, const Region& e, const GaussRule& radial, const AngularRule& angular,
                   unsigned workers) {
    const auto terms = ordered_map<double>(angular.theta.size(), workers, [&](std::size_t j) {
        const double theta = angular.theta[j];
        return angular.weight[j] * radial_integral(field, radial, radial_profile(e, theta), theta);
    });
    return compensated_sum(terms);
}

}  // namespace detail

/// Tensor-product polar quadrature over a disk or star-shaped region.
///
/// Radius: Gauss-Legendre on [0, R(theta)] with weight r. Angle: periodic trapezoid for
/// disks, per-segment Gauss-Legendre for star profiles (the piecewise-linear profile has
/// kinks at the sample angles). Node counts double together until two successive levels
/// agree to tol * max(1, |value|). Throws NonConvergenceError when the caps are reached
/// with a discrepancy above 10 * tol.
template <class Field>
QuadResult integrate_polar(const Field& field, const Region& e, const QuadOptions& opt = {}) {
    if (!is_polar(e)) throw InvalidArgument("integrate_polar requires a disk or star-shaped region");
    if (!(opt.tol >= 1e-12)) throw InvalidArgument("quadrature tolerance must be at least 1e-12");

    const auto* star = std::get_if<StarShaped>(&e);
    const std::size_t segments = star ? star->samples() : 0;
    int q = std::min(opt.q0, opt.q_cap);
    int m = 0;
    int m_limit = 0;
    if (star) {
        m_limit = std::max(2, static_cast<int>(opt.m_cap / static_cast<int>(segments)));
        m = std::min(m_limit, std::max(2, (opt.m0 + static_cast<int>(segments) - 1) / static_cast<int>(segments)));
    } else {
        m_limit = opt.m_cap;
        m = std::min(opt.m0, opt.m_cap);
    }

    QuadResult res;
    bool have_prev = false;
    double prev = 0.0;
    for (;;) {
        const GaussRule radial = gauss_legendre(q);
        const detail::AngularRule angular = star ? detail::segmented_rule(segments, m) : detail::trapezoid_rule(m);
        const double value = detail::polar_level(field, e, radial, angular, opt.workers);
        res.evals += static_cast<long long>(angular.theta.size()) * q;
        if (have_prev) {
            res.value = value;
            res.error_estimate = std::abs(value - prev);
            if (res.error_estimate <= opt.tol * std::max(1.0, std::abs(value))) return res;
        }
        const int next_q = std::min(2 * q, opt.q_cap);
        const int next_m = std::min(2 * m, m_limit);
        if (next_q == q && next_m == m) {
            if (!have_prev) {
                res.value = value;
                res.error_estimate = 0.0;
                res.warnings.push_back("single refinement level available; error estimate unavailable");
                return res;
            }
            if (res.error_estimate > 10.0 * opt.tol * std::max(1.0, std::abs(value))) {
                throw NonConvergenceError("polar quadrature reached caps q=" + std::to_string(q) + ", M=" +
                                              std::to_string(angular.theta.size()) + " with levels " +
                                              std::to_string(prev) + " and " + std::to_string(value),
                                          prev, value);
            }
            res.warnings.push_back("refinement caps reached; error estimate above tolerance");
            return res;
        }
        prev = value;
        have_prev = true;
        q = next_q;
        m = next_m;
    }
}

/// Midpoint rule over the true cells of a pixel grid. The error estimate compares with
/// the midpoint rule on the mask refined once dyadically (each cell split into four).
template <class Field>
QuadResult integrate_grid(const Field& field, const PixelGrid& grid, unsigned workers = 1) {
    const auto centers = grid.true_centers();
    const double h = grid.cell_side();
    const double q = 0.25 * h;
    const auto coarse = ordered_map<double>(centers.size(), workers, [&](std::size_t k) { return field(centers[k]); });
    // refined mask: the four sub-cells of each true cell whose centres stay in the open disk
    const auto fine = ordered_map<double>(centers.size(), workers, [&](std::size_t k) {
        const Complex c = centers[k];
        CompensatedSum s;
        for (const Complex d : {Complex{-q, -q}, Complex{q, -q}, Complex{-q, q}, Complex{q, q}})
            if (std::abs(c + d) < 1.0) s.add(field(c + d));
        return s.value();
    });
    QuadResult res;
    res.value = compensated_sum(coarse) * grid.cell_area();
    const double refined = compensated_sum(fine) * 0.25 * grid.cell_area();
    res.error_estimate = std::abs(refined - res.value);
    res.evals = static_cast<long long>(centers.size()) * 5;
    if (res.evals == 0) res.warnings.push_back("empty grid region");
    return res;
}

namespace detail {

inline std::size_t occupied_image_cells(const HarmonicMap& f, const std::vector<Complex>& points, int n,
                                        std::size_t& dropped) {
    const double lo = -2.0;
    const double side = 4.0 / n;
    std::vector<std::uint8_t> hit(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
    dropped = 0;
    for (const auto& z : points) {
        const Complex w = eval_map(f, z);
        const double x = (w.real() - lo) / side;
        const double y = (w.imag() - lo) / side;
        if (!(x >= 0.0 && y >= 0.0 && x < n && y < n)) {
            ++dropped;
            continue;
        }
        hit[static_cast<std::size_t>(y) * static_cast<std::size_t>(n) + static_cast<std::size_t>(x)] = 1;
    }
    // close gaps between mapped samples: dilate by one cell (3x3), then erode by one cell
    const auto any_near = [n](const std::vector<std::uint8_t>& m, int i, int j, bool want) {
        for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj) {
                const int ii = i + di, jj = j + dj;
                const bool on = ii >= 0 && jj >= 0 && ii < n && jj < n &&
                                m[static_cast<std::size_t>(ii) * static_cast<std::size_t>(n) + static_cast<std::size_t>(jj)];
                if (on == want) return true;
            }
        return false;
    };
    std::vector<std::uint8_t> dilated(hit.size(), 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            dilated[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)] =
                any_near(hit, i, j, true) ? 1 : 0;
    std::size_t count = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!any_near(dilated, i, j, false)) ++count;
    return count;
}

}  // namespace detail

/// Jacobian-free estimate of m(f(E)): rasterize E at n, push cell centres through f,
/// mark the occupied cells of an n x n grid over [-2, 2]^2, close gaps (dilate then erode by
/// one cell) and measure. The error estimate is the gap to a second pass at n/2 whose samples are
/// jittered inside their cells by a generator seeded with `seed`.
/// f must be injective on E; that is not checked.
inline QuadResult mc_image_area(const HarmonicMap& f, const Region& e, int n, std::uint64_t seed) {
    if (n < 64 || n > 4096 || (n & (n - 1)) != 0)
        throw InvalidArgument("oracle resolution must be a power of two in [64, 4096]");
    QuadResult res;

    const auto fine_pts = rasterize(e, n).true_centers();
    std::size_t dropped = 0;
    const double cell = (4.0 / n) * (4.0 / n);
    res.value = static_cast<double>(detail::occupied_image_cells(f, fine_pts, n, dropped)) * cell;
    if (dropped) res.warnings.push_back(std::to_string(dropped) + " image points fell outside [-2, 2]^2");

    const int nc = n / 2;
    const PixelGrid coarse = detail::rasterize_any(e, nc);
    auto coarse_pts = coarse.true_centers();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.25 * coarse.cell_side(), 0.25 * coarse.cell_side());
    for (auto& z : coarse_pts) {
        Complex p = z + Complex{jitter(rng), jitter(rng)};
        if (std::abs(p) > 1.0) p = z;
        z = p;
    }
    std::size_t dropped_coarse = 0;
    const double coarse_cell = (4.0 / nc) * (4.0 / nc);
    const double coarse_value =
        static_cast<double>(detail::occupied_image_cells(f, coarse_pts, nc, dropped_coarse)) * coarse_cell;
    res.error_estimate = std::abs(res.value - coarse_value);
    res.evals = static_cast<long long>(fine_pts.size() + coarse_pts.size());
    return res;
}

}  // namespace hmarea
