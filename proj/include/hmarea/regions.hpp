#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hmarea/analytic.hpp"
#include "hmarea/errors.hpp"
#include "hmarea/parallel.hpp"

namespace hmarea {

struct Disk {
    double radius = 1.0;

    explicit Disk(double r = 1.0) : radius(r) {
        if (!(r > 0.0 && r <= 1.0)) throw InvalidArgument("disk radius must lie in (0, 1]");
    }
};

/// Star-shaped set {r e^{i theta} : r <= R(theta)} with R sampled at theta_j = 2 pi j / M
/// and interpolated piecewise-linearly (periodically) between samples.
class StarShaped {
public:
    static constexpr std::size_t kMinSamples = 4;

    explicit StarShaped(std::vector<double> profile) : profile_(std::move(profile)) {
        if (profile_.size() < kMinSamples)
            throw InvalidArgument("star profile needs at least " + std::to_string(kMinSamples) + " samples");
        for (double r : profile_)
            if (!(r > 0.0 && r <= 1.0)) throw InvalidArgument("star profile values must lie in (0, 1]");
    }

    const std::vector<double>& profile() const noexcept { return profile_; }
    std::size_t samples() const noexcept { return profile_.size(); }
    double segment_width() const noexcept { return 2.0 * std::numbers::pi / static_cast<double>(profile_.size()); }

    double at(double theta) const noexcept {
        const double two_pi = 2.0 * std::numbers::pi;
        double u = std::fmod(theta, two_pi);
        if (u < 0.0) u += two_pi;
        u *= static_cast<double>(profile_.size()) / two_pi;
        auto j = static_cast<std::size_t>(u);
        if (j >= profile_.size()) j = profile_.size() - 1;
        const double t = u - static_cast<double>(j);
        const double a = profile_[j];
        const double b = profile_[(j + 1) % profile_.size()];
        return a + t * (b - a);
    }

    double max_radius() const noexcept { return *std::max_element(profile_.begin(), profile_.end()); }

private:
    std::vector<double> profile_;
};

/// n x n indicator grid on [-1, 1]^2, row-major with row 0 at y = -1.
/// Cell (i, j) has centre (-1 + (j + 1/2) 2/n, -1 + (i + 1/2) 2/n).
class PixelGrid {
public:
    PixelGrid(int n, std::vector<std::uint8_t> mask) : n_(n), mask_(std::move(mask)) {
        if (n < 1) throw InvalidArgument("grid resolution must be positive");
        if (mask_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
            throw InvalidArgument("grid mask must hold n*n cells");
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                if (cell(i, j) && std::abs(center(i, j)) >= 1.0)
                    throw InvalidArgument("grid cell (" + std::to_string(i) + ", " + std::to_string(j) +
                                          ") lies outside the open unit disk");
    }

    int resolution() const noexcept { return n_; }
    double cell_side() const noexcept { return 2.0 / n_; }
    double cell_area() const noexcept { return cell_side() * cell_side(); }
    const std::vector<std::uint8_t>& mask() const noexcept { return mask_; }

    bool cell(int i, int j) const noexcept {
        return mask_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)] != 0;
    }

    Complex center(int i, int j) const noexcept {
        const double h = cell_side();
        return {-1.0 + (j + 0.5) * h, -1.0 + (i + 0.5) * h};
    }

    std::size_t count() const noexcept {
        return static_cast<std::size_t>(std::count_if(mask_.begin(), mask_.end(), [](auto v) { return v != 0; }));
    }

    /// Centres of true cells in row-major order.
    std::vector<Complex> true_centers() const {
        std::vector<Complex> out;
        out.reserve(count());
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                if (cell(i, j)) out.push_back(center(i, j));
        return out;
    }

private:
    int n_;
    std::vector<std::uint8_t> mask_;
};

using Region = std::variant<Disk, StarShaped, PixelGrid>;

struct MeasureValue {
    double value = 0.0;
    bool exact = false;
};

inline bool is_polar(const Region& e) { return !std::holds_alternative<PixelGrid>(e); }

/// Planar Lebesgue measure under the variant's geometric model.
inline MeasureValue region_measure(const Region& e) {
    return std::visit(
        [](const auto& r) -> MeasureValue {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Disk>) {
                return {std::numbers::pi * r.radius * r.radius, true};
            } else if constexpr (std::is_same_v<T, StarShaped>) {
                // R is linear on each segment, so R^2/2 integrates exactly to w (a^2 + ab + b^2) / 6.
                const auto& p = r.profile();
                CompensatedSum acc;
                for (std::size_t j = 0; j < p.size(); ++j) {
                    const double a = p[j];
                    const double b = p[(j + 1) % p.size()];
                    acc.add(a * a + a * b + b * b);
                }
                return {acc.value() * r.segment_width() / 6.0, true};
            } else {
                return {static_cast<double>(r.count()) * r.cell_area(), true};
            }
        },
        e);
}

inline bool contains(const Region& e, Complex z) {
    return std::visit(
        [z](const auto& r) -> bool {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Disk>) {
                return std::abs(z) <= r.radius;
            } else if constexpr (std::is_same_v<T, StarShaped>) {
                const double rho = std::abs(z);
                if (rho == 0.0) return true;
                return rho <= r.at(std::arg(z));
            } else {
                const double h = r.cell_side();
                const double x = (z.real() + 1.0) / h;
                const double y = (z.imag() + 1.0) / h;
                if (x < 0.0 || y < 0.0) return false;
                const auto j = static_cast<int>(x);
                const auto i = static_cast<int>(y);
                if (i >= r.resolution() || j >= r.resolution()) return false;
                return r.cell(i, j);
            }
        },
        e);
}

/// R(theta) for disks and star-shaped regions.
inline double radial_profile(const Region& e, double theta) {
    if (const auto* d = std::get_if<Disk>(&e)) return d->radius;
    if (const auto* s = std::get_if<StarShaped>(&e)) return s->at(theta);
    throw InvalidArgument("radial profile is undefined for pixel grids");
}

/// Largest |z| over the region (grid: farthest true-cell centre).
inline double max_radius(const Region& e) {
    if (const auto* d = std::get_if<Disk>(&e)) return d->radius;
    if (const auto* s = std::get_if<StarShaped>(&e)) return s->max_radius();
    double m = 0.0;
    for (auto z : std::get<PixelGrid>(e).true_centers()) m = std::max(m, std::abs(z));
    return m;
}

/// t E for t in (0, 1]; polar regions only.
inline Region dilate(const Region& e, double t) {
    if (const auto* d = std::get_if<Disk>(&e)) return Disk(d->radius * t);
    if (const auto* s = std::get_if<StarShaped>(&e)) {
        auto p = s->profile();
        for (auto& r : p) r *= t;
        return StarShaped(std::move(p));
    }
    throw InvalidArgument("dilation is defined for polar regions only");
}

namespace detail {

inline PixelGrid rasterize_any(const Region& e, int n) {
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
    const double h = 2.0 / n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Complex c{-1.0 + (j + 0.5) * h, -1.0 + (i + 0.5) * h};
            if (std::abs(c) < 1.0 && contains(e, c))
                mask[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)] = 1;
        }
    return PixelGrid(n, std::move(mask));
}

}  // namespace detail

/// Cell-centre rasterization at resolution n (power of two in [64, 4096]).
inline PixelGrid rasterize(const Region& e, int n) {
    if (n < 64 || n > 4096 || (n & (n - 1)) != 0)
        throw InvalidArgument("raster resolution must be a power of two in [64, 4096]");
    return detail::rasterize_any(e, n);
}

}  // namespace hmarea
