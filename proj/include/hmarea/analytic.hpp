#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hmarea/errors.hpp"

namespace hmarea {

using Complex = std::complex<double>;

inline constexpr std::size_t kDefaultDegreeCap = 64;
inline constexpr double kDiskSlack = 1e-12;
inline constexpr double kPoleGuard = 1e-14;
inline constexpr double kCriticalGuard = 1e-12;

namespace detail {

inline void require_finite(Complex z, const char* what) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw InvalidArgument(std::string(what) + ": non-finite complex value");
}

inline void require_in_disk(Complex z) {
    require_finite(z, "evaluation point");
    if (std::abs(z) > 1.0 + kDiskSlack)
        throw DomainError("point " + format_point(z) + " lies outside the closed unit disk");
}

}  // namespace detail

/// Truncated power series c_0 + c_1 z + ... + c_N z^N.
class AnalyticSeries {
public:
    AnalyticSeries() : coeffs_{Complex{}} {}

    explicit AnalyticSeries(std::vector<Complex> coeffs, std::size_t degree_cap = kDefaultDegreeCap)
        : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) coeffs_.push_back(Complex{});
        if (coeffs_.size() > degree_cap + 1)
            throw InvalidArgument("series degree " + std::to_string(coeffs_.size() - 1) +
                                  " exceeds cap " + std::to_string(degree_cap));
        for (const auto& c : coeffs_) detail::require_finite(c, "series coefficient");
    }

    std::size_t degree() const noexcept { return coeffs_.size() - 1; }
    const std::vector<Complex>& coefficients() const noexcept { return coeffs_; }

    /// Horner evaluation without the disk check; used internally where z is known valid.
    Complex horner(Complex z) const noexcept {
        Complex acc{};
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
        return acc;
    }

    AnalyticSeries scaled(Complex c) const {
        auto out = coeffs_;
        for (auto& v : out) v *= c;
        return AnalyticSeries(std::move(out), std::max(kDefaultDegreeCap, degree()));
    }

    friend AnalyticSeries operator+(const AnalyticSeries& a, const AnalyticSeries& b) {
        std::vector<Complex> out(std::max(a.coeffs_.size(), b.coeffs_.size()));
        for (std::size_t k = 0; k < a.coeffs_.size(); ++k) out[k] += a.coeffs_[k];
        for (std::size_t k = 0; k < b.coeffs_.size(); ++k) out[k] += b.coeffs_[k];
        const std::size_t cap = std::max(kDefaultDegreeCap, out.size());
        return AnalyticSeries(std::move(out), cap);
    }

    friend bool operator==(const AnalyticSeries&, const AnalyticSeries&) = default;

private:
    std::vector<Complex> coeffs_;
};

/// Σ c_k z^k for |z| <= 1.
inline Complex eval_series(const AnalyticSeries& s, Complex z) {
    detail::require_in_disk(z);
    return s.horner(z);
}

/// Term-wise derivative; the derivative of a constant is the zero series.
inline AnalyticSeries derivative(const AnalyticSeries& s) {
    const auto& c = s.coefficients();
    if (c.size() <= 1) return AnalyticSeries({Complex{}});
    std::vector<Complex> out(c.size() - 1);
    for (std::size_t k = 0; k + 1 < c.size(); ++k) out[k] = static_cast<double>(k + 1) * c[k + 1];
    return AnalyticSeries(std::move(out));
}

/// f = h + conj(g) with polynomial h and g. Derivatives are cached on construction.
struct PolynomialForm {
    AnalyticSeries h;
    AnalyticSeries g;
    AnalyticSeries dh;
    AnalyticSeries dg;

    PolynomialForm(AnalyticSeries h_, AnalyticSeries g_)
        : h(std::move(h_)), g(std::move(g_)), dh(derivative(h)), dg(derivative(g)) {}
};

/// Disk automorphism e^{i rotation} (z - a) / (1 - conj(a) z), evaluated in closed form.
struct AutomorphismForm {
    Complex a;
    double rotation = 0.0;
};

class HarmonicMap {
public:
    using Form = std::variant<PolynomialForm, AutomorphismForm>;

    static HarmonicMap polynomial(AnalyticSeries h, AnalyticSeries g) {
        return HarmonicMap(PolynomialForm(std::move(h), std::move(g)));
    }

    static HarmonicMap automorphism(Complex a, double rotation) {
        detail::require_finite(a, "automorphism centre");
        if (!std::isfinite(rotation)) throw InvalidArgument("automorphism rotation must be finite");
        if (std::abs(a) >= 1.0) throw InvalidArgument("automorphism requires |a| < 1");
        return HarmonicMap(AutomorphismForm{a, rotation});
    }

    const Form& form() const noexcept { return form_; }
    bool is_polynomial() const noexcept { return std::holds_alternative<PolynomialForm>(form_); }
    bool is_automorphism() const noexcept { return std::holds_alternative<AutomorphismForm>(form_); }
    const PolynomialForm& as_polynomial() const { return std::get<PolynomialForm>(form_); }
    const AutomorphismForm& as_automorphism() const { return std::get<AutomorphismForm>(form_); }

    /// c * f for real c > 0. Polynomial maps only; automorphisms are already self-maps.
    HarmonicMap scaled(double c) const {
        if (!is_polynomial()) throw InvalidArgument("only polynomial maps can be rescaled");
        if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("scale factor must be positive");
        const auto& p = as_polynomial();
        return polynomial(p.h.scaled(c), p.g.scaled(c));
    }

private:
    explicit HarmonicMap(Form f) : form_(std::move(f)) {}
    Form form_;
};

namespace detail {

inline Complex mobius_denominator(const AutomorphismForm& m, Complex z) {
    const Complex den = 1.0 - std::conj(m.a) * z;
    if (std::abs(den) < kPoleGuard)
        throw DomainError("automorphism pole at " + format_point(z));
    return den;
}

inline Complex unchecked_eval(const HarmonicMap& f, Complex z) {
    if (f.is_polynomial()) {
        const auto& p = f.as_polynomial();
        return p.h.horner(z) + std::conj(p.g.horner(z));
    }
    const auto& m = f.as_automorphism();
    return std::polar(1.0, m.rotation) * (z - m.a) / mobius_denominator(m, z);
}

inline double unchecked_jacobian(const HarmonicMap& f, Complex z) {
    if (f.is_polynomial()) {
        const auto& p = f.as_polynomial();
        return std::norm(p.dh.horner(z)) - std::norm(p.dg.horner(z));
    }
    const auto& m = f.as_automorphism();
    const double num = 1.0 - std::norm(m.a);
    const double den = std::norm(mobius_denominator(m, z));
    return num * num / (den * den);
}

inline double unchecked_hprime_sq(const HarmonicMap& f, Complex z) {
    if (f.is_polynomial()) return std::norm(f.as_polynomial().dh.horner(z));
    return unchecked_jacobian(f, z);
}

}  // namespace detail

inline Complex eval_map(const HarmonicMap& f, Complex z) {
    detail::require_in_disk(z);
    return detail::unchecked_eval(f, z);
}

/// J_f = |h'|^2 - |g'|^2; for automorphisms (1-|a|^2)^2 / |1 - conj(a) z|^4.
inline double jacobian(const HarmonicMap& f, Complex z) {
    detail::require_in_disk(z);
    return detail::unchecked_jacobian(f, z);
}

/// |h'(z)|^2, the analytic energy density. Equals the Jacobian for automorphisms.
inline double hprime_sq(const HarmonicMap& f, Complex z) {
    detail::require_in_disk(z);
    return detail::unchecked_hprime_sq(f, z);
}

/// Second complex dilatation g'/h'. Identically zero for automorphisms.
inline Complex dilatation(const HarmonicMap& f, Complex z) {
    detail::require_in_disk(z);
    if (f.is_automorphism()) return Complex{};
    const auto& p = f.as_polynomial();
    const Complex dh = p.dh.horner(z);
    if (std::abs(dh) < kCriticalGuard)
        throw CriticalPointError("h' vanishes at " + detail::format_point(z) + "; dilatation undefined", z);
    return p.dg.horner(z) / dh;
}

// ---------------------------------------------------------------------------
// Built-in families

struct AffineSpec {
    Complex alpha;
};
struct ShearSpec {
    Complex alpha;
    int power = 2;
};
struct AutomorphismSpec {
    Complex a;
    double rotation = 0.0;
};
struct RawSpec {
    std::vector<Complex> h;
    std::vector<Complex> g;
};

/// Description of a map before construction. `scale` multiplies the whole map
/// (used to turn e.g. z + 0.5 conj(z) into a self-map of the disk).
struct MapSpec {
    std::variant<AffineSpec, ShearSpec, AutomorphismSpec, RawSpec> kind;
    double scale = 1.0;
};

inline HarmonicMap construct_map(const MapSpec& spec) {
    HarmonicMap f = std::visit(
        [](const auto& s) -> HarmonicMap {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, AffineSpec>) {
                detail::require_finite(s.alpha, "affine alpha");
                if (std::abs(s.alpha) >= 1.0) throw InvalidArgument("affine map requires |alpha| < 1");
                // z + alpha conj(z) = h + conj(g) with g = conj(alpha) z
                return HarmonicMap::polynomial(AnalyticSeries({0.0, 1.0}),
                                               AnalyticSeries({0.0, std::conj(s.alpha)}));
            } else if constexpr (std::is_same_v<T, ShearSpec>) {
                detail::require_finite(s.alpha, "shear alpha");
                if (s.power < 2 || static_cast<std::size_t>(s.power) > kDefaultDegreeCap)
                    throw InvalidArgument("shear power must lie in [2, 64]");
                if (s.power * std::abs(s.alpha) >= 1.0)
                    throw InvalidArgument("shear requires power * |alpha| < 1 for sense preservation");
                std::vector<Complex> g(static_cast<std::size_t>(s.power) + 1);
                g.back() = s.alpha;
                return HarmonicMap::polynomial(AnalyticSeries({0.0, 1.0}), AnalyticSeries(std::move(g)));
            } else if constexpr (std::is_same_v<T, AutomorphismSpec>) {
                return HarmonicMap::automorphism(s.a, s.rotation);
            } else {
                return HarmonicMap::polynomial(AnalyticSeries(s.h), AnalyticSeries(s.g));
            }
        },
        spec.kind);
    if (spec.scale != 1.0) f = f.scaled(spec.scale);
    return f;
}

// ---------------------------------------------------------------------------
// Sampled validity

struct ValidityReport {
    bool sense_preserving = false;
    double sup_abs_dilatation = 0.0;  // k
    double self_map_sup = 0.0;        // max |f| over boundary samples
    int angular_samples = 0;
    int radial_samples = 0;
    Complex dilatation_argmax;
};

inline constexpr double kSenseMargin = 1e-9;
inline constexpr double kSelfMapSlack = 1e-9;

/// Samples |omega| on the polar grid r_i = i/radial (i = 0..radial), theta_j = 2 pi j/angular,
/// and |f| on the unit circle. Throws CriticalPointError where h' vanishes.
inline ValidityReport validate(const HarmonicMap& f, int angular_samples, int radial_samples) {
    if (angular_samples < 16 || radial_samples < 16)
        throw InvalidArgument("validate requires at least 16 angular and radial samples");
    ValidityReport rep;
    rep.angular_samples = angular_samples;
    rep.radial_samples = radial_samples;
    for (int j = 0; j < angular_samples; ++j) {
        const double theta = 2.0 * std::numbers::pi * j / angular_samples;
        const Complex dir = std::polar(1.0, theta);
        for (int i = 0; i <= radial_samples; ++i) {
            const Complex z = dir * (static_cast<double>(i) / radial_samples);
            double k = 0.0;
            try {
                k = std::abs(dilatation(f, z));
            } catch (const CriticalPointError& e) {
                throw CriticalPointError("sense-preservation undecidable at " + detail::format_point(e.where()),
                                         e.where());
            }
            if (k > rep.sup_abs_dilatation) {
                rep.sup_abs_dilatation = k;
                rep.dilatation_argmax = z;
            }
        }
        rep.self_map_sup = std::max(rep.self_map_sup, std::abs(eval_map(f, dir)));
    }
    rep.sense_preserving = rep.sup_abs_dilatation < 1.0 - kSenseMargin;
    return rep;
}

}  // namespace hmarea
