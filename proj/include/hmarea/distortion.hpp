#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hmarea/analytic.hpp"
#include "hmarea/errors.hpp"
#include "hmarea/parallel.hpp"
#include "hmarea/quadrature.hpp"
#include "hmarea/regions.hpp"

namespace hmarea {

enum class Relation { LessEqual, Equal };

/// One side-by-side comparison. For LessEqual, pass <=> rhs - lhs >= -tolerance;
/// for Equal, pass <=> |rhs - lhs| <= tolerance. Informational rows document reference
/// values and never count towards a verification verdict.
struct VerificationReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    bool pass = false;
    double tolerance = 0.0;
    long long evals = 0;
    Relation relation = Relation::LessEqual;
    bool hypothesis_met = true;
    bool informational = false;
    std::string detail;
};

inline constexpr double kReportTolFloor = 1e-9;

/// 10x the quadrature error estimate, floored at 1e-9.
inline double default_tolerance(double error_estimate) {
    return std::max(kReportTolFloor, 10.0 * error_estimate);
}

inline VerificationReport make_report(std::string name, double lhs, double rhs, double tolerance,
                                      Relation rel = Relation::LessEqual) {
    VerificationReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.tolerance = tolerance;
    r.relation = rel;
    r.pass = rel == Relation::LessEqual ? r.margin >= -tolerance : std::abs(r.margin) <= tolerance;
    return r;
}

namespace detail {

inline std::string fmt17(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

/// Nested polar sample set: radii R(theta) i / radial (i = 0..radial), angles 2 pi j / angular.
inline std::vector<Complex> polar_samples(const Region& e, int angular, int radial) {
    std::vector<Complex> pts;
    pts.reserve(static_cast<std::size_t>(angular) * static_cast<std::size_t>(radial + 1));
    for (int j = 0; j < angular; ++j) {
        const double theta = 2.0 * std::numbers::pi * j / angular;
        const double rmax = radial_profile(e, theta);
        const Complex dir = std::polar(1.0, theta);
        for (int i = 0; i <= radial; ++i) pts.push_back(dir * (rmax * i / radial));
    }
    return pts;
}

/// Sample points of a region: polar lattice for disks/stars, cell centres for grids
/// (refine > 1 splits every cell into refine x refine sub-cells).
inline std::vector<Complex> region_samples(const Region& e, int angular, int radial, int refine = 1) {
    if (is_polar(e)) return polar_samples(e, angular, radial);
    const auto& g = std::get<PixelGrid>(e);
    const auto centers = g.true_centers();
    if (refine <= 1) return centers;
    std::vector<Complex> pts;
    pts.reserve(centers.size() * static_cast<std::size_t>(refine * refine));
    const double sub = g.cell_side() / refine;
    for (const auto& c : centers)
        for (int a = 0; a < refine; ++a)
            for (int b = 0; b < refine; ++b)
                pts.push_back(c + Complex{(b + 0.5) * sub - 0.5 * g.cell_side(), (a + 0.5) * sub - 0.5 * g.cell_side()});
    return pts;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Hypotheses

struct DilatationBound {
    double k = 0.0;
    Complex argmax;
    bool decidable = true;
    std::string note;
};

/// sup |omega| over sampled points of E.
inline DilatationBound sampled_dilatation_bound(const HarmonicMap& f, const Region& e, int angular = 64,
                                                int radial = 32) {
    DilatationBound b;
    if (f.is_automorphism()) return b;
    for (const auto& z : detail::region_samples(e, angular, radial)) {
        try {
            const double k = std::abs(dilatation(f, z));
            if (k > b.k) {
                b.k = k;
                b.argmax = z;
            }
        } catch (const CriticalPointError& err) {
            b.decidable = false;
            b.note = "sense-preservation undecidable at " + detail::format_point(err.where());
            b.k = std::numeric_limits<double>::infinity();
            b.argmax = err.where();
            return b;
        }
    }
    return b;
}

/// Contraction hypotheses (sense-preserving self-map) as sampled facts about f on the whole disk.
struct MapHypotheses {
    bool sense_preserving = false;
    double k = 0.0;
    double self_map_sup = 0.0;
    bool self_map = false;
    bool fixes_origin = false;
    std::string note;
};

inline MapHypotheses check_hypotheses(const HarmonicMap& f, int angular = 256, int radial = 64) {
    MapHypotheses h;
    try {
        const auto v = validate(f, angular, radial);
        h.sense_preserving = v.sense_preserving;
        h.k = v.sup_abs_dilatation;
        h.self_map_sup = v.self_map_sup;
    } catch (const CriticalPointError& e) {
        h.sense_preserving = false;
        h.k = std::numeric_limits<double>::infinity();
        h.note = e.what();
        double sup = 0.0;
        for (int j = 0; j < angular; ++j)
            sup = std::max(sup, std::abs(eval_map(f, std::polar(1.0, 2.0 * std::numbers::pi * j / angular))));
        h.self_map_sup = sup;
    }
    h.self_map = h.self_map_sup <= 1.0 + kSelfMapSlack;
    h.fixes_origin = std::abs(eval_map(f, 0.0)) <= 1e-10;
    return h;
}

// ---------------------------------------------------------------------------
// Area formula

/// m(f(E)) = int_E J_f dA, by polar quadrature (disks, stars) or the grid midpoint rule.
/// A warning is attached when sampled |omega| reaches 1 on E; the integral is still computed.
inline QuadResult image_area(const HarmonicMap& f, const Region& e, const QuadOptions& opt = {}) {
    const auto field = [&f](Complex z) { return detail::unchecked_jacobian(f, z); };
    QuadResult res = is_polar(e) ? integrate_polar(field, e, opt) : integrate_grid(field, std::get<PixelGrid>(e), opt.workers);
    const auto bound = sampled_dilatation_bound(f, e);
    if (!bound.decidable)
        res.warnings.push_back(bound.note);
    else if (bound.k >= 1.0 - kSenseMargin)
        res.warnings.push_back("map is not sense-preserving on the region (sampled |omega| = " +
                               detail::fmt17(bound.k) + ")");
    return res;
}

/// int_E |h'|^2 dA.
inline QuadResult analytic_energy(const HarmonicMap& f, const Region& e, const QuadOptions& opt = {}) {
    const auto field = [&f](Complex z) { return detail::unchecked_hprime_sq(f, z); };
    return is_polar(e) ? integrate_polar(field, e, opt) : integrate_grid(field, std::get<PixelGrid>(e), opt.workers);
}

/// Two-sided bound (1 - k^2) A <= m(f(E)) <= A with A = int_E |h'|^2 and k the sampled
/// sup of |omega| over E. Returns {lower, upper}.
inline std::pair<VerificationReport, VerificationReport> quantitative_bounds(const HarmonicMap& f, const Region& e,
                                                                             const QuadOptions& opt = {}) {
    const auto bound = sampled_dilatation_bound(f, e);
    if (!bound.decidable) throw InvalidArgument(bound.note);
    if (bound.k >= 1.0)
        throw InvalidArgument("dilatation bound k = " + detail::fmt17(bound.k) + " is not below 1 on the region");
    const auto area = image_area(f, e, opt);
    const auto energy = analytic_energy(f, e, opt);
    const double tol = default_tolerance(area.error_estimate + energy.error_estimate);
    const double factor = 1.0 - bound.k * bound.k;

    auto lower = make_report("quantitative.lower", factor * energy.value, area.value, tol);
    auto upper = make_report("quantitative.upper", area.value, energy.value, tol);
    const std::string detail = "k=" + detail::fmt17(bound.k) + " energy=" + detail::fmt17(energy.value) +
                               " err_area=" + detail::fmt17(area.error_estimate) +
                               " err_energy=" + detail::fmt17(energy.error_estimate);
    lower.detail = upper.detail = detail;
    lower.evals = upper.evals = area.evals + energy.evals;
    return {lower, upper};
}

// ---------------------------------------------------------------------------
// Disks

struct ChainReport {
    double image_area = 0.0;       // m(f(D_r))
    double analytic_energy = 0.0;  // int_{D_r} |h'|^2
    double reference_area = 0.0;   // pi r^2
    double margin_image_energy = 0.0;
    double margin_energy_reference = 0.0;
    double tolerance = 0.0;
    bool pass_image_energy = false;
    bool pass_energy_reference = false;
    double self_map_sup = 0.0;
    bool hypothesis_met = false;
    double error_image = 0.0;
    double error_energy = 0.0;
    long long evals = 0;
    std::vector<std::string> warnings;
};

/// m(f(D_r)) <= int_{D_r} |h'|^2 <= pi r^2, both links measured independently.
inline ChainReport disk_contraction_report(const HarmonicMap& f, double r, const QuadOptions& opt = {}) {
    if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("disk radius must lie in (0, 1)");
    const Region disk = Disk(r);
    const auto area = image_area(f, disk, opt);
    const auto energy = analytic_energy(f, disk, opt);
    const auto hyp = check_hypotheses(f);

    ChainReport c;
    c.image_area = area.value;
    c.analytic_energy = energy.value;
    c.reference_area = std::numbers::pi * r * r;
    c.margin_image_energy = c.analytic_energy - c.image_area;
    c.margin_energy_reference = c.reference_area - c.analytic_energy;
    c.error_image = area.error_estimate;
    c.error_energy = energy.error_estimate;
    c.tolerance = default_tolerance(area.error_estimate + energy.error_estimate);
    c.pass_image_energy = c.margin_image_energy >= -c.tolerance;
    c.pass_energy_reference = c.margin_energy_reference >= -c.tolerance;
    c.self_map_sup = hyp.self_map_sup;
    c.hypothesis_met = hyp.sense_preserving && hyp.self_map;
    c.evals = area.evals + energy.evals;
    c.warnings = area.warnings;
    if (!hyp.self_map) c.warnings.push_back("hypothesis unmet: not a self-map (sup |f| = " + detail::fmt17(hyp.self_map_sup) + ")");
    if (!hyp.sense_preserving) c.warnings.push_back("hypothesis unmet: not sense-preserving");
    return c;
}

enum class RadialIntegrand { Jacobian, AnalyticEnergy };

namespace detail {

template <class Field>
std::pair<double, long long> adaptive_radial(const Field& field, double r, double theta) {
    double prev = 0.0;
    long long evals = 0;
    for (int q = 16; q <= 256; q *= 2) {
        const double v = radial_integral(field, gauss_legendre(q), r, theta);
        evals += q;
        if (q > 16 && std::abs(v - prev) <= 1e-14 * std::max(1.0, std::abs(v))) return {v, evals};
        prev = v;
    }
    return {prev, evals};
}

}  // namespace detail

/// For theta_j = 2 pi j / M: int_0^r J_f(t e^{i theta_j}) t dt compared with r^2 / 2
/// (or the same with |h'|^2 in place of J_f).
inline std::vector<VerificationReport> radial_bound_profile(const HarmonicMap& f, double r, int angular,
                                                            RadialIntegrand which = RadialIntegrand::Jacobian) {
    if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("radius must lie in (0, 1)");
    if (angular < 16) throw InvalidArgument("radial profile needs at least 16 angles");
    std::vector<VerificationReport> out;
    out.reserve(static_cast<std::size_t>(angular));
    const double rhs = 0.5 * r * r;
    for (int j = 0; j < angular; ++j) {
        const double theta = 2.0 * std::numbers::pi * j / angular;
        const auto [lhs, evals] =
            which == RadialIntegrand::Jacobian
                ? detail::adaptive_radial([&f](Complex z) { return detail::unchecked_jacobian(f, z); }, r, theta)
                : detail::adaptive_radial([&f](Complex z) { return detail::unchecked_hprime_sq(f, z); }, r, theta);
        auto rep = make_report("radial_bound theta=" + detail::fmt17(theta), lhs, rhs, kReportTolFloor);
        rep.evals = evals;
        out.push_back(std::move(rep));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Star-shaped sets

/// m(f(E)) <= m(E) for star-shaped E; a warning is recorded in `detail` when f(0) != 0.
inline VerificationReport star_contraction_report(const HarmonicMap& f, const Region& e, const QuadOptions& opt = {}) {
    if (!is_polar(e)) throw InvalidArgument("star contraction requires a disk or star-shaped region");
    const auto area = image_area(f, e, opt);
    const auto measure = region_measure(e);
    auto rep = make_report("star_contraction", area.value, measure.value, default_tolerance(area.error_estimate));
    rep.evals = area.evals;
    const Complex f0 = eval_map(f, 0.0);
    rep.detail = "err=" + detail::fmt17(area.error_estimate);
    if (std::abs(f0) > 1e-10) {
        rep.hypothesis_met = false;
        rep.detail += "; hypothesis unmet: f(0) = " + detail::format_point(f0);
    }
    for (const auto& w : area.warnings) rep.detail += "; " + w;
    return rep;
}

// ---------------------------------------------------------------------------
// Local and small-set contraction

struct LocalContraction {
    double value = 0.0;   // max J over the refined sampling
    double coarse = 0.0;  // max J over the base sampling
    Complex argmax;
};

/// C_K = sup_K J_f, sampled on a grid x grid polar lattice (cell centres for pixel grids)
/// and once more at doubled density.
inline LocalContraction local_contraction_constant(const HarmonicMap& f, const Region& e, int grid) {
    if (grid < 2) throw InvalidArgument("sampling grid must be at least 2");
    if (max_radius(e) > 1.0 - 1e-6) throw InvalidArgument("region must lie compactly inside the disk");
    LocalContraction out;
    out.coarse = -std::numeric_limits<double>::infinity();
    for (const auto& z : detail::region_samples(e, grid, grid, 1))
        out.coarse = std::max(out.coarse, jacobian(f, z));
    out.value = -std::numeric_limits<double>::infinity();
    for (const auto& z : detail::region_samples(e, 2 * grid, 2 * grid, 2)) {
        const double j = jacobian(f, z);
        if (j > out.value) {
            out.value = j;
            out.argmax = z;
        }
    }
    return out;
}

/// Decreasing rearrangement of J_f over the cells of a rasterized domain. worst(s) is the
/// largest int_E J_f over unions of (fractional) cells with total measure s.
class JacobianRearrangement {
public:
    JacobianRearrangement(const HarmonicMap& f, const Region& domain, int grid)
        : domain_measure_(region_measure(domain).value) {
        if (grid < 8) throw InvalidArgument("layer-cake grid must be at least 8");
        const PixelGrid cells = std::holds_alternative<PixelGrid>(domain) ? std::get<PixelGrid>(domain)
                                                                          : detail::rasterize_any(domain, grid);
        cell_area_ = cells.cell_area();
        const auto centers = cells.true_centers();
        values_.reserve(centers.size());
        for (const auto& z : centers) values_.push_back(jacobian(f, z));
        std::stable_sort(values_.begin(), values_.end(), std::greater<>{});
        grid_measure_ = static_cast<double>(values_.size()) * cell_area_;
    }

    double domain_measure() const noexcept { return domain_measure_; }
    double grid_measure() const noexcept { return grid_measure_; }
    const std::vector<double>& sorted_values() const noexcept { return values_; }

    double worst(double s) const {
        if (!(s > 0.0) || s > domain_measure_ * (1.0 + 1e-12))
            throw InvalidArgument("set measure must lie in (0, m(domain)]");
        CompensatedSum acc;
        double remaining = s;
        for (double j : values_) {
            if (remaining <= 0.0) break;
            const double take = std::min(cell_area_, remaining);
            acc.add(j * take);
            remaining -= take;
        }
        return acc.value();
    }

    /// Largest s with worst(s') <= s' for every s' <= s; the full domain measure when the
    /// inequality never fails on the grid.
    double threshold() const {
        CompensatedSum excess;  // worst(s) - s at the current breakpoint
        double s = 0.0;
        for (double j : values_) {
            const double slope = j - 1.0;
            const double next = excess.value() + slope * cell_area_;
            const double s_next = s + cell_area_;
            if (next > kRelSlack * s_next) {
                if (slope <= 0.0) return s;  // unreachable for a concave excess starting at 0
                return std::max(0.0, s + std::max(0.0, -excess.value()) / slope);
            }
            excess.add(slope * cell_area_);
            s = s_next;
        }
        return domain_measure_;
    }

private:
    static constexpr double kRelSlack = 1e-12;
    double domain_measure_ = 0.0;
    double grid_measure_ = 0.0;
    double cell_area_ = 0.0;
    std::vector<double> values_;
};

inline double worst_case_image_area(const HarmonicMap& f, const Region& domain, double s, int grid) {
    return JacobianRearrangement(f, domain, grid).worst(s);
}

inline double small_set_threshold(const HarmonicMap& f, const Region& domain, int grid) {
    return JacobianRearrangement(f, domain, grid).threshold();
}

// ---------------------------------------------------------------------------
// Pointwise Schwarz-Pick ratio

/// J_f(z) (1 - |z|^2)^2 / (1 - |f(z)|^2)^2. Returns +infinity when 1 - |f(z)|^2 < 1e-12
/// (f(z) on or outside the unit circle).
inline double sp_ratio(const HarmonicMap& f, Complex z) {
    detail::require_finite(z, "evaluation point");
    if (std::abs(z) >= 1.0) throw DomainError("Schwarz-Pick ratio needs |z| < 1, got " + detail::format_point(z));
    const Complex w = eval_map(f, z);
    const double den = 1.0 - std::norm(w);
    if (den < 1e-12) return std::numeric_limits<double>::infinity();
    const double num = 1.0 - std::norm(z);
    return jacobian(f, z) * (num * num) / (den * den);
}

// ---------------------------------------------------------------------------
// Reference integrals with known closed forms

/// Quadrature of a reference integral, its antiderivative closed form, and the commonly
/// claimed value that it is compared against.
struct ReferenceIntegral {
    double quadrature = 0.0;
    double error_estimate = 0.0;
    double closed_form = 0.0;
    double claimed = 0.0;
    long long evals = 0;
};

/// int_{|z|<r} (1 - |z|^2)^{-2} dA = pi r^2 / (1 - r^2); claimed value pi r^2.
inline ReferenceIntegral hyperbolic_disk_integral(double r, const QuadOptions& opt = {}) {
    if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("radius must lie in (0, 1)");
    const auto q = integrate_polar(
        [](Complex z) {
            const double d = 1.0 - std::norm(z);
            return 1.0 / (d * d);
        },
        Region(Disk(r)), opt);
    return {q.value, q.error_estimate, std::numbers::pi * r * r / (1.0 - r * r), std::numbers::pi * r * r, q.evals};
}

/// int_{|z|<r} J_f dA for the shear h = z, g = alpha z^2: closed form pi r^2 - 2 pi alpha^2 r^4,
/// claimed value pi r^2 - pi alpha^2 r^4.
inline ReferenceIntegral shear_disk_integral(double alpha, double r, const QuadOptions& opt = {}) {
    if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("radius must lie in (0, 1)");
    const auto f = construct_map({ShearSpec{alpha, 2}});
    const auto q = integrate_polar([&f](Complex z) { return detail::unchecked_jacobian(f, z); }, Region(Disk(r)), opt);
    const double pr2 = std::numbers::pi * r * r;
    const double a2r4 = alpha * alpha * r * r * r * r;
    return {q.value, q.error_estimate, pr2 - 2.0 * std::numbers::pi * a2r4, pr2 - std::numbers::pi * a2r4, q.evals};
}

/// pi r^2 - m(f(D_r)); zero for rotations, positive for strict contraction.
inline double rigidity_margin(const HarmonicMap& f, double r, const QuadOptions& opt = {}) {
    if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("radius must lie in (0, 1)");
    return std::numbers::pi * r * r - image_area(f, Disk(r), opt).value;
}

}  // namespace hmarea
