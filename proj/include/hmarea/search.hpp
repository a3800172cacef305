#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hmarea/analytic.hpp"
#include "hmarea/distortion.hpp"
#include "hmarea/errors.hpp"
#include "hmarea/parallel.hpp"
#include "hmarea/quadrature.hpp"
#include "hmarea/regions.hpp"

namespace hmarea {

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    bool active() const noexcept { return hi > lo; }
};

struct AffineFamily {
    Range alpha;
};
struct ShearFamily {
    Range alpha;
    std::vector<int> powers{2};
};
/// e^{i rotation} (z - a) / (1 - conj(a) z) with a = |a| e^{i arg}.
struct AutomorphismFamily {
    Range a_abs;
    Range rotation;
    Range a_arg{0.0, 0.0};
};
/// h = z + sum_{k=2..d} b_k z^k, g = sum_{k=1..d} c_k z^k with real b_k, c_k in [-bound, bound].
struct RawBallFamily {
    int degree = 2;
    double bound = 0.1;
};

struct FamilySpec {
    std::variant<AffineFamily, ShearFamily, AutomorphismFamily, RawBallFamily> kind;
    bool require_self_map = false;
    bool require_sense_preserving = true;
    /// Divide polynomial members by their sampled boundary sup when it exceeds 1.
    bool rescale_to_self_map = false;
};

/// Box of continuous parameters plus an optional discrete choice (shear power).
struct ParamSpace {
    std::vector<std::string> names;
    std::vector<Range> axes;
    std::string choice_name;
    std::vector<int> choices{0};
};

inline ParamSpace family_space(const FamilySpec& fam) {
    ParamSpace sp;
    std::visit(
        [&sp](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, AffineFamily>) {
                sp.names = {"alpha"};
                sp.axes = {k.alpha};
            } else if constexpr (std::is_same_v<T, ShearFamily>) {
                if (k.powers.empty()) throw InvalidArgument("shear family needs at least one power");
                sp.names = {"alpha"};
                sp.axes = {k.alpha};
                sp.choice_name = "power";
                sp.choices = k.powers;
            } else if constexpr (std::is_same_v<T, AutomorphismFamily>) {
                sp.names = {"a_abs", "a_arg", "rotation"};
                sp.axes = {k.a_abs, k.a_arg, k.rotation};
            } else {
                if (k.degree < 1 || k.degree > 16) throw InvalidArgument("raw ball degree must lie in [1, 16]");
                if (!(k.bound >= 0.0)) throw InvalidArgument("raw ball bound must be non-negative");
                for (int d = 2; d <= k.degree; ++d) {
                    sp.names.push_back("h" + std::to_string(d));
                    sp.axes.push_back({-k.bound, k.bound});
                }
                for (int d = 1; d <= k.degree; ++d) {
                    sp.names.push_back("g" + std::to_string(d));
                    sp.axes.push_back({-k.bound, k.bound});
                }
            }
        },
        fam.kind);
    for (const auto& a : sp.axes)
        if (!(a.hi >= a.lo) || !std::isfinite(a.lo) || !std::isfinite(a.hi))
            throw InvalidArgument("family ranges must be finite and nonempty");
    return sp;
}

inline MapSpec family_member(const FamilySpec& fam, int choice, const std::vector<double>& p) {
    return std::visit(
        [&](const auto& k) -> MapSpec {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, AffineFamily>) {
                return {AffineSpec{p.at(0)}};
            } else if constexpr (std::is_same_v<T, ShearFamily>) {
                return {ShearSpec{p.at(0), choice}};
            } else if constexpr (std::is_same_v<T, AutomorphismFamily>) {
                return {AutomorphismSpec{std::polar(p.at(0), p.at(1)), p.at(2)}};
            } else {
                RawSpec raw;
                raw.h.assign(static_cast<std::size_t>(k.degree) + 1, Complex{});
                raw.g.assign(static_cast<std::size_t>(k.degree) + 1, Complex{});
                raw.h[1] = 1.0;
                std::size_t idx = 0;
                for (int d = 2; d <= k.degree; ++d) raw.h[static_cast<std::size_t>(d)] = p.at(idx++);
                for (int d = 1; d <= k.degree; ++d) raw.g[static_cast<std::size_t>(d)] = p.at(idx++);
                return {raw};
            }
        },
        fam.kind);
}

/// A family member after construction, optional rescaling, and constraint checks.
struct Member {
    bool constructed = false;
    bool feasible = false;
    std::string flags;
    std::optional<HarmonicMap> map;
};

inline constexpr int kMemberAngularSamples = 128;
inline constexpr int kMemberRadialSamples = 32;

inline Member realize_member(const FamilySpec& fam, int choice, const std::vector<double>& p) {
    Member m;
    try {
        HarmonicMap f = construct_map(family_member(fam, choice, p));
        if (fam.rescale_to_self_map && f.is_polynomial()) {
            double sup = 0.0;
            for (int j = 0; j < kMemberAngularSamples; ++j)
                sup = std::max(sup, std::abs(eval_map(f, std::polar(1.0, 2.0 * std::numbers::pi * j / kMemberAngularSamples))));
            if (sup > 1.0) f = f.scaled(1.0 / sup);
        }
        m.map.emplace(std::move(f));
        m.constructed = true;
    } catch (const std::exception& e) {
        m.flags = std::string("invalid: ") + e.what();
        return m;
    }
    const auto hyp = check_hypotheses(*m.map, kMemberAngularSamples, kMemberRadialSamples);
    m.feasible = true;
    if (!hyp.sense_preserving) {
        m.flags += m.flags.empty() ? "not-sense-preserving" : "|not-sense-preserving";
        if (fam.require_sense_preserving) m.feasible = false;
    }
    if (!hyp.self_map) {
        m.flags += m.flags.empty() ? "not-self-map" : "|not-self-map";
        if (fam.require_self_map) m.feasible = false;
    }
    return m;
}

// ---------------------------------------------------------------------------
// Lattice

inline constexpr std::size_t kMaxLatticePoints = 1000000;

struct LatticePoint {
    int choice = 0;
    std::vector<double> params;
};

inline double lattice_coordinate(const Range& r, int i, int per_axis) {
    if (!r.active()) return r.lo;
    if (per_axis == 1) return 0.5 * (r.lo + r.hi);
    return r.lo + (r.hi - r.lo) * static_cast<double>(i) / static_cast<double>(per_axis - 1);
}

/// Row-major lattice: choice slowest, then axes in declaration order (last axis fastest).
/// Inactive (degenerate) axes contribute one point.
inline std::vector<LatticePoint> build_lattice(const ParamSpace& sp, int per_axis) {
    if (per_axis < 1) throw InvalidArgument("lattice needs at least one point per axis");
    std::size_t total = sp.choices.size();
    std::vector<int> counts;
    for (const auto& a : sp.axes) {
        counts.push_back(a.active() ? per_axis : 1);
        total *= static_cast<std::size_t>(counts.back());
        if (total > kMaxLatticePoints)
            throw BudgetExceeded("parameter lattice exceeds " + std::to_string(kMaxLatticePoints) + " points");
    }
    std::vector<LatticePoint> pts;
    pts.reserve(total);
    for (int c : sp.choices) {
        std::vector<int> idx(sp.axes.size(), 0);
        for (;;) {
            LatticePoint lp{c, std::vector<double>(sp.axes.size())};
            for (std::size_t a = 0; a < sp.axes.size(); ++a) lp.params[a] = lattice_coordinate(sp.axes[a], idx[a], per_axis);
            pts.push_back(std::move(lp));
            bool done = true;
            for (std::size_t a = sp.axes.size(); a-- > 0;) {
                if (++idx[a] < counts[a]) {
                    done = false;
                    break;
                }
                idx[a] = 0;
            }
            if (done) break;
        }
    }
    return pts;
}

// ---------------------------------------------------------------------------
// Sweep

struct SweepRow {
    int choice = 0;
    std::vector<double> params;
    double ratio = 0.0;
    bool feasible = false;
    std::string flags;
    std::size_t lattice_index = 0;
};

struct SweepTable {
    std::vector<std::string> param_names;
    std::string choice_name;
    std::vector<SweepRow> rows;  // descending by ratio, ties in lattice order
};

inline SweepTable sweep(const FamilySpec& fam, const Region& e, int grid_per_axis, const QuadOptions& opt = {}) {
    const auto sp = family_space(fam);
    const auto lattice = build_lattice(sp, grid_per_axis);
    const double measure = region_measure(e).value;
    QuadOptions inner = opt;
    inner.workers = 1;
    auto rows = ordered_map<SweepRow>(lattice.size(), opt.workers, [&](std::size_t i) {
        SweepRow row{lattice[i].choice, lattice[i].params, -1.0, false, {}, i};
        const Member m = realize_member(fam, row.choice, row.params);
        row.flags = m.flags;
        if (!m.constructed) return row;
        try {
            row.ratio = image_area(*m.map, e, inner).value / measure;
            row.feasible = m.feasible;
        } catch (const NonConvergenceError& err) {
            row.flags += row.flags.empty() ? "nonconvergent" : "|nonconvergent";
            row.ratio = -1.0;
        }
        return row;
    });
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.ratio > b.ratio; });
    return {sp.names, sp.choice_name, std::move(rows)};
}

// ---------------------------------------------------------------------------
// Lattice-seeded simplex search

struct TracePoint {
    int iteration = 0;
    int choice = 0;
    std::vector<double> params;
    double value = 0.0;
    bool feasible = false;
};

struct SearchResult {
    std::vector<std::string> param_names;
    std::string choice_name;
    int best_choice = 0;
    std::vector<double> best_params;
    double best_value = -1.0;
    long long evaluations = 0;
    std::vector<TracePoint> trace;  // incumbents: lattice seed, then each strict improvement
    std::uint64_t seed = 0;
    bool converged = false;
    double lattice_best = -1.0;
    Complex argmax_point;          // sp searches only
    bool exceeds_one = false;      // sp searches only
    long long escaped_points = 0;  // sp searches: lattice points with |f(z)| >= 1
};

struct SearchOptions {
    int lattice_per_axis = 9;
    QuadOptions quad{};
    double simplex_diameter = 1e-6;
};

inline constexpr double kInfeasibleValue = -1.0;
inline constexpr double kImprovementSlack = 1e-12;

namespace detail {

struct Evaluated {
    double value;
    bool feasible;
};

inline double simplex_diameter(const std::vector<std::vector<double>>& v) {
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < v[i].size(); ++k) s += (v[i][k] - v[j][k]) * (v[i][k] - v[j][k]);
            d = std::max(d, std::sqrt(s));
        }
    return d;
}

/// Lattice seeding then box-clamped simplex refinement (reflection 1, inside contraction
/// 1/2, shrink 1/2) over the active axes, for a fixed discrete choice chosen by the lattice.
template <class Objective>
SearchResult lattice_simplex(const ParamSpace& sp, const Objective& objective, int iterations, std::uint64_t seed,
                             const SearchOptions& opt) {
    if (iterations < 1) throw InvalidArgument("search needs at least one iteration");
    SearchResult res;
    res.param_names = sp.names;
    res.choice_name = sp.choice_name;
    res.seed = seed;

    const auto lattice = build_lattice(sp, opt.lattice_per_axis);
    const auto values = ordered_map<Evaluated>(lattice.size(), opt.quad.workers, [&](std::size_t i) {
        return objective(lattice[i].choice, lattice[i].params);
    });
    res.evaluations = static_cast<long long>(lattice.size());
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i].value > values[best].value + kImprovementSlack * std::max(1.0, std::abs(values[best].value)))
            best = i;
    res.best_choice = lattice[best].choice;
    res.best_params = lattice[best].params;
    res.best_value = values[best].value;
    res.lattice_best = res.best_value;
    res.trace.push_back({0, res.best_choice, res.best_params, res.best_value, values[best].feasible});

    std::vector<std::size_t> active;
    for (std::size_t a = 0; a < sp.axes.size(); ++a)
        if (sp.axes[a].active()) active.push_back(a);
    if (active.empty()) {
        res.converged = true;
        return res;
    }

    const int choice = res.best_choice;
    auto clamp = [&](std::vector<double> x) {
        for (std::size_t a = 0; a < x.size(); ++a) x[a] = std::clamp(x[a], sp.axes[a].lo, sp.axes[a].hi);
        return x;
    };
    auto eval = [&](const std::vector<double>& x) {
        ++res.evaluations;
        return objective(choice, x);
    };
    auto consider = [&](int it, const std::vector<double>& x, const Evaluated& v) {
        if (v.value > res.best_value + kImprovementSlack * std::max(1.0, std::abs(res.best_value))) {
            res.best_value = v.value;
            res.best_params = x;
            res.trace.push_back({it, choice, x, v.value, v.feasible});
        }
    };

    const std::size_t n = active.size();
    std::vector<std::vector<double>> simplex{res.best_params};
    std::vector<Evaluated> fv{values[best]};
    for (std::size_t k = 0; k < n; ++k) {
        const auto& ax = sp.axes[active[k]];
        const double step = opt.lattice_per_axis > 1 ? (ax.hi - ax.lo) / (opt.lattice_per_axis - 1) / 2.0
                                                     : (ax.hi - ax.lo) / 4.0;
        auto x = res.best_params;
        x[active[k]] = x[active[k]] + step <= ax.hi ? x[active[k]] + step : x[active[k]] - step;
        x = clamp(std::move(x));
        simplex.push_back(x);
        fv.push_back(eval(x));
        consider(0, x, fv.back());
    }

    for (int it = 1; it <= iterations; ++it) {
        std::vector<std::size_t> order(simplex.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a].value > fv[b].value; });
        {
            std::vector<std::vector<double>> s2;
            std::vector<Evaluated> f2;
            for (auto i : order) {
                s2.push_back(simplex[i]);
                f2.push_back(fv[i]);
            }
            simplex.swap(s2);
            fv.swap(f2);
        }
        if (simplex_diameter(simplex) < opt.simplex_diameter) {
            res.converged = true;
            break;
        }
        std::vector<double> centroid(simplex[0].size(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t a = 0; a < centroid.size(); ++a) centroid[a] += simplex[i][a] / static_cast<double>(n);
        const auto& worst = simplex[n];

        std::vector<double> xr(centroid.size());
        for (std::size_t a = 0; a < xr.size(); ++a) xr[a] = centroid[a] + 1.0 * (centroid[a] - worst[a]);
        xr = clamp(std::move(xr));
        const auto fr = eval(xr);
        consider(it, xr, fr);
        if (fr.value > fv[n - 1].value) {
            simplex[n] = xr;
            fv[n] = fr;
            continue;
        }
        std::vector<double> xc(centroid.size());
        for (std::size_t a = 0; a < xc.size(); ++a) xc[a] = centroid[a] + 0.5 * (worst[a] - centroid[a]);
        xc = clamp(std::move(xc));
        const auto fc = eval(xc);
        consider(it, xc, fc);
        if (fc.value > fv[n].value) {
            simplex[n] = xc;
            fv[n] = fc;
            continue;
        }
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t a = 0; a < simplex[i].size(); ++a)
                simplex[i][a] = simplex[0][a] + 0.5 * (simplex[i][a] - simplex[0][a]);
            fv[i] = eval(simplex[i]);
            consider(it, simplex[i], fv[i]);
        }
    }
    return res;
}

}  // namespace detail

/// Maximizes m(f(E)) / m(E) over a family. Constraint violations and invalid members
/// score -1. The seed is recorded for provenance; the procedure itself is deterministic.
inline SearchResult maximize_area_ratio(const FamilySpec& fam, const Region& e, int iterations, std::uint64_t seed,
                                        const SearchOptions& opt = {}) {
    const auto sp = family_space(fam);
    const double measure = region_measure(e).value;
    QuadOptions inner = opt.quad;
    inner.workers = 1;
    auto objective = [&](int choice, const std::vector<double>& p) -> detail::Evaluated {
        const Member m = realize_member(fam, choice, p);
        if (!m.constructed || !m.feasible) return {kInfeasibleValue, false};
        try {
            return {image_area(*m.map, e, inner).value / measure, true};
        } catch (const NonConvergenceError&) {
            return {kInfeasibleValue, false};
        }
    };
    return detail::lattice_simplex(sp, objective, iterations, seed, opt);
}

namespace detail {

inline constexpr double kSpRadiusCap = 1.0 - 1e-3;

inline void require_sp_domain(const Region& domain) {
    if (!is_polar(domain)) throw InvalidArgument("Schwarz-Pick search needs a disk or star-shaped domain");
    if (max_radius(domain) > kSpRadiusCap + 1e-15)
        throw InvalidArgument("Schwarz-Pick search domain must stay within radius 1 - 1e-3");
}

/// z = s R(theta) e^{i theta} for s in [0, 1].
inline Complex domain_point(const Region& domain, double s, double theta) {
    return std::polar(s * radial_profile(domain, theta), theta);
}

}  // namespace detail

inline constexpr int kDefaultSpLattice = 33;

/// Maximizes sp_ratio(f, z) over z in the domain, parametrized as (s, theta) with
/// z = s R(theta) e^{i theta}. Points with |f(z)| >= 1 score -1 and are counted.
inline SearchResult maximize_sp_ratio(const HarmonicMap& f, const Region& domain, int iterations, std::uint64_t seed,
                                      SearchOptions opt = {.lattice_per_axis = kDefaultSpLattice}) {
    detail::require_sp_domain(domain);
    ParamSpace sp;
    sp.names = {"s", "theta"};
    sp.axes = {{0.0, 1.0}, {0.0, 2.0 * std::numbers::pi}};
    long long escaped = 0;
    auto objective = [&](int, const std::vector<double>& p) -> detail::Evaluated {
        const double v = sp_ratio(f, detail::domain_point(domain, p[0], p[1]));
        if (!std::isfinite(v)) return {kInfeasibleValue, false};
        return {v, true};
    };
    auto res = detail::lattice_simplex(sp, objective, iterations, seed, opt);
    for (const auto& lp : build_lattice(sp, opt.lattice_per_axis))
        if (!std::isfinite(sp_ratio(f, detail::domain_point(domain, lp.params[0], lp.params[1])))) ++escaped;
    res.escaped_points = escaped;
    res.argmax_point = detail::domain_point(domain, res.best_params[0], res.best_params[1]);
    res.exceeds_one = res.best_value > 1.0 + 10.0 * kReportTolFloor;
    return res;
}

/// Joint search over family parameters and z; the last two parameters are (s, theta).
inline SearchResult maximize_sp_ratio(const FamilySpec& fam, const Region& domain, int iterations, std::uint64_t seed,
                                      SearchOptions opt = {.lattice_per_axis = 9}) {
    detail::require_sp_domain(domain);
    ParamSpace sp = family_space(fam);
    sp.names.push_back("s");
    sp.axes.push_back({0.0, 1.0});
    sp.names.push_back("theta");
    sp.axes.push_back({0.0, 2.0 * std::numbers::pi});
    const std::size_t nf = sp.axes.size() - 2;
    auto objective = [&](int choice, const std::vector<double>& p) -> detail::Evaluated {
        const std::vector<double> fp(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(nf));
        const Member m = realize_member(fam, choice, fp);
        if (!m.constructed || !m.feasible) return {kInfeasibleValue, false};
        const double v = sp_ratio(*m.map, detail::domain_point(domain, p[nf], p[nf + 1]));
        if (!std::isfinite(v)) return {kInfeasibleValue, false};
        return {v, true};
    };
    auto res = detail::lattice_simplex(sp, objective, iterations, seed, opt);
    res.argmax_point = detail::domain_point(domain, res.best_params[nf], res.best_params[nf + 1]);
    res.exceeds_one = res.best_value > 1.0 + 10.0 * kReportTolFloor;
    return res;
}

}  // namespace hmarea
