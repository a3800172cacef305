#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hmarea/analytic.hpp"
#include "hmarea/distortion.hpp"
#include "hmarea/errors.hpp"
#include "hmarea/io.hpp"
#include "hmarea/quadrature.hpp"
#include "hmarea/regions.hpp"
#include "hmarea/search.hpp"

namespace hmarea::cli {

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kParseError = 2,
    kNonConvergence = 3,
    kBudgetExceeded = 4,
};

enum class OutputFormat { Json, Csv, Both };

struct RunConfig {
    QuadOptions quad{};
    int raster_n = 1024;
    std::uint64_t seed = 42;
    std::string out_dir = "hmarea-out";
    OutputFormat format = OutputFormat::Both;

    std::string map_path;
    std::string preset;
    std::string region_path;
    std::string family_path;
    double r = 0.5;                 // disk radius when no region file is given
    int grid = 10;                  // sweep lattice points per axis
    int iterations = 200;           // simplex iterations for search
    std::string objective = "area"; // search: area | sp
};

inline OutputFormat parse_format(const std::string& s) {
    if (s == "json") return OutputFormat::Json;
    if (s == "csv") return OutputFormat::Csv;
    if (s == "both") return OutputFormat::Both;
    throw ParseError("unknown output format '" + s + "'");
}

namespace detail {

inline bool want_json(const RunConfig& c) { return c.format != OutputFormat::Csv; }
inline bool want_csv(const RunConfig& c) { return c.format != OutputFormat::Json; }

inline std::string out_path(const RunConfig& c, const std::string& file) {
    std::filesystem::create_directories(c.out_dir);
    return (std::filesystem::path(c.out_dir) / file).string();
}

inline MapSpec load_map(const RunConfig& c) {
    if (!c.map_path.empty() && !c.preset.empty()) throw ParseError("give either --map or --preset, not both");
    if (!c.map_path.empty()) return io::load_map_spec(c.map_path);
    if (!c.preset.empty()) return io::preset(c.preset);
    throw ParseError("a map is required (--map FILE or --preset NAME)");
}

inline HarmonicMap build_map(const MapSpec& spec) {
    try {
        return construct_map(spec);
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("invalid map: ") + e.what());
    }
}

inline Region load_region(const RunConfig& c) {
    if (!c.region_path.empty()) return io::load_region(c.region_path);
    try {
        return Disk(c.r);
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
}

/// Maps library exceptions onto documented exit codes.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kParseError;
    } catch (const NonConvergenceError& e) {
        err << "quadrature did not converge: " << e.what() << '\n';
        return kNonConvergence;
    } catch (const BudgetExceeded& e) {
        err << "budget exceeded: " << e.what() << '\n';
        return kBudgetExceeded;
    } catch (const InvalidArgument& e) {
        err << "invalid input: " << e.what() << '\n';
        return kParseError;
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline int cmd_area(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto spec = detail::load_map(cfg);
        const auto f = detail::build_map(spec);
        const auto e = detail::load_region(cfg);
        const auto measure = region_measure(e);
        const auto area = image_area(f, e, cfg.quad);
        const double ratio = area.value / measure.value;

        out << "m(E)        " << io::num(measure.value) << '\n'
            << "m(f(E))     " << io::num(area.value) << '\n'
            << "ratio       " << io::num(ratio) << '\n'
            << "quad error  " << io::num(area.error_estimate) << '\n'
            << "evals       " << area.evals << '\n';
        for (const auto& w : area.warnings) out << "warning: " << w << '\n';

        if (detail::want_json(cfg)) {
            io::json j = {{"map", io::map_spec_to_json(spec)},
                          {"region", io::region_to_json(e)},
                          {"region_measure", measure.value},
                          {"image_area", area.value},
                          {"ratio", ratio},
                          {"error_estimate", area.error_estimate},
                          {"evals", area.evals},
                          {"warnings", area.warnings}};
            io::write_text(detail::out_path(cfg, "area.json"), j.dump(2) + '\n');
        }
        if (detail::want_csv(cfg)) {
            io::write_text(detail::out_path(cfg, "area.csv"),
                           "region_measure,image_area,ratio,error_estimate,evals\n" + io::num(measure.value) + ',' +
                               io::num(area.value) + ',' + io::num(ratio) + ',' + io::num(area.error_estimate) + ',' +
                               std::to_string(area.evals) + '\n');
        }
        return static_cast<int>(kOk);
    });
}

/// Star region used by `verify` at radius r: r (0.85 + 0.15 cos 3 theta), 256 samples.
inline StarShaped verify_star_region(double r) { return io::trefoil_star(256, 0.85 * r, 0.15 * r); }

inline constexpr double kReferenceShearAlpha = 0.3;

/// Full inequality suite at r = 0.1, ..., 0.9.
inline std::vector<VerificationReport> verify_reports(const HarmonicMap& f, const QuadOptions& quad) {
    std::vector<VerificationReport> rows;
    const auto hyp = check_hypotheses(f);
    const bool disk_hyp = hyp.sense_preserving && hyp.self_map;

    for (int i = 1; i <= 9; ++i) {
        const double r = i / 10.0;
        const std::string tag = " r=" + io::num(r);

        const auto chain = disk_contraction_report(f, r, quad);
        {
            auto row = make_report("disk_area" + tag, chain.image_area, chain.reference_area, chain.tolerance);
            row.hypothesis_met = disk_hyp;
            row.evals = chain.evals;
            row.detail = "self_map_sup=" + io::num(chain.self_map_sup);
            rows.push_back(row);
        }
        {
            auto row = make_report("chain.image_le_energy" + tag, chain.image_area, chain.analytic_energy, chain.tolerance);
            row.hypothesis_met = hyp.sense_preserving;
            row.evals = chain.evals;
            rows.push_back(row);
        }
        {
            auto row = make_report("chain.energy_le_disk" + tag, chain.analytic_energy, chain.reference_area, chain.tolerance);
            row.hypothesis_met = disk_hyp;
            row.evals = chain.evals;
            rows.push_back(row);
        }
        {
            const auto prof = radial_bound_profile(f, r, 64);
            const auto worst = std::min_element(prof.begin(), prof.end(),
                                                [](const auto& a, const auto& b) { return a.margin < b.margin; });
            long long evals = 0;
            for (const auto& p : prof) evals += p.evals;
            auto row = make_report("radial_bound" + tag, worst->lhs, worst->rhs, worst->tolerance);
            row.hypothesis_met = disk_hyp;
            row.evals = evals;
            row.detail = "worst " + worst->name;
            rows.push_back(row);
        }
        {
            auto row = star_contraction_report(f, verify_star_region(r), quad);
            row.name += tag;
            row.hypothesis_met = row.hypothesis_met && disk_hyp;
            rows.push_back(row);
        }
        try {
            auto [lo, up] = quantitative_bounds(f, Disk(r), quad);
            lo.name += tag;
            up.name += tag;
            rows.push_back(lo);
            rows.push_back(up);
        } catch (const InvalidArgument& e) {
            VerificationReport row = make_report("quantitative.skipped" + tag, 0.0, 0.0, kReportTolFloor);
            row.hypothesis_met = false;
            row.detail = e.what();
            rows.push_back(row);
        }
        {
            const auto h = hyperbolic_disk_integral(r, quad);
            auto q = make_report("hyperbolic.quadrature_vs_closed_form" + tag, h.quadrature, h.closed_form,
                                 std::max(1e-8, default_tolerance(h.error_estimate)), Relation::Equal);
            q.evals = h.evals;
            rows.push_back(q);
            auto c = make_report("hyperbolic.claimed_vs_closed_form" + tag, h.claimed, h.closed_form, 1e-8, Relation::Equal);
            c.informational = true;
            c.detail = "claimed pi r^2 vs antiderivative pi r^2 / (1 - r^2)";
            rows.push_back(c);
        }
        {
            const auto s = shear_disk_integral(kReferenceShearAlpha, r, quad);
            const std::string stag = " alpha=" + io::num(kReferenceShearAlpha) + tag;
            auto q = make_report("shear_reference.quadrature_vs_closed_form" + stag, s.quadrature, s.closed_form,
                                 std::max(1e-8, default_tolerance(s.error_estimate)), Relation::Equal);
            q.evals = s.evals;
            rows.push_back(q);
            auto c = make_report("shear_reference.claimed_vs_closed_form" + stag, s.claimed, s.closed_form, 1e-8,
                                 Relation::Equal);
            c.informational = true;
            c.detail = "claimed pi r^2 - pi a^2 r^4 vs antiderivative pi r^2 - 2 pi a^2 r^4";
            rows.push_back(c);
        }
    }
    return rows;
}

inline bool all_checks_pass(const std::vector<VerificationReport>& rows) {
    for (const auto& r : rows)
        if (r.hypothesis_met && !r.informational && !r.pass) return false;
    return true;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto spec = detail::load_map(cfg);
        const auto f = detail::build_map(spec);
        const auto rows = verify_reports(f, cfg.quad);
        for (const auto& r : rows) {
            const char* status = r.informational ? "REF " : (!r.hypothesis_met ? "N/A " : (r.pass ? "PASS" : "FAIL"));
            out << status << "  " << r.name << "  lhs=" << io::num(r.lhs) << "  rhs=" << io::num(r.rhs)
                << "  margin=" << io::num(r.margin) << '\n';
        }
        if (detail::want_csv(cfg)) io::write_text(detail::out_path(cfg, "verify.csv"), io::reports_csv(rows));
        if (detail::want_json(cfg)) {
            io::json arr = io::json::array();
            for (const auto& r : rows) arr.push_back(io::report_to_json(r));
            io::write_text(detail::out_path(cfg, "verify.json"),
                           io::json{{"map", io::map_spec_to_json(spec)}, {"reports", arr}}.dump(2) + '\n');
        }
        const bool ok = all_checks_pass(rows);
        out << (ok ? "all hypothesis-met checks pass" : "some hypothesis-met checks FAIL") << '\n';
        return static_cast<int>(ok ? kOk : kCheckFailed);
    });
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        if (cfg.family_path.empty()) throw ParseError("sweep requires --family FILE");
        const auto fam = io::load_family(cfg.family_path);
        const auto e = detail::load_region(cfg);
        const auto table = sweep(fam, e, cfg.grid, cfg.quad);
        if (detail::want_csv(cfg)) io::write_text(detail::out_path(cfg, "sweep.csv"), io::sweep_csv(table));
        if (detail::want_json(cfg)) {
            io::json rows = io::json::array();
            for (const auto& r : table.rows)
                rows.push_back({{"lattice_index", r.lattice_index}, {"choice", r.choice}, {"params", r.params},
                                {"ratio", r.ratio}, {"feasible", r.feasible}, {"flags", r.flags}});
            io::write_text(detail::out_path(cfg, "sweep.json"),
                           io::json{{"family", io::family_to_json(fam)}, {"param_names", table.param_names},
                                    {"rows", rows}}.dump(2) + '\n');
        }
        if (!table.rows.empty()) {
            const auto& b = table.rows.front();
            out << "best ratio " << io::num(b.ratio) << " at";
            for (std::size_t i = 0; i < b.params.size(); ++i) out << ' ' << table.param_names[i] << '=' << io::num(b.params[i]);
            if (!table.choice_name.empty()) out << ' ' << table.choice_name << '=' << b.choice;
            out << (b.feasible ? "" : " (flagged: " + b.flags + ")") << '\n';
        }
        out << table.rows.size() << " lattice points\n";
        return static_cast<int>(kOk);
    });
}

inline int cmd_search(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto e = detail::load_region(cfg);
        SearchOptions opt;
        opt.quad = cfg.quad;
        SearchResult res;
        if (cfg.objective == "area") {
            if (cfg.family_path.empty()) throw ParseError("area search requires --family FILE");
            res = maximize_area_ratio(io::load_family(cfg.family_path), e, cfg.iterations, cfg.seed, opt);
        } else if (cfg.objective == "sp") {
            if (!cfg.family_path.empty()) {
                opt.lattice_per_axis = 9;
                res = maximize_sp_ratio(io::load_family(cfg.family_path), e, cfg.iterations, cfg.seed, opt);
            } else {
                opt.lattice_per_axis = kDefaultSpLattice;
                res = maximize_sp_ratio(detail::build_map(detail::load_map(cfg)), e, cfg.iterations, cfg.seed, opt);
            }
        } else {
            throw ParseError("unknown objective '" + cfg.objective + "' (expected area or sp)");
        }
        if (detail::want_csv(cfg)) io::write_text(detail::out_path(cfg, "search_trace.csv"), io::trace_csv(res));
        if (detail::want_json(cfg)) io::write_text(detail::out_path(cfg, "search.json"), io::search_to_json(res).dump(2) + '\n');
        out << "best value " << io::num(res.best_value) << " at";
        for (std::size_t i = 0; i < res.best_params.size(); ++i)
            out << ' ' << res.param_names[i] << '=' << io::num(res.best_params[i]);
        if (!res.choice_name.empty()) out << ' ' << res.choice_name << '=' << res.best_choice;
        out << "\nevaluations " << res.evaluations << (res.converged ? " (converged)" : " (iteration cap)") << '\n';
        if (cfg.objective == "sp") {
            out << "argmax z = " << hmarea::detail::format_point(res.argmax_point) << '\n'
                << (res.exceeds_one ? "ratio exceeds 1 beyond tolerance" : "ratio stays within 1 + tolerance") << '\n';
            if (res.escaped_points) out << res.escaped_points << " lattice points map outside the unit disk\n";
        }
        return static_cast<int>(kOk);
    });
}

inline int cmd_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto spec = detail::load_map(cfg);
        const auto f = detail::build_map(spec);
        const auto e = detail::load_region(cfg);
        const auto quad = image_area(f, e, cfg.quad);
        const auto mc = mc_image_area(f, e, cfg.raster_n, cfg.seed);
        const double gap = std::abs(mc.value - quad.value);
        const double rel = gap / quad.value;
        const double allowed = std::max(0.02 * quad.value, 5.0 * (mc.error_estimate + quad.error_estimate));
        const bool ok = gap <= allowed;
        out << "jacobian integral  " << io::num(quad.value) << "  (err " << io::num(quad.error_estimate) << ")\n"
            << "rasterized image   " << io::num(mc.value) << "  (err " << io::num(mc.error_estimate) << ", n=" << cfg.raster_n
            << ")\n"
            << "relative gap       " << io::num(rel) << (ok ? "  OK" : "  EXCEEDS allowance") << '\n';
        for (const auto& w : mc.warnings) out << "warning: " << w << '\n';
        if (detail::want_json(cfg))
            io::write_text(detail::out_path(cfg, "oracle.json"),
                           io::json{{"map", io::map_spec_to_json(spec)},
                                    {"region", io::region_to_json(e)},
                                    {"jacobian_integral", quad.value},
                                    {"jacobian_error", quad.error_estimate},
                                    {"raster_area", mc.value},
                                    {"raster_error", mc.error_estimate},
                                    {"n", cfg.raster_n},
                                    {"seed", cfg.seed},
                                    {"relative_gap", rel},
                                    {"pass", ok}}
                                   .dump(2) + '\n');
        if (detail::want_csv(cfg))
            io::write_text(detail::out_path(cfg, "oracle.csv"),
                           "jacobian_integral,jacobian_error,raster_area,raster_error,relative_gap,pass\n" +
                               io::num(quad.value) + ',' + io::num(quad.error_estimate) + ',' + io::num(mc.value) + ',' +
                               io::num(mc.error_estimate) + ',' + io::num(rel) + ',' + (ok ? "true" : "false") + '\n');
        return static_cast<int>(ok ? kOk : kCheckFailed);
    });
}

}  // namespace hmarea::cli
