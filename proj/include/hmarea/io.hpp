#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/archive/iterators/base64_from_binary.hpp>
#include <boost/archive/iterators/binary_from_base64.hpp>
#include <boost/archive/iterators/transform_width.hpp>
#include <nlohmann/json.hpp>

#include "hmarea/analytic.hpp"
#include "hmarea/distortion.hpp"
#include "hmarea/errors.hpp"
#include "hmarea/regions.hpp"
#include "hmarea/search.hpp"

namespace hmarea::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Numbers

/// 17 significant digits, enough to round-trip any double.
inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// base64 (grid masks are row-major bits, most significant bit first)

inline std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
    using namespace boost::archive::iterators;
    using Enc = base64_from_binary<transform_width<std::vector<std::uint8_t>::const_iterator, 6, 8>>;
    std::string out(Enc(bytes.begin()), Enc(bytes.end()));
    out.append((3 - bytes.size() % 3) % 3, '=');
    return out;
}

inline std::vector<std::uint8_t> base64_decode(std::string text) {
    using namespace boost::archive::iterators;
    text.erase(std::remove_if(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }), text.end());
    if (text.size() % 4 != 0) throw ParseError("base64 payload length is not a multiple of 4");
    const auto pad = static_cast<std::size_t>(std::count(text.end() - std::min<std::ptrdiff_t>(2, static_cast<std::ptrdiff_t>(text.size())), text.end(), '='));
    std::replace(text.end() - static_cast<std::ptrdiff_t>(pad), text.end(), '=', 'A');
    for (char c : text)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '/'))
            throw ParseError("invalid base64 character");
    using Dec = transform_width<binary_from_base64<std::string::const_iterator>, 8, 6>;
    std::vector<std::uint8_t> out(Dec(text.cbegin()), Dec(text.cend()));
    out.resize(out.size() - pad);
    return out;
}

inline std::string pack_mask(const PixelGrid& g) {
    const auto& m = g.mask();
    std::vector<std::uint8_t> bytes((m.size() + 7) / 8, 0);
    for (std::size_t k = 0; k < m.size(); ++k)
        if (m[k]) bytes[k / 8] |= static_cast<std::uint8_t>(0x80u >> (k % 8));
    return base64_encode(bytes);
}

inline std::vector<std::uint8_t> unpack_mask(const std::string& text, int n) {
    const auto bytes = base64_decode(text);
    const std::size_t cells = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    if (bytes.size() != (cells + 7) / 8) throw ParseError("grid mask holds the wrong number of bits for n");
    std::vector<std::uint8_t> mask(cells);
    for (std::size_t k = 0; k < cells; ++k) mask[k] = (bytes[k / 8] >> (7 - k % 8)) & 1u;
    return mask;
}

// ---------------------------------------------------------------------------
// Maps

namespace detail {

inline Complex parse_complex(const json& j, const char* field) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw ParseError(std::string("field '") + field + "' must be a number or [re, im]");
}

inline std::vector<Complex> parse_coeffs(const json& j, const char* field) {
    if (!j.is_array()) throw ParseError(std::string("field '") + field + "' must be an array of [re, im]");
    std::vector<Complex> out;
    for (const auto& c : j) out.push_back(parse_complex(c, field));
    return out;
}

inline json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline const json& need(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
    return j.at(key);
}

inline double need_number(const json& j, const char* key) {
    const auto& v = need(j, key);
    if (!v.is_number()) throw ParseError(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

inline json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace detail

inline MapSpec map_spec_from_json(const json& j) {
    using namespace detail;
    const auto& form = need(j, "form");
    if (!form.is_string()) throw ParseError("field 'form' must be a string");
    const auto f = form.get<std::string>();
    MapSpec spec;
    if (f == "polynomial") {
        spec.kind = RawSpec{parse_coeffs(need(j, "h"), "h"), parse_coeffs(need(j, "g"), "g")};
    } else if (f == "affine") {
        spec.kind = AffineSpec{parse_complex(need(j, "alpha"), "alpha")};
    } else if (f == "shear") {
        const auto& p = need(j, "power");
        if (!p.is_number_integer()) throw ParseError("field 'power' must be an integer");
        spec.kind = ShearSpec{parse_complex(need(j, "alpha"), "alpha"), p.get<int>()};
    } else if (f == "automorphism") {
        spec.kind = AutomorphismSpec{parse_complex(need(j, "a"), "a"), need_number(j, "rotation")};
    } else {
        throw ParseError("unknown map form '" + f + "'");
    }
    if (j.contains("scale")) spec.scale = need_number(j, "scale");
    return spec;
}

inline json map_spec_to_json(const MapSpec& spec) {
    using namespace detail;
    json j = std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, AffineSpec>) {
                return {{"form", "affine"}, {"alpha", complex_json(s.alpha)}};
            } else if constexpr (std::is_same_v<T, ShearSpec>) {
                return {{"form", "shear"}, {"alpha", complex_json(s.alpha)}, {"power", s.power}};
            } else if constexpr (std::is_same_v<T, AutomorphismSpec>) {
                return {{"form", "automorphism"}, {"a", complex_json(s.a)}, {"rotation", s.rotation}};
            } else {
                json h = json::array(), g = json::array();
                for (auto c : s.h) h.push_back(complex_json(c));
                for (auto c : s.g) g.push_back(complex_json(c));
                return {{"form", "polynomial"}, {"h", h}, {"g", g}};
            }
        },
        spec.kind);
    if (spec.scale != 1.0) j["scale"] = spec.scale;
    return j;
}

/// Serializes a constructed map: polynomial maps as their (h, g) coefficients.
inline json map_to_json(const HarmonicMap& f) {
    using namespace detail;
    if (f.is_automorphism()) {
        const auto& m = f.as_automorphism();
        return {{"form", "automorphism"}, {"a", complex_json(m.a)}, {"rotation", m.rotation}};
    }
    const auto& p = f.as_polynomial();
    json h = json::array(), g = json::array();
    for (auto c : p.h.coefficients()) h.push_back(complex_json(c));
    for (auto c : p.g.coefficients()) g.push_back(complex_json(c));
    return {{"form", "polynomial"}, {"h", h}, {"g", g}};
}

inline MapSpec parse_map_spec(const std::string& text) { return map_spec_from_json(detail::parse_text(text)); }
inline MapSpec load_map_spec(const std::string& path) { return parse_map_spec(detail::read_file(path)); }

// ---------------------------------------------------------------------------
// Presets

struct Preset {
    std::string name;
    MapSpec spec;
    std::string description;
};

/// Named maps used throughout the verification suite.
inline std::vector<Preset> builtin_presets() {
    return {
        {"identity", {RawSpec{{0.0, 1.0}, {0.0}}}, "f(z) = z"},
        {"example1-affine-0.5", {AffineSpec{0.5}}, "f(z) = z + 0.5 conj(z)"},
        {"affine-selfmap-0.5", {AffineSpec{0.5}, 1.0 / 1.5}, "(z + 0.5 conj(z)) / 1.5, a self-map of the disk"},
        {"remark-shear-0.3", {ShearSpec{0.3, 2}}, "f(z) = z + conj(0.3 z^2)"},
        {"shear-selfmap-0.3", {ShearSpec{0.3, 2}, 1.0 / 1.3}, "(z + conj(0.3 z^2)) / 1.3, a self-map of the disk"},
        {"example2-eps-0.1", {ShearSpec{0.1, 2}}, "f(z) = z + 0.1 conj(z)^2"},
        {"rotation", {AutomorphismSpec{0.0, 0.7}}, "f(z) = e^{0.7 i} z"},
        {"automorphism-0.5", {AutomorphismSpec{0.5, 0.0}}, "f(z) = (z - 0.5) / (1 - 0.5 z)"},
    };
}

/// Fixed names above, or a parametrized family name: affine-<a>, affine-selfmap-<a>,
/// shear-<a>, shear-selfmap-<a>, automorphism-<a>, rotation-<t>.
inline MapSpec preset(const std::string& name) {
    for (const auto& p : builtin_presets())
        if (p.name == name) return p.spec;
    auto tail = [&](std::string_view prefix, double& v) {
        if (name.rfind(prefix, 0) != 0) return false;
        try {
            std::size_t used = 0;
            const std::string rest = name.substr(prefix.size());
            v = std::stod(rest, &used);
            return used == rest.size();
        } catch (const std::exception&) {
            return false;
        }
    };
    double v = 0.0;
    if (tail("affine-selfmap-", v)) return {AffineSpec{v}, 1.0 / (1.0 + std::abs(v))};
    if (tail("shear-selfmap-", v)) return {ShearSpec{v, 2}, 1.0 / (1.0 + std::abs(v))};
    if (tail("affine-", v)) return {AffineSpec{v}};
    if (tail("shear-", v)) return {ShearSpec{v, 2}};
    if (tail("automorphism-", v)) return {AutomorphismSpec{v, 0.0}};
    if (tail("rotation-", v)) return {AutomorphismSpec{0.0, v}};
    throw ParseError("unknown preset '" + name + "'");
}

// ---------------------------------------------------------------------------
// Regions

/// 0.5 + 0.2 cos(3 theta) sampled at M points.
inline StarShaped trefoil_star(std::size_t samples = 256, double base = 0.5, double amplitude = 0.2) {
    std::vector<double> p(samples);
    for (std::size_t j = 0; j < samples; ++j)
        p[j] = base + amplitude * std::cos(3.0 * 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(samples));
    return StarShaped(std::move(p));
}

inline Region region_from_json(const json& j) {
    using namespace detail;
    const auto& kind = need(j, "kind");
    if (!kind.is_string()) throw ParseError("field 'kind' must be a string");
    const auto k = kind.get<std::string>();
    if (k == "disk") return Disk(need_number(j, "r"));
    if (k == "star") {
        const auto& p = need(j, "profile");
        if (!p.is_array()) throw ParseError("field 'profile' must be an array");
        std::vector<double> prof;
        for (const auto& v : p) {
            if (!v.is_number()) throw ParseError("profile entries must be numbers");
            prof.push_back(v.get<double>());
        }
        return StarShaped(std::move(prof));
    }
    if (k == "grid") {
        const auto& n = need(j, "n");
        if (!n.is_number_integer() || n.get<int>() < 1) throw ParseError("field 'n' must be a positive integer");
        const auto& mask = need(j, "mask");
        if (!mask.is_string()) throw ParseError("field 'mask' must be a base64 string");
        return PixelGrid(n.get<int>(), unpack_mask(mask.get<std::string>(), n.get<int>()));
    }
    throw ParseError("unknown region kind '" + k + "'");
}

inline json region_to_json(const Region& e) {
    return std::visit(
        [](const auto& r) -> json {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Disk>) {
                return {{"kind", "disk"}, {"r", r.radius}};
            } else if constexpr (std::is_same_v<T, StarShaped>) {
                return {{"kind", "star"}, {"profile", r.profile()}};
            } else {
                return {{"kind", "grid"}, {"n", r.resolution()}, {"mask", pack_mask(r)}};
            }
        },
        e);
}

/// Construction errors inside well-formed JSON (e.g. radius 1.5) are reported as parse errors.
inline Region parse_region(const std::string& text) {
    try {
        return region_from_json(detail::parse_text(text));
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
}
inline Region load_region(const std::string& path) { return parse_region(detail::read_file(path)); }

// ---------------------------------------------------------------------------
// Families

namespace detail {

inline Range parse_range(const json& j, const char* key) {
    const auto& v = need(j, key);
    if (v.is_number()) return {v.get<double>(), v.get<double>()};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        Range r{v[0].get<double>(), v[1].get<double>()};
        if (r.hi < r.lo) throw ParseError(std::string("range '") + key + "' is empty");
        return r;
    }
    throw ParseError(std::string("field '") + key + "' must be a number or [lo, hi]");
}

inline json range_json(const Range& r) { return json::array({r.lo, r.hi}); }

inline bool optional_bool(const json& j, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean()) throw ParseError(std::string("field '") + key + "' must be a boolean");
    return j.at(key).get<bool>();
}

}  // namespace detail

inline FamilySpec family_from_json(const json& j) {
    using namespace detail;
    const auto& kind = need(j, "kind");
    if (!kind.is_string()) throw ParseError("field 'kind' must be a string");
    const auto k = kind.get<std::string>();
    FamilySpec fam;
    if (k == "affine") {
        fam.kind = AffineFamily{parse_range(j, "alpha")};
    } else if (k == "shear") {
        ShearFamily s{parse_range(j, "alpha"), {2}};
        if (j.contains("powers")) {
            s.powers.clear();
            for (const auto& p : j.at("powers")) {
                if (!p.is_number_integer()) throw ParseError("shear powers must be integers");
                s.powers.push_back(p.get<int>());
            }
        }
        fam.kind = s;
    } else if (k == "automorphism") {
        AutomorphismFamily a{parse_range(j, "a_abs"), j.contains("rotation") ? parse_range(j, "rotation") : Range{}};
        if (j.contains("a_arg")) a.a_arg = parse_range(j, "a_arg");
        fam.kind = a;
    } else if (k == "raw") {
        const auto& d = need(j, "degree");
        if (!d.is_number_integer()) throw ParseError("field 'degree' must be an integer");
        fam.kind = RawBallFamily{d.get<int>(), need_number(j, "bound")};
    } else {
        throw ParseError("unknown family kind '" + k + "'");
    }
    fam.require_self_map = optional_bool(j, "require_self_map", fam.require_self_map);
    fam.require_sense_preserving = optional_bool(j, "require_sense_preserving", fam.require_sense_preserving);
    fam.rescale_to_self_map = optional_bool(j, "rescale_to_self_map", fam.rescale_to_self_map);
    try {
        (void)family_space(fam);
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
    return fam;
}

inline json family_to_json(const FamilySpec& fam) {
    using namespace detail;
    json j = std::visit(
        [](const auto& k) -> json {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, AffineFamily>) {
                return {{"kind", "affine"}, {"alpha", range_json(k.alpha)}};
            } else if constexpr (std::is_same_v<T, ShearFamily>) {
                return {{"kind", "shear"}, {"alpha", range_json(k.alpha)}, {"powers", k.powers}};
            } else if constexpr (std::is_same_v<T, AutomorphismFamily>) {
                return {{"kind", "automorphism"},
                        {"a_abs", range_json(k.a_abs)},
                        {"a_arg", range_json(k.a_arg)},
                        {"rotation", range_json(k.rotation)}};
            } else {
                return {{"kind", "raw"}, {"degree", k.degree}, {"bound", k.bound}};
            }
        },
        fam.kind);
    j["require_self_map"] = fam.require_self_map;
    j["require_sense_preserving"] = fam.require_sense_preserving;
    j["rescale_to_self_map"] = fam.rescale_to_self_map;
    return j;
}

inline FamilySpec parse_family(const std::string& text) { return family_from_json(detail::parse_text(text)); }
inline FamilySpec load_family(const std::string& path) { return parse_family(detail::read_file(path)); }

// ---------------------------------------------------------------------------
// Reports

inline json report_to_json(const VerificationReport& r) {
    return {{"name", r.name},
            {"lhs", r.lhs},
            {"rhs", r.rhs},
            {"margin", r.margin},
            {"pass", r.pass},
            {"tolerance", r.tolerance},
            {"evals", r.evals},
            {"relation", r.relation == Relation::Equal ? "equal" : "less_equal"},
            {"hypothesis_met", r.hypothesis_met},
            {"informational", r.informational},
            {"detail", r.detail}};
}

inline constexpr std::string_view kReportCsvHeader = "name,lhs,rhs,margin,pass,tol,evals";

/// The row name carries status tags so the CSV keeps its seven columns.
inline std::string report_csv_row(const VerificationReport& r) {
    std::string name = r.name;
    if (r.informational) name += " [reference]";
    if (!r.hypothesis_met) name += " [hypothesis-unmet]";
    std::ostringstream os;
    os << name << ',' << num(r.lhs) << ',' << num(r.rhs) << ',' << num(r.margin) << ',' << (r.pass ? "true" : "false")
       << ',' << num(r.tolerance) << ',' << r.evals;
    return os.str();
}

inline std::string reports_csv(const std::vector<VerificationReport>& rows) {
    std::string out(kReportCsvHeader);
    out += '\n';
    for (const auto& r : rows) out += report_csv_row(r) + '\n';
    return out;
}

inline std::string sweep_csv(const SweepTable& t) {
    std::ostringstream os;
    os << "rank,lattice_index";
    if (!t.choice_name.empty()) os << ',' << t.choice_name;
    for (const auto& n : t.param_names) os << ',' << n;
    os << ",ratio,feasible,flags\n";
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        os << i << ',' << r.lattice_index;
        if (!t.choice_name.empty()) os << ',' << r.choice;
        for (double p : r.params) os << ',' << num(p);
        os << ',' << num(r.ratio) << ',' << (r.feasible ? "true" : "false") << ',' << r.flags << '\n';
    }
    return os.str();
}

inline std::string trace_csv(const SearchResult& s) {
    std::ostringstream os;
    os << "iteration";
    if (!s.choice_name.empty()) os << ',' << s.choice_name;
    for (const auto& n : s.param_names) os << ',' << n;
    os << ",value,feasible\n";
    for (const auto& t : s.trace) {
        os << t.iteration;
        if (!s.choice_name.empty()) os << ',' << t.choice;
        for (double p : t.params) os << ',' << num(p);
        os << ',' << num(t.value) << ',' << (t.feasible ? "true" : "false") << '\n';
    }
    return os.str();
}

inline json search_to_json(const SearchResult& s) {
    json trace = json::array();
    for (const auto& t : s.trace)
        trace.push_back({{"iteration", t.iteration}, {"choice", t.choice}, {"params", t.params}, {"value", t.value},
                         {"feasible", t.feasible}});
    return {{"param_names", s.param_names},
            {"choice_name", s.choice_name},
            {"best_choice", s.best_choice},
            {"best_params", s.best_params},
            {"best_value", s.best_value},
            {"lattice_best", s.lattice_best},
            {"evaluations", s.evaluations},
            {"converged", s.converged},
            {"seed", s.seed},
            {"argmax_point", detail::complex_json(s.argmax_point)},
            {"exceeds_one", s.exceeds_one},
            {"escaped_points", s.escaped_points},
            {"trace", trace}};
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

}  // namespace hmarea::io
