#include "catch2/catch_amalgamated.hpp"

#include <cmath>
#include <numbers>

#include "hmarea/io.hpp"
#include "hmarea/search.hpp"

using namespace hmarea;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

bool same_trace(const SearchResult& a, const SearchResult& b) {
    if (a.trace.size() != b.trace.size()) return false;
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        const auto& x = a.trace[i];
        const auto& y = b.trace[i];
        if (x.iteration != y.iteration || x.choice != y.choice || x.params != y.params || x.value != y.value)
            return false;
    }
    return true;
}

}  // namespace

TEST_CASE("lattice order and budget") {
    ParamSpace sp;
    sp.names = {"x", "y"};
    sp.axes = {{0.0, 1.0}, {2.0, 2.0}};
    sp.choices = {2, 3};
    const auto pts = build_lattice(sp, 3);
    REQUIRE(pts.size() == 6);
    CHECK(pts[0].choice == 2);
    CHECK(pts[0].params == std::vector<double>{0.0, 2.0});
    CHECK(pts[1].params == std::vector<double>{0.5, 2.0});
    CHECK(pts[3].choice == 3);

    ParamSpace wide;
    wide.axes = {{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}};
    CHECK(build_lattice(wide, 100).size() == 1000000);
    CHECK_THROWS_AS(build_lattice(wide, 101), BudgetExceeded);

    const FamilySpec raw{RawBallFamily{16, 0.01}};
    CHECK_THROWS_AS(sweep(raw, Disk(0.5), 2), BudgetExceeded);
}

TEST_CASE("affine sweep follows the constant-Jacobian law") {
    const FamilySpec fam{AffineFamily{{0.0, 0.9}}};
    const auto t = sweep(fam, Disk(0.5), 10);
    REQUIRE(t.rows.size() == 10);
    CHECK(t.rows.front().ratio == Approx(1.0).epsilon(1e-12));
    CHECK(t.rows.front().params[0] == 0.0);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const double a = t.rows[i].params[0];
        CHECK(t.rows[i].ratio == Approx(1.0 - a * a).epsilon(1e-10));
        if (i > 0) CHECK(t.rows[i].ratio <= t.rows[i - 1].ratio);
    }
}

TEST_CASE("rotation and shear sweeps") {
    const FamilySpec rot{AutomorphismFamily{{0.0, 0.0}, {0.0, 2 * kPi}}};
    for (const auto& row : sweep(rot, io::trefoil_star(), 7).rows) CHECK(row.ratio == Approx(1.0).epsilon(1e-12));

    const FamilySpec sh{ShearFamily{{0.0, 0.4}, {2}}};
    const double r = 0.5;
    for (const auto& row : sweep(sh, Disk(r), 5).rows) {
        const double a = row.params[0];
        CHECK(row.ratio == Approx(1.0 - 2.0 * a * a * r * r).epsilon(1e-10));
    }
}

TEST_CASE("sweep flags constraint violations") {
    FamilySpec fam{AffineFamily{{0.0, 0.9}}};
    fam.require_self_map = true;
    const auto t = sweep(fam, Disk(0.5), 4);
    for (const auto& row : t.rows) {
        if (row.params[0] > 0.0) {
            CHECK_FALSE(row.feasible);
            CHECK(row.flags.find("not-self-map") != std::string::npos);
        } else {
            CHECK(row.feasible);
        }
    }
    FamilySpec over{ShearFamily{{0.0, 0.6}, {2}}};
    const auto o = sweep(over, Disk(0.5), 3);
    CHECK(o.rows.back().ratio == -1.0);
    CHECK(o.rows.back().flags.rfind("invalid", 0) == 0);
}

TEST_CASE("sweep is deterministic across worker counts") {
    const FamilySpec fam{ShearFamily{{-0.3, 0.3}, {2, 3}}, false, true, true};
    QuadOptions one;
    QuadOptions eight;
    eight.workers = 8;
    const auto a = io::sweep_csv(sweep(fam, io::trefoil_star(), 9, one));
    const auto b = io::sweep_csv(sweep(fam, io::trefoil_star(), 9, eight));
    CHECK(a == b);
}

TEST_CASE("maximize_area_ratio examples") {
    const auto aff = maximize_area_ratio(FamilySpec{AffineFamily{{0.0, 0.9}}}, Disk(0.5), 200, 42);
    CHECK(aff.best_params[0] == Approx(0.0).margin(1e-6));
    CHECK(aff.best_value == Approx(1.0).epsilon(1e-6));

    FamilySpec sh{ShearFamily{{-0.3, 0.3}, {2, 3}}};
    sh.require_self_map = true;
    sh.rescale_to_self_map = true;
    const auto s = maximize_area_ratio(sh, Disk(0.5), 200, 42);
    CHECK(s.best_value <= 1.0 + 1e-6);
    CHECK(s.best_value >= s.lattice_best);

    const auto rot = maximize_area_ratio(FamilySpec{AutomorphismFamily{{0.0, 0.0}, {0.0, 2 * kPi}}}, Disk(0.5), 50, 42);
    CHECK(rot.best_value == Approx(1.0).epsilon(1e-14));
    CHECK(rot.best_params[2] == 0.0);
}

TEST_CASE("search traces are reproducible") {
    const FamilySpec fam{AutomorphismFamily{{0.1, 0.5}, {0.0, 0.0}, {0.5, 3.0}}};
    const auto a = maximize_area_ratio(fam, io::trefoil_star(), 100, 42);
    const auto b = maximize_area_ratio(fam, io::trefoil_star(), 100, 42);
    CHECK(same_trace(a, b));
    CHECK(io::trace_csv(a) == io::trace_csv(b));
    CHECK(a.best_value == a.trace.back().value);
    CHECK(a.seed == 42);
    // the optimum points the Moebius centre at a lobe of the trefoil
    CHECK(a.best_params[1] == Approx(2 * kPi / 3).margin(1e-4));
}

TEST_CASE("maximize_sp_ratio examples") {
    const auto rot = maximize_sp_ratio(construct_map({AutomorphismSpec{0.0, 0.7}}), Disk(0.9), 100, 42);
    CHECK(rot.best_value == Approx(1.0).epsilon(1e-12));
    CHECK(rot.best_params == std::vector<double>{0.0, 0.0});
    CHECK_FALSE(rot.exceeds_one);

    const auto aff = maximize_sp_ratio(construct_map({AffineSpec{0.5}, 1.0 / 1.5}), Disk(0.9), 100, 42);
    CHECK(aff.best_value == Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(aff.escaped_points == 0);

    // the unscaled affine map leaves the disk inside Disk{0.9}; the lattice records the escapes
    const auto wild = maximize_sp_ratio(construct_map({AffineSpec{0.5}}), Disk(0.9), 10, 42);
    CHECK(wild.escaped_points > 0);
    CHECK(wild.exceeds_one);

    CHECK_THROWS_AS(maximize_sp_ratio(construct_map({AffineSpec{0.5}}), Disk(1.0), 10, 42), InvalidArgument);
}

TEST_CASE("joint family and point search") {
    FamilySpec fam{AffineFamily{{0.0, 0.5}}};
    fam.rescale_to_self_map = true;
    const auto res = maximize_sp_ratio(fam, Disk(0.9), 100, 42);
    REQUIRE(res.param_names.size() == 3);
    CHECK(res.param_names.back() == "theta");
    CHECK(res.best_value == Approx(1.0).epsilon(1e-9));
}
