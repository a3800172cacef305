// Image areas of a few maps over the disk of radius 1/2, next to m(E).
#include <cstdio>
#include <numbers>

#include "hmarea/hmarea.hpp"

int main() {
    using namespace hmarea;
    const Region disk = Disk(0.5);
    const struct {
        const char* name;
        MapSpec spec;
    } maps[] = {
        {"z + 0.5 conj(z)", {AffineSpec{0.5}}},
        {"z + conj(0.3 z^2)", {ShearSpec{0.3, 2}}},
        {"(z - 0.5)/(1 - 0.5 z)", {AutomorphismSpec{0.5, 0.0}}},
    };
    std::printf("m(E) = %.12f\n", region_measure(disk).value);
    for (const auto& m : maps) {
        const auto f = construct_map(m.spec);
        const auto area = image_area(f, disk);
        const auto chain = disk_contraction_report(f, 0.5);
        std::printf("%-24s m(f(E)) = %.12f  energy = %.12f  self-map sup = %.4f\n", m.name, area.value,
                    chain.analytic_energy, chain.self_map_sup);
    }
    const auto h = hyperbolic_disk_integral(0.5);
    std::printf("hyperbolic integral r=0.5: quadrature %.12f, closed form %.12f, claimed %.12f\n", h.quadrature,
                h.closed_form, h.claimed);
}
