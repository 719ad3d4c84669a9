#include "ciagrid/sur.hpp"

namespace ciagrid {

namespace {

BinaryControl run_sur(const ControlField& alpha, const Grid& grid, std::vector<SurStep>* trace) {
    const auto M = static_cast<std::size_t>(alpha.modes());
    std::vector<std::int64_t> phi(M, 0);
    std::vector<std::int64_t> gamma(M, 0);
    BinaryControl omega;
    omega.modes.reserve(grid.size());
    for (const Cell& c : grid.cells()) {
        const std::int64_t vol = alpha.volume_units(c);
        int chosen = -1;
        for (std::size_t m = 0; m < M; ++m) {
            const std::int64_t a = alpha.integral_units(c, static_cast<int>(m));
            gamma[m] = phi[m] + a;
            if (a == vol && chosen < 0) {
                chosen = static_cast<int>(m);
            }
        }
        const bool copied = chosen >= 0;
        if (!copied) {
            chosen = 0;
            for (std::size_t m = 1; m < M; ++m) {
                if (gamma[m] > gamma[static_cast<std::size_t>(chosen)]) {
                    chosen = static_cast<int>(m);
                }
            }
        }
        phi = gamma;
        phi[static_cast<std::size_t>(chosen)] -= vol;
        omega.modes.push_back(chosen);
        if (trace) {
            trace->push_back({gamma, phi, chosen, copied});
        }
    }
    return omega;
}

} // namespace

BinaryControl sur_variant(const ControlField& alpha, const Grid& grid) { return run_sur(alpha, grid, nullptr); }

BinaryControl sur_variant_traced(const ControlField& alpha, const Grid& grid, std::vector<SurStep>& trace) {
    trace.clear();
    return run_sur(alpha, grid, &trace);
}

} // namespace ciagrid
