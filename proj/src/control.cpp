#include "ciagrid/control.hpp"

#include <algorithm>
#include <numeric>

#include "ciagrid/json_io.hpp"

namespace ciagrid {

ControlField::ControlField(Domain domain, int modes, int ref_depth,
                           const std::vector<std::vector<Rational>>& values, std::vector<bool> active)
    : domain_(std::move(domain)), modes_(modes), ref_depth_(ref_depth), active_(std::move(active)) {
    domain_.validate();
    if (modes_ < 1) {
        throw Error("number of modes must be positive");
    }
    if (ref_depth_ < 0 || ref_depth_ * domain_.dim > 40) {
        throw Error("reference depth out of range");
    }
    ref_cells_ = std::size_t{1} << (ref_depth_ * domain_.dim);
    if (values.size() != ref_cells_) {
        throw Error("alpha has " + std::to_string(values.size()) + " rows, expected " +
                    std::to_string(ref_cells_));
    }
    if (active_.empty()) {
        active_.assign(ref_cells_, true);
    } else if (active_.size() != ref_cells_) {
        throw Error("mask size does not match the reference grid");
    }

    for (const auto& row : values) {
        if (row.size() != static_cast<std::size_t>(modes_)) {
            throw Error("alpha row has wrong number of modes");
        }
        for (const auto& v : row) {
            if (!v.get_den().fits_slong_p()) {
                throw Error("alpha denominator too large");
            }
            denominator_ = lcm_checked(denominator_, v.get_den().get_si());
        }
    }
    // Headroom so that prefix sums over all cells and modes fit.
    checked_mul(checked_mul(denominator_, static_cast<std::int64_t>(ref_cells_)), 4 * modes_);

    numer_.resize(ref_cells_ * static_cast<std::size_t>(modes_));
    prefix_.assign((ref_cells_ + 1) * static_cast<std::size_t>(modes_), 0);
    const Rational den(mpz_class(std::to_string(denominator_)));
    for (std::size_t r = 0; r < ref_cells_; ++r) {
        std::int64_t sum = 0;
        int ones = 0;
        for (int m = 0; m < modes_; ++m) {
            const Rational& v = values[r][static_cast<std::size_t>(m)];
            if (v < 0 || v > 1) {
                throw Error("alpha value outside [0,1] at reference cell " + std::to_string(r));
            }
            Rational scaled = v * den;
            std::int64_t n = scaled.get_num().get_si();
            numer_[r * static_cast<std::size_t>(modes_) + static_cast<std::size_t>(m)] = n;
            sum += n;
            ones += (n == denominator_);
        }
        if (sum != denominator_) {
            throw Error("alpha does not sum to 1 at reference cell " + std::to_string(r));
        }
        if (!active_[r] && ones != 1) {
            throw Error("inactive reference cell " + std::to_string(r) + " must carry a one-hot alpha");
        }
        for (int m = 0; m < modes_; ++m) {
            auto ms = static_cast<std::size_t>(m);
            prefix_[(r + 1) * static_cast<std::size_t>(modes_) + ms] =
                prefix_[r * static_cast<std::size_t>(modes_) + ms] + numer_[r * static_cast<std::size_t>(modes_) + ms];
        }
    }
}

Rational ControlField::value(std::size_t ref_cell, int m) const {
    return Rational(numer_.at(ref_cell * static_cast<std::size_t>(modes_) + static_cast<std::size_t>(m))) /
           Rational(mpz_class(std::to_string(denominator_)));
}

Rational ControlField::unit() const {
    return domain_.volume() * pow2(-domain_.dim * ref_depth_) / Rational(mpz_class(std::to_string(denominator_)));
}

std::pair<std::uint64_t, std::uint64_t> ControlField::ref_range(const Cell& cell) const {
    if (cell.depth > ref_depth_) {
        throw Error("cell at depth " + std::to_string(cell.depth) + " is finer than the reference depth " +
                    std::to_string(ref_depth_));
    }
    const int shift = domain_.dim * (ref_depth_ - cell.depth);
    std::uint64_t code = morton_code(cell, domain_.dim);
    return {code << shift, (code + 1) << shift};
}

std::int64_t ControlField::volume_units(const Cell& cell) const {
    auto [lo, hi] = ref_range(cell);
    return static_cast<std::int64_t>(hi - lo) * denominator_;
}

std::int64_t ControlField::integral_units(const Cell& cell, int m) const {
    auto [lo, hi] = ref_range(cell);
    auto ms = static_cast<std::size_t>(m);
    auto stride = static_cast<std::size_t>(modes_);
    return prefix_[hi * stride + ms] - prefix_[lo * stride + ms];
}

std::optional<int> ControlField::binary_mode(const Cell& cell) const {
    const std::int64_t vol = volume_units(cell);
    for (int m = 0; m < modes_; ++m) {
        if (integral_units(cell, m) == vol) {
            return m;
        }
    }
    return std::nullopt;
}

std::vector<Rational> cell_integral(const ControlField& alpha, const Cell& cell) {
    std::vector<Rational> out;
    out.reserve(static_cast<std::size_t>(alpha.modes()));
    for (int m = 0; m < alpha.modes(); ++m) {
        out.push_back(alpha.to_measure(alpha.integral_units(cell, m)));
    }
    return out;
}

std::int64_t nonbinariness_units(const ControlField& alpha, const Cell& cell) {
    const std::int64_t vol = alpha.volume_units(cell);
    std::int64_t best = 0;
    for (int m = 0; m < alpha.modes(); ++m) {
        std::int64_t a = alpha.integral_units(cell, m);
        best = std::max(best, std::min(a, vol - a));
    }
    return best;
}

Rational nonbinariness(const ControlField& alpha, const Cell& cell) {
    return alpha.to_measure(nonbinariness_units(alpha, cell));
}

std::vector<std::int64_t> nonbinariness_all(const ControlField& alpha, const Grid& grid, Exec exec) {
    std::vector<std::int64_t> out(grid.size());
    const auto count = static_cast<std::ptrdiff_t>(grid.size());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static) num_threads(thread_cap())
        for (std::ptrdiff_t n = 0; n < count; ++n) {
            out[static_cast<std::size_t>(n)] = nonbinariness_units(alpha, grid.cell(static_cast<std::size_t>(n)));
        }
    } else {
        for (std::ptrdiff_t n = 0; n < count; ++n) {
            out[static_cast<std::size_t>(n)] = nonbinariness_units(alpha, grid.cell(static_cast<std::size_t>(n)));
        }
    }
    return out;
}

std::int64_t pseudometric_units(const ControlField& alpha, const BinaryControl& omega, const Grid& grid) {
    if (omega.modes.size() != grid.size()) {
        throw Error("binary control has " + std::to_string(omega.modes.size()) + " cells, grid has " +
                    std::to_string(grid.size()));
    }
    const int M = alpha.modes();
    std::vector<std::int64_t> deficit(static_cast<std::size_t>(M), 0);
    std::int64_t worst = 0;
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const Cell& c = grid.cell(n);
        const std::int64_t vol = alpha.volume_units(c);
        const int chosen = omega.modes[n];
        if (chosen < 0 || chosen >= M) {
            throw Error("binary control mode out of range");
        }
        for (int m = 0; m < M; ++m) {
            auto& dm = deficit[static_cast<std::size_t>(m)];
            dm += alpha.integral_units(c, m) - (m == chosen ? vol : 0);
            worst = std::max(worst, dm < 0 ? -dm : dm);
        }
    }
    return worst;
}

Rational pseudometric(const ControlField& alpha, const BinaryControl& omega, const Grid& grid) {
    return alpha.to_measure(pseudometric_units(alpha, omega, grid));
}

ControlField control_from_json(const nlohmann::json& j) {
    Domain domain = domain_from_json(j.at("domain"));
    const int M = j.at("M").get<int>();
    const int L = j.at("L").get<int>();
    const std::string order = j.value("order", std::string("z"));
    if (order != "z" && order != "row-major") {
        throw Error("alpha order must be \"z\" or \"row-major\"");
    }
    if (L < 0 || L * domain.dim > 40) {
        throw Error("reference depth out of range");
    }
    const std::size_t R = std::size_t{1} << (L * domain.dim);
    const auto& rows = j.at("alpha");
    if (rows.size() != R) {
        throw Error("alpha has " + std::to_string(rows.size()) + " rows, expected " + std::to_string(R));
    }
    std::vector<bool> mask;
    if (j.contains("mask")) {
        for (const auto& b : j.at("mask")) {
            mask.push_back(b.is_boolean() ? b.get<bool>() : b.get<int>() != 0);
        }
        if (mask.size() != R) {
            throw Error("mask size does not match the reference grid");
        }
    }

    auto z_of = [&](std::size_t file_pos) -> std::size_t {
        if (order == "z") {
            return file_pos;
        }
        Cell c;
        c.depth = L;
        for (int a = 0; a < domain.dim; ++a) {
            c.index[static_cast<std::size_t>(a)] = (file_pos >> (a * L)) & ((std::uint64_t{1} << L) - 1);
        }
        return morton_code(c, domain.dim);
    };

    std::vector<std::vector<Rational>> values(R);
    std::vector<bool> zmask(mask.empty() ? 0 : R);
    for (std::size_t p = 0; p < R; ++p) {
        std::vector<Rational> row;
        const auto& jr = rows.at(p);
        if (jr.size() != static_cast<std::size_t>(M)) {
            throw Error("alpha row " + std::to_string(p) + " has wrong number of modes");
        }
        for (const auto& v : jr) {
            row.push_back(rational_from_json(v));
        }
        const std::size_t z = z_of(p);
        values[z] = std::move(row);
        if (!mask.empty()) {
            zmask[z] = mask[p];
        }
    }
    return ControlField(std::move(domain), M, L, values, std::move(zmask));
}

nlohmann::json control_to_json(const ControlField& alpha) {
    nlohmann::json j;
    j["domain"] = domain_to_json(alpha.domain());
    j["M"] = alpha.modes();
    j["L"] = alpha.ref_depth();
    j["order"] = "z";
    auto& rows = j["alpha"] = nlohmann::json::array();
    for (std::size_t r = 0; r < alpha.ref_cells(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int m = 0; m < alpha.modes(); ++m) {
            row.push_back(rational_to_json(alpha.value(r, m)));
        }
        rows.push_back(std::move(row));
    }
    if (std::find(alpha.active().begin(), alpha.active().end(), false) != alpha.active().end()) {
        auto& mask = j["mask"] = nlohmann::json::array();
        for (bool b : alpha.active()) {
            mask.push_back(b);
        }
    }
    return j;
}

nlohmann::json binary_control_to_json(const BinaryControl& omega) {
    nlohmann::json modes = nlohmann::json::array();
    for (int m : omega.modes) {
        modes.push_back(m + 1);
    }
    return {{"modes", modes}};
}

BinaryControl binary_control_from_json(const nlohmann::json& j) {
    BinaryControl omega;
    for (const auto& m : j.at("modes")) {
        omega.modes.push_back(m.get<int>() - 1);
    }
    return omega;
}

} // namespace ciagrid
