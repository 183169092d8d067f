#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace agrisim {

/// Gray-code Sobol sequence, 32-bit resolution, dimensions 1-8.
/// Direction numbers follow the standard primitive-polynomial table
/// (dimension 1 is the van der Corput sequence). The first point is the
/// origin, so index 0 maps to the lower corner of any sampled box.
class SobolSequence {
public:
    static constexpr int max_dimension = 8;

    explicit SobolSequence(int dimension) : dim_(dimension) {
        if (dimension < 1 || dimension > max_dimension)
            throw std::invalid_argument("SobolSequence: dimension out of range");
        build_direction_numbers();
        state_.assign(static_cast<std::size_t>(dim_), 0u);
        index_ = 0;
    }

    int dimension() const { return dim_; }

    /// Next point in [0,1)^dim; the first call returns the origin.
    std::vector<double> next() {
        std::vector<double> x(static_cast<std::size_t>(dim_));
        if (index_ > 0) {
            unsigned c = lowest_zero_bit(index_ - 1);
            for (int d = 0; d < dim_; ++d)
                state_[static_cast<std::size_t>(d)] ^=
                    dir_[static_cast<std::size_t>(d)][c];
        }
        for (int d = 0; d < dim_; ++d)
            x[static_cast<std::size_t>(d)] =
                static_cast<double>(state_[static_cast<std::size_t>(d)]) *
                0x1.0p-32;
        ++index_;
        return x;
    }

private:
    struct Poly {
        unsigned degree;
        unsigned coeffs; // interior coefficient bits of the primitive polynomial
        std::uint32_t m[5];
    };

    static const Poly* table() {
        // degree, coefficients, initial direction integers (odd)
        static const Poly polys[7] = {
            {1, 0, {1, 0, 0, 0, 0}},  // dim 2
            {2, 1, {1, 3, 0, 0, 0}},  // dim 3
            {3, 1, {1, 3, 1, 0, 0}},  // dim 4
            {3, 2, {1, 1, 1, 0, 0}},  // dim 5
            {4, 1, {1, 1, 3, 3, 0}},  // dim 6
            {4, 4, {1, 3, 5, 13, 0}}, // dim 7
            {5, 2, {1, 1, 5, 5, 17}}, // dim 8
        };
        return polys;
    }

    void build_direction_numbers() {
        constexpr unsigned bits = 32;
        dir_.assign(static_cast<std::size_t>(dim_),
                    std::vector<std::uint32_t>(bits, 0u));
        // dimension 1: van der Corput
        for (unsigned c = 0; c < bits; ++c)
            dir_[0][c] = 1u << (31 - c);
        for (int d = 1; d < dim_; ++d) {
            const Poly& poly = table()[d - 1];
            unsigned s = poly.degree;
            std::vector<std::uint32_t> m(bits + 1, 0u);
            for (unsigned k = 1; k <= s; ++k) m[k] = poly.m[k - 1];
            for (unsigned k = s + 1; k <= bits; ++k) {
                std::uint32_t v = m[k - s] ^ (m[k - s] << s);
                for (unsigned j = 1; j < s; ++j)
                    if ((poly.coeffs >> (s - 1 - j)) & 1u) v ^= m[k - j] << j;
                m[k] = v;
            }
            for (unsigned c = 0; c < bits; ++c)
                dir_[static_cast<std::size_t>(d)][c] = m[c + 1] << (31 - c);
        }
    }

    static unsigned lowest_zero_bit(std::uint64_t v) {
        unsigned c = 0;
        while (v & 1u) {
            v >>= 1;
            ++c;
        }
        return c;
    }

    int dim_;
    std::uint64_t index_ = 0;
    std::vector<std::uint32_t> state_;
    std::vector<std::vector<std::uint32_t>> dir_;
};

/// Affine map of a unit-cube point into a box given as per-dimension
/// [low, high] ranges.
inline std::vector<double> map_to_ranges(
    const std::vector<double>& unit,
    const std::vector<std::pair<double, double>>& ranges) {
    if (unit.size() != ranges.size())
        throw std::invalid_argument("map_to_ranges: dimension mismatch");
    std::vector<double> out(unit.size());
    for (std::size_t i = 0; i < unit.size(); ++i)
        out[i] = ranges[i].first + unit[i] * (ranges[i].second - ranges[i].first);
    return out;
}

} // namespace agrisim
