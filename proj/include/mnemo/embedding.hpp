#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>

#include "mnemo/errors.hpp"

namespace mnemo {

// Fixed-dimension embedding. Stored vectors are unit-norm (tolerance 1e-6);
// use normalized() to build one from raw components.
template <std::size_t N>
struct Embedding {
    static constexpr std::size_t dim = N;
    std::array<double, N> v{};

    double dot(const Embedding& other) const {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i) s += v[i] * other.v[i];
        return s;
    }

    double norm() const { return std::sqrt(dot(*this)); }

    bool is_unit(double tol = 1e-6) const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return std::abs(norm() - 1.0) <= tol;
    }

    static Embedding normalized(std::span<const double> raw) {
        if (raw.size() != N) throw DegenerateVectorError("wrong dimension");
        Embedding e;
        double sq = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            if (!std::isfinite(raw[i])) throw DegenerateVectorError("non-finite component");
            e.v[i] = raw[i];
            sq += raw[i] * raw[i];
        }
        double n = std::sqrt(sq);
        if (n < 1e-9) throw DegenerateVectorError("zero norm");
        for (auto& x : e.v) x /= n;
        return e;
    }
};

using Embedding768 = Embedding<768>;
using Embedding256 = Embedding<256>;

// Cosine similarity; for unit vectors this is the dot product, which is what
// every ranking stage uses.
template <std::size_t N>
double cosine(const Embedding<N>& a, const Embedding<N>& b) {
    return a.dot(b);
}

// Matryoshka truncation: keep the first 256 of 768 dims and re-normalize.
// Throws DegenerateTruncationError when the slice norm is below 1e-9.
Embedding256 truncate_normalize(const Embedding768& e);

}  // namespace mnemo
