#include "mnemo/embedding.hpp"

namespace mnemo {

Embedding256 truncate_normalize(const Embedding768& e) {
    double sq = 0.0;
    for (std::size_t i = 0; i < 256; ++i) sq += e.v[i] * e.v[i];
    double n = std::sqrt(sq);
    if (n < 1e-9) throw DegenerateTruncationError("leading 256-dim slice has near-zero norm");
    Embedding256 out;
    for (std::size_t i = 0; i < 256; ++i) out.v[i] = e.v[i] / n;
    return out;
}

}  // namespace mnemo
