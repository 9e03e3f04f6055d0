#include "ura/gf.hpp"

#include <stdexcept>
#include <string>

namespace ura {

std::uint32_t GfContext::default_prim_poly(int m) {
    switch (m) {
        case 1: return 0b11;
        case 2: return 0b111;
        case 3: return 0b1011;
        case 4: return 0b10011;
        case 5: return 0b100101;
        case 6: return 0b1000011;
        case 7: return 0b10001001;
        case 8: return 0b100011101;
        default: throw std::domain_error("GfContext: extension degree must be in 1..8");
    }
}

GfContext GfContext::with_default_poly(int m) { return GfContext(m, default_prim_poly(m)); }

GfContext::GfContext(int m, std::uint32_t prim_poly) : m_(m), prim_poly_(prim_poly) {
    if (m < 1 || m > 8) throw std::domain_error("GfContext: extension degree must be in 1..8");
    if ((prim_poly >> m) != 1u)
        throw std::domain_error("GfContext: prim_poly must have degree exactly m");
    q_ = 1 << m;

    log_.assign(q_, -1);
    antilog_.assign(q_ - 1, 0);

    // Powers of x, reduced mod prim_poly. A primitive polynomial makes x a
    // generator of the multiplicative group; verify the full cycle.
    std::uint32_t e = 1;
    for (int i = 0; i < q_ - 1; ++i) {
        if (log_[e] != -1)
            throw std::domain_error("GfContext: polynomial is not primitive (generator cycle too short)");
        antilog_[i] = static_cast<int>(e);
        log_[e] = i;
        e <<= 1;
        if (e & (1u << m)) e ^= prim_poly;
    }
    if (e != 1)
        throw std::domain_error("GfContext: polynomial is not primitive");
}

int GfContext::inv(int a) const {
    if (a == 0) throw std::domain_error("gf_inv: zero has no inverse");
    int e = (q_ - 1 - log_[a]) % (q_ - 1);
    return antilog_[e];
}

SymbolPermutation symbol_permutation(const GfContext& gf, int alpha) {
    if (alpha == 0) throw std::domain_error("symbol_permutation: alpha must be nonzero");
    SymbolPermutation p;
    p.alpha = alpha;
    p.perm.resize(gf.q());
    for (int a = 0; a < gf.q(); ++a) p.perm[a] = gf.mul(alpha, a);
    return p;
}

} // namespace ura
