#ifndef URA_GF_HPP
#define URA_GF_HPP

#include <cstdint>
#include <vector>

namespace ura {

/// Arithmetic context for GF(2^m), 1 <= m <= 8. Symbols are labeled by their
/// polynomial coefficient bitmask, so addition is bitwise XOR and symbol 1 is
/// the multiplicative identity. Multiplication goes through log/antilog
/// tables built eagerly from the primitive polynomial; the context is
/// immutable after construction and safe to share across threads.
class GfContext {
public:
    GfContext(int m, std::uint32_t prim_poly);

    // Conventional primitive polynomial for each extension degree
    // (e.g. x^6 + x + 1 = 0b1000011 for GF(64)).
    static std::uint32_t default_prim_poly(int m);
    static GfContext with_default_poly(int m);

    int m() const { return m_; }
    int q() const { return q_; }
    std::uint32_t prim_poly() const { return prim_poly_; }

    int add(int a, int b) const { return a ^ b; }

    int mul(int a, int b) const {
        if (a == 0 || b == 0) return 0;
        int s = log_[a] + log_[b];
        if (s >= q_ - 1) s -= q_ - 1;
        return antilog_[s];
    }

    // Inverse of a nonzero element; throws std::domain_error on zero.
    int inv(int a) const;

private:
    int m_ = 0;
    int q_ = 0;
    std::uint32_t prim_poly_ = 0;
    std::vector<int> log_;     // defined on the q-1 nonzero elements
    std::vector<int> antilog_; // exponent -> element, length q-1
};

/// Permutation of the Q symbol labels induced by multiplication with a
/// nonzero field element: perm[a] = alpha * a.
struct SymbolPermutation {
    int alpha = 0;
    std::vector<int> perm;
};

SymbolPermutation symbol_permutation(const GfContext& gf, int alpha);

} // namespace ura

#endif
