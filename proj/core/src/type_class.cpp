#include "entrokit/type_class.hpp"

#include <algorithm>
#include <optional>

#include "entrokit/errors.hpp"

namespace entrokit {

namespace {

constexpr auto kAbsent = static_cast<std::size_t>(-1);

// Context graph of a descriptor: arcs c -> shift(c, x) with multiplicity
// counts[c * l + x].
struct ContextGraph {
    std::size_t K = 1;
    std::size_t start = 0;
    std::size_t end = 0;
    bool feasible = false;
    bool empty = true;  // no arcs at all
    std::vector<std::uint64_t> out;
    std::vector<std::size_t> vertices;  // matrix vertices: active contexts other than end
    std::vector<std::size_t> slot;      // context -> matrix index or kAbsent
};

ContextGraph build_graph(const BlockFrequencyVector& d) {
    const ContextSpace ctx(d.l, d.m);
    ContextGraph g;
    g.K = ctx.count();
    g.start = ctx.index(d.prefix);
    g.out.assign(g.K, 0);
    std::vector<std::uint64_t> in(g.K, 0);
    for (std::size_t c = 0; c < g.K; ++c) {
        for (std::size_t x = 0; x < d.l; ++x) {
            const std::uint64_t n = d.counts[c * d.l + x];
            if (n == 0) continue;
            g.out[c] += n;
            in[ctx.shift(c, static_cast<Symbol>(x))] += n;
            g.empty = false;
        }
    }
    // Either every vertex balances (closed walk, end = start) or the start has
    // one surplus out-arc and exactly one other vertex one surplus in-arc.
    std::optional<std::size_t> source;
    std::optional<std::size_t> sink;
    for (std::size_t v = 0; v < g.K; ++v) {
        if (g.out[v] == in[v]) continue;
        if (g.out[v] == in[v] + 1 && !source) {
            source = v;
        } else if (in[v] == g.out[v] + 1 && !sink) {
            sink = v;
        } else {
            return g;
        }
    }
    if (source.has_value() != sink.has_value()) return g;
    if (source && *source != g.start) return g;
    g.end = sink.value_or(g.start);
    g.feasible = true;
    g.slot.assign(g.K, kAbsent);
    for (std::size_t v = 0; v < g.K; ++v) {
        if (v == g.end) continue;
        if (g.out[v] > 0 || v == g.start) {
            g.slot[v] = g.vertices.size();
            g.vertices.push_back(v);
        }
    }
    return g;
}

// Reduced out-degree Laplacian D - A on the matrix vertices.
std::vector<mpz_class> reduced_laplacian(const BlockFrequencyVector& d, const ContextGraph& g) {
    const ContextSpace ctx(d.l, d.m);
    const std::size_t r = g.vertices.size();
    std::vector<mpz_class> M(r * r, 0);
    for (std::size_t i = 0; i < r; ++i) {
        const std::size_t c = g.vertices[i];
        M[i * r + i] += static_cast<unsigned long>(g.out[c]);
        for (std::size_t x = 0; x < d.l; ++x) {
            const std::uint64_t n = d.counts[c * d.l + x];
            if (n == 0) continue;
            const std::size_t j = g.slot[ctx.shift(c, static_cast<Symbol>(x))];
            if (j != kAbsent) M[i * r + j] -= static_cast<unsigned long>(n);
        }
    }
    return M;
}

// Fraction-free (Bareiss) determinant with row pivoting.
mpz_class bareiss_determinant(std::vector<mpz_class> A, std::size_t r) {
    if (r == 0) return 1;
    int sign = 1;
    mpz_class prev = 1;
    for (std::size_t k = 0; k + 1 < r; ++k) {
        if (A[k * r + k] == 0) {
            std::size_t p = k + 1;
            while (p < r && A[p * r + k] == 0) ++p;
            if (p == r) return 0;
            for (std::size_t j = 0; j < r; ++j) std::swap(A[k * r + j], A[p * r + j]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < r; ++i) {
            for (std::size_t j = k + 1; j < r; ++j) {
                mpz_class v = A[i * r + j] * A[k * r + k] - A[i * r + k] * A[k * r + j];
                mpz_divexact(A[i * r + j].get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
            }
        }
        prev = A[k * r + k];
    }
    mpz_class det = A[(r - 1) * r + (r - 1)];
    return sign < 0 ? mpz_class(-det) : det;
}

// t d_e! prod_{v != e}(d_v - 1)! / prod N(v, x)!. The division is exact only
// with t in the numerator.
mpz_class class_size(const mpz_class& t, const BlockFrequencyVector& d, const ContextGraph& g) {
    mpz_class num = t;
    mpz_class den = 1;
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(g.out[g.end]));
    num *= f;
    for (std::size_t c : g.vertices) {
        mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(g.out[c] - 1));
        num *= f;
    }
    for (std::uint64_t n : d.counts) {
        if (n > 1) {
            mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
            den *= f;
        }
    }
    mpz_class out;
    mpz_divexact(out.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return out;
}

// adj(M) = det(M) M^-1 by rational Gauss-Jordan; M must be nonsingular.
std::vector<mpz_class> adjugate(const std::vector<mpz_class>& M, std::size_t r, const mpz_class& det) {
    std::vector<mpq_class> A(r * r), inv(r * r, 0);
    for (std::size_t i = 0; i < r * r; ++i) A[i] = M[i];
    for (std::size_t i = 0; i < r; ++i) inv[i * r + i] = 1;
    for (std::size_t k = 0; k < r; ++k) {
        std::size_t p = k;
        while (A[p * r + k] == 0) ++p;
        if (p != k) {
            for (std::size_t j = 0; j < r; ++j) {
                std::swap(A[k * r + j], A[p * r + j]);
                std::swap(inv[k * r + j], inv[p * r + j]);
            }
        }
        const mpq_class pivot = A[k * r + k];
        for (std::size_t j = 0; j < r; ++j) {
            A[k * r + j] /= pivot;
            inv[k * r + j] /= pivot;
        }
        for (std::size_t i = 0; i < r; ++i) {
            if (i == k || A[i * r + k] == 0) continue;
            const mpq_class f = A[i * r + k];
            for (std::size_t j = 0; j < r; ++j) {
                A[i * r + j] -= f * A[k * r + j];
                inv[i * r + j] -= f * inv[k * r + j];
            }
        }
    }
    std::vector<mpz_class> adj(r * r);
    for (std::size_t i = 0; i < r * r; ++i) {
        const mpq_class v = inv[i] * det;
        adj[i] = v.get_num();
    }
    return adj;
}

// Walks a type class position by position, keeping |completions|, the
// arborescence count t = det(M) and adj(M) current under rank-one updates.
class ClassWalker {
public:
    explicit ClassWalker(const BlockFrequencyVector& d) : d_(d), ctx_(d.l, d.m), g_(build_graph(d)) {
        if (!g_.feasible) return;
        r_ = g_.vertices.size();
        const auto M = reduced_laplacian(d, g_);
        t_ = bareiss_determinant(M, r_);
        if (t_ == 0) return;
        count_ = class_size(t_, d, g_);
        adj_ = adjugate(M, r_, t_);
        current_ = g_.start;
    }

    const mpz_class& count() const noexcept { return count_; }
    std::size_t context() const noexcept { return current_; }
    std::uint64_t remaining(Symbol y) const { return d_.counts[current_ * d_.l + y]; }

    // Completions after taking symbol y next; remaining(y) > 0.
    mpz_class candidate(Symbol y) const {
        const std::size_t c = current_;
        const std::uint64_t n = remaining(y);
        const std::uint64_t dc = g_.out[c];
        mpz_class out;
        if (c == g_.end) {
            out = count_ * static_cast<unsigned long>(n);
            mpz_divexact_ui(out.get_mpz_t(), out.get_mpz_t(), static_cast<unsigned long>(dc));
            return out;
        }
        if (dc == 1) return count_;
        const std::size_t i = g_.slot[c];
        const std::size_t j = g_.slot[ctx_.shift(c, y)];
        mpz_class tp = t_ - adj_[i * r_ + i];
        if (j != kAbsent) tp += adj_[j * r_ + i];
        out = count_ * static_cast<unsigned long>(n) * tp;
        const mpz_class den = t_ * static_cast<unsigned long>(dc - 1);
        mpz_divexact(out.get_mpz_t(), out.get_mpz_t(), den.get_mpz_t());
        return out;
    }

    void advance(Symbol x, mpz_class next_count) {
        const std::size_t c = current_;
        const std::size_t next = ctx_.shift(c, x);
        if (c != g_.end) {
            const std::size_t i = g_.slot[c];
            const std::size_t j = g_.slot[next];
            if (g_.out[c] == 1) {
                // c leaves the graph: keep it as an isolated vertex with a unit
                // diagonal so M stays nonsingular (M += e_c e_c^T).
                const mpz_class t1 = t_ + adj_[i * r_ + i];
                rank_one_update(t1, i, kAbsent, -1);
            }
            // Removing arc c -> next: M += (-e_c)(e_c - e_next)^T.
            mpz_class tp = t_ - adj_[i * r_ + i];
            if (j != kAbsent) tp += adj_[j * r_ + i];
            rank_one_update(tp, i, j, +1);
        }
        --d_.counts[c * d_.l + x];
        --g_.out[c];
        current_ = next;
        count_ = std::move(next_count);
    }

private:
    // adj' = (t' adj + sign * col_i (x) (row_i - row_j)) / t, with row_j
    // omitted when j is absent; sign = -1 gives the e_i e_i^T update.
    void rank_one_update(const mpz_class& t_new, std::size_t i, std::size_t j, int sign) {
        std::vector<mpz_class> col(r_), row(r_);
        for (std::size_t k = 0; k < r_; ++k) {
            col[k] = adj_[k * r_ + i];
            row[k] = adj_[i * r_ + k];
            if (j != kAbsent) row[k] -= adj_[j * r_ + k];
        }
        mpz_class v;
        for (std::size_t a = 0; a < r_; ++a) {
            for (std::size_t b = 0; b < r_; ++b) {
                v = t_new * adj_[a * r_ + b];
                if (sign > 0) {
                    v += col[a] * row[b];
                } else {
                    v -= col[a] * row[b];
                }
                mpz_divexact(adj_[a * r_ + b].get_mpz_t(), v.get_mpz_t(), t_.get_mpz_t());
            }
        }
        t_ = t_new;
    }

    BlockFrequencyVector d_;
    ContextSpace ctx_;
    ContextGraph g_;
    std::size_t r_ = 0;
    mpz_class t_ = 0;
    mpz_class count_ = 0;
    std::vector<mpz_class> adj_;
    std::size_t current_ = 0;
};

}  // namespace

BlockFrequencyVector block_frequencies(const SymbolSequence& seq, std::size_t m) {
    const std::size_t n = seq.size();
    if (n < m) fail(ErrorKind::TooShort, "sequence length " + std::to_string(n) + " is below the order " + std::to_string(m));
    const std::size_t l = seq.alphabet_size();
    const ContextSpace ctx(l, m);
    if (ctx.count() > (std::size_t{1} << 26) / l) fail(ErrorKind::GuardExceeded, "l^(m+1) exceeds 2^26 blocks");
    BlockFrequencyVector d;
    d.m = m;
    d.l = l;
    d.n = n;
    const auto symbols = seq.symbols();
    d.prefix.assign(symbols.begin(), symbols.begin() + static_cast<std::ptrdiff_t>(m));
    d.counts.assign(ctx.count() * l, 0);
    std::size_t c = ctx.index(d.prefix);
    for (std::size_t i = m; i < n; ++i) {
        ++d.counts[c * l + symbols[i]];
        c = ctx.shift(c, symbols[i]);
    }
    return d;
}

void validate_descriptor(const BlockFrequencyVector& d) {
    if (d.l < 2 || d.l > kMaxAlphabet) fail(ErrorKind::Validation, "descriptor alphabet size must lie in [2, 255]");
    if (d.n < d.m) fail(ErrorKind::TooShort, "descriptor n is below m");
    if (d.prefix.size() != d.m) fail(ErrorKind::Validation, "descriptor prefix length differs from m");
    for (Symbol s : d.prefix) {
        if (s >= d.l) fail(ErrorKind::Validation, "descriptor prefix symbol outside the alphabet");
    }
    const ContextSpace ctx(d.l, d.m);
    if (d.counts.size() != ctx.count() * d.l) fail(ErrorKind::Validation, "descriptor needs l^(m+1) counts");
    std::uint64_t total = 0;
    for (std::uint64_t v : d.counts) {
        if (v > d.n) fail(ErrorKind::Validation, "descriptor count exceeds n");
        total += v;
        if (total > d.n) fail(ErrorKind::Validation, "descriptor counts exceed n - m");
    }
    if (total != d.n - d.m) fail(ErrorKind::Validation, "descriptor counts must sum to n - m");
}

mpz_class type_class_size(const BlockFrequencyVector& desc) {
    validate_descriptor(desc);
    const ContextGraph g = build_graph(desc);
    if (!g.feasible) return 0;
    if (g.empty) return 1;
    const mpz_class t = bareiss_determinant(reduced_laplacian(desc, g), g.vertices.size());
    if (t == 0) return 0;
    return class_size(t, desc, g);
}

mpz_class rank_in_type_class(const SymbolSequence& seq, std::size_t m) {
    const auto desc = block_frequencies(seq, m);
    ClassWalker walker(desc);
    mpz_class rank = 0;
    const auto symbols = seq.symbols();
    for (std::size_t i = m; i < symbols.size(); ++i) {
        const Symbol x = symbols[i];
        for (Symbol y = 0; y < x; ++y) {
            if (walker.remaining(y) > 0) rank += walker.candidate(y);
        }
        walker.advance(x, walker.candidate(x));
    }
    return rank;
}

SymbolSequence unrank(const BlockFrequencyVector& desc, const mpz_class& index) {
    validate_descriptor(desc);
    ClassWalker walker(desc);
    if (walker.count() == 0) fail(ErrorKind::Infeasible, "descriptor admits no sequence");
    if (index < 0 || index >= walker.count()) fail(ErrorKind::IndexOutOfRange, "index outside the type class");
    std::vector<Symbol> out(desc.prefix.begin(), desc.prefix.end());
    out.reserve(desc.n);
    mpz_class rest = index;
    for (std::size_t i = desc.m; i < desc.n; ++i) {
        bool moved = false;
        for (std::size_t y = 0; y < desc.l && !moved; ++y) {
            const auto s = static_cast<Symbol>(y);
            if (walker.remaining(s) == 0) continue;
            mpz_class cnt = walker.candidate(s);
            if (rest < cnt) {
                walker.advance(s, std::move(cnt));
                out.push_back(s);
                moved = true;
            } else {
                rest -= cnt;
            }
        }
        if (!moved) fail(ErrorKind::Infeasible, "walk stalled while unranking");
    }
    return SymbolSequence(desc.l, std::move(out));
}

}  // namespace entrokit
