#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace entrokit {

class Rng;

/// Symbol index into an alphabet. The codec header stores l in 8 bits, so 255
/// symbols is the ceiling everywhere.
using Symbol = std::uint8_t;
inline constexpr std::size_t kMaxAlphabet = 255;

class Alphabet {
public:
    explicit Alphabet(std::vector<std::string> labels);

    /// Labels "0", "1", ..., "l-1".
    static Alphabet indices(std::size_t l);

    std::size_t size() const noexcept { return labels_.size(); }
    const std::string& label(Symbol s) const { return labels_.at(s); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    std::optional<Symbol> index_of(std::string_view label) const;

    friend bool operator==(const Alphabet&, const Alphabet&) = default;

private:
    std::vector<std::string> labels_;
};

class SymbolSequence {
public:
    SymbolSequence() = default;
    SymbolSequence(std::size_t alphabet_size, std::vector<Symbol> data);

    std::size_t alphabet_size() const noexcept { return alphabet_size_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }
    Symbol operator[](std::size_t i) const { return data_[i]; }
    std::span<const Symbol> symbols() const noexcept { return data_; }

    friend bool operator==(const SymbolSequence&, const SymbolSequence&) = default;

private:
    std::size_t alphabet_size_ = 2;
    std::vector<Symbol> data_;
};

/// Contexts of length m over an alphabet of size l, numbered as base-l
/// integers with the oldest symbol most significant. Numbering follows the
/// lexicographic order of the context strings.
class ContextSpace {
public:
    ContextSpace(std::size_t l, std::size_t m);

    std::size_t alphabet_size() const noexcept { return l_; }
    std::size_t order() const noexcept { return m_; }
    std::size_t count() const noexcept { return count_; }

    std::size_t shift(std::size_t ctx, Symbol x) const noexcept {
        return m_ == 0 ? 0 : (ctx * l_ + x) % count_;
    }
    std::size_t index(std::span<const Symbol> context) const;
    std::vector<Symbol> symbols(std::size_t ctx) const;

private:
    std::size_t l_;
    std::size_t m_;
    std::size_t count_;
};

/// Stationary m-th order Markov source. Immutable once created.
class MarkovModel {
public:
    /// `transitions` holds l^m rows of length l in context order.
    /// Throws Error(Validation) naming the offending field and row, or
    /// Error(NonErgodic) when `ergodic` is set and the context chain is
    /// reducible or periodic.
    static MarkovModel create(Alphabet alphabet, std::size_t order, std::vector<double> transitions,
                              std::optional<std::vector<double>> initial_law = std::nullopt,
                              bool ergodic = true, std::string id = {});

    const std::string& id() const noexcept { return id_; }
    const Alphabet& alphabet() const noexcept { return alphabet_; }
    std::size_t alphabet_size() const noexcept { return alphabet_.size(); }
    std::size_t order() const noexcept { return contexts_.order(); }
    const ContextSpace& contexts() const noexcept { return contexts_; }

    double prob(std::size_t ctx, Symbol x) const { return transitions_[ctx * alphabet_size() + x]; }
    std::span<const double> row(std::size_t ctx) const {
        return std::span<const double>(transitions_).subspan(ctx * alphabet_size(), alphabet_size());
    }
    const std::vector<double>& transitions() const noexcept { return transitions_; }

    /// Law of the first m symbols used by the sampler.
    const std::vector<double>& initial_law() const noexcept { return initial_law_; }
    /// False when a non-stationary initial law was supplied.
    bool initial_is_stationary() const noexcept { return initial_is_stationary_; }

    bool declared_ergodic() const noexcept { return declared_ergodic_; }
    bool irreducible() const noexcept { return irreducible_; }
    std::size_t period() const noexcept { return period_; }

    /// Unique stationary law of the context chain, present iff irreducible.
    const std::optional<std::vector<double>>& unique_stationary_law() const noexcept { return stationary_; }

    /// K x K row-stochastic matrix of the context chain, row-major.
    std::vector<double> context_transition_matrix() const;

private:
    MarkovModel(Alphabet alphabet, std::size_t order) : alphabet_(std::move(alphabet)), contexts_(alphabet_.size(), order) {}

    std::string id_;
    Alphabet alphabet_;
    ContextSpace contexts_;
    std::vector<double> transitions_;
    std::vector<double> initial_law_;
    std::optional<std::vector<double>> stationary_;
    bool initial_is_stationary_ = true;
    bool declared_ergodic_ = true;
    bool irreducible_ = false;
    std::size_t period_ = 0;
};

/// Hidden Markov model with strictly positive kernel and emissions.
class HmmModel {
public:
    /// `hidden_kernel` is H x H row-major, `emissions` is H x l row-major.
    static HmmModel create(Alphabet alphabet, std::size_t hidden_states, std::vector<double> hidden_kernel,
                           std::vector<double> emissions, std::string id = {});

    const std::string& id() const noexcept { return id_; }
    const Alphabet& alphabet() const noexcept { return alphabet_; }
    std::size_t alphabet_size() const noexcept { return alphabet_.size(); }
    std::size_t hidden_states() const noexcept { return hidden_; }
    double kernel(std::size_t from, std::size_t to) const { return kernel_[from * hidden_ + to]; }
    double emission(std::size_t state, Symbol y) const { return emissions_[state * alphabet_size() + y]; }
    const std::vector<double>& hidden_stationary() const noexcept { return hidden_stationary_; }

    /// min q / max q over all kernel entries.
    double epsilon() const noexcept { return epsilon_; }
    /// max over y of (max_x g(y|x) / min_x g(y|x)).
    double eta() const noexcept { return eta_; }

private:
    explicit HmmModel(Alphabet alphabet) : alphabet_(std::move(alphabet)) {}

    std::string id_;
    Alphabet alphabet_;
    std::size_t hidden_ = 0;
    std::vector<double> kernel_;
    std::vector<double> emissions_;
    std::vector<double> hidden_stationary_;
    double epsilon_ = 0.0;
    double eta_ = 0.0;
};

/// The slow-convergence block process over {0, 1}: iid block lengths with
/// mass proportional to t^-(3/2 - epsilon) on 1..tail_cap, each block all
/// zeros or fair coin flips with probability 1/2.
class BlockwiseModel {
public:
    static constexpr std::uint64_t kDefaultTailCap = 100'000'000;

    static BlockwiseModel create(double epsilon, std::uint64_t tail_cap = kDefaultTailCap, std::string id = {});

    const std::string& id() const noexcept { return id_; }
    double epsilon() const noexcept { return epsilon_; }
    double exponent() const noexcept { return 1.5 - epsilon_; }
    std::uint64_t tail_cap() const noexcept { return tail_cap_; }
    /// Normalizer of the truncated mass function.
    double normalizer() const noexcept { return 1.0 / total_weight_; }
    /// Mass of the untruncated law beyond the cap; the sampler's bias.
    double truncated_mass() const noexcept { return truncated_mass_; }
    /// Truncated mass function, t in 1..tail_cap.
    double pmf(std::uint64_t t) const;

    /// Draws one block length from the truncated law. `cap_hits` counts draws
    /// of the untruncated law that landed beyond the cap and were redrawn.
    std::uint64_t draw_length(Rng& rng, std::uint64_t& cap_hits) const;

private:
    BlockwiseModel() = default;

    struct TailBlock {
        std::uint64_t first;
        std::uint64_t last;
        double weight;
    };

    std::string id_;
    double epsilon_ = 0.1;
    std::uint64_t tail_cap_ = kDefaultTailCap;
    std::vector<double> dense_cdf_;  // cumulative weights for t = 1..dense_cdf_.size()
    std::vector<TailBlock> tail_;
    std::vector<double> tail_cdf_;
    double total_weight_ = 0.0;
    double truncated_mass_ = 0.0;
};

}  // namespace entrokit
