#include <cmath>
#include <functional>
#include <ostream>

#include "cli.hpp"
#include "config.hpp"
#include "entrokit/bitstream.hpp"
#include "entrokit/entropy.hpp"
#include "entrokit/experiments.hpp"
#include "entrokit/markov_chain.hpp"
#include "entrokit/mixing.hpp"
#include "entrokit/sampling.hpp"
#include "entrokit/stability.hpp"
#include "entrokit/type_class.hpp"
#include "entrokit/type_coder.hpp"

namespace entrokit::cli {

namespace {

MarkovModel binary(std::size_t m, std::vector<double> rows) {
    return MarkovModel::create(Alphabet::indices(2), m, std::move(rows));
}

SymbolSequence bits_of(const std::string& s) {
    std::vector<Symbol> v;
    for (char c : s) v.push_back(static_cast<Symbol>(c - '0'));
    return SymbolSequence(2, std::move(v));
}

bool throws_kind(ErrorKind kind, const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind() == kind;
    }
    return false;
}

bool near(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

}  // namespace

int run_selftest(std::ostream& out) {
    const auto fair = binary(0, {0.5, 0.5});
    const auto sym = binary(1, {0.9, 0.1, 0.1, 0.9});
    const std::vector<std::pair<std::string, std::function<bool()>>> checks{
        {"stationary law of a symmetric chain",
         [&] {
             const auto pi = stationary_distribution(sym);
             return near(pi[0], 0.5) && near(pi[1], 0.5);
         }},
        {"reducible chain rejected",
         [] { return throws_kind(ErrorKind::NonErgodic, [] { binary(1, {1, 0, 0, 1}); }); }},
        {"empty sample", [&] { return sample(sym, 0, 7).empty(); }},
        {"iid conditional ignores context",
         [&] {
             const auto q = conditional_law(fair, {});
             return near(q[0], 0.5) && near(q[1], 0.5);
         }},
        {"wrong context length",
         [] {
             const auto m2 = binary(2, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5});
             const std::vector<Symbol> ctx{0};
             return throws_kind(ErrorKind::BadContext, [&] { conditional_law(m2, ctx); });
         }},
        {"empty blockwise sample",
         [] { return sample_blockwise(BlockwiseModel::create(0.1, 1000), 0, 1).sequence.empty(); }},
        {"entropy of a fair coin", [&] { return near(entropy_rate(fair), 1.0); }},
        {"entropy of a deterministic cycle",
         [] {
             const auto cyc = MarkovModel::create(Alphabet::indices(2), 1, {0, 1, 1, 0}, std::vector<double>{0.5, 0.5}, false);
             return near(entropy_rate(cyc), 0.0);
         }},
        {"sigma^2 of a fair coin", [&] { return near(sigma_squared(fair).sigma2, 0.0); }},
        {"phi of an iid source", [&] { return near(phi_mixing(fair, 1), 0.0) && near(phi_mixing(fair, 5), 0.0); }},
        {"cylinder phi of an iid source", [&] { return near(phi_bruteforce(fair, 1, 3), 0.0); }},
        {"alpha of an iid source",
         [&] {
             const auto a = alpha_mixing_bounds(fair, 1, 2);
             return near(a.lower, 0.0) && near(a.upper, 0.0);
         }},
        {"nu_delta of an iid source at n = 0", [&] { return nu_delta(fair, 0, 1.0).value == 0.0; }},
        {"conditions hold for an iid source",
         [&] {
             const std::vector<double> d{0.5, 1.0};
             return check_theorem2_conditions(fair, d, 1.5, 64).status == "satisfied";
         }},
        {"conditions not applicable to the block process",
         [] { return conditions_not_applicable("blockwise").status == "not applicable"; }},
        {"log* of 1", [] { return log_star(1.0) == 0; }},
        {"order-0 frequencies are the histogram",
         [] {
             const auto d = block_frequencies(bits_of("01101"), 0);
             return d.counts == std::vector<std::uint64_t>{2, 3};
         }},
        {"n = m leaves only the prefix",
         [] {
             const auto d = block_frequencies(bits_of("01"), 2);
             return d.prefix.size() == 2 && std::all_of(d.counts.begin(), d.counts.end(), [](auto c) { return c == 0; });
         }},
        {"all-zero class has one member",
         [] { return type_class_size(block_frequencies(bits_of(std::string(40, '0')), 1)) == 1; }},
        {"round trip of 01001 at m = 1",
         [] {
             const auto x = bits_of("01001");
             return decode(encode(x, CodecParams::fixed(1))) == x;
         }},
        {"zero conditional is not stable",
         [] {
             const auto z = binary(1, {0.5, 0.5, 1.0, 0.0});
             return throws_kind(ErrorKind::NotStable, [&] { m_stability(z); });
         }},
        {"Delta of a fair coin", [&] { return near(delta_coefficients(fair, 1).delta_thm, 1.0); }},
        {"Delta_n of a fair coin", [&] { return near(phi_prime_matrix(fair, 100).delta_n, 1.0); }},
        {"bound below threshold is gated",
         [&] {
             const auto c = concentration_constants(sym);
             return throws_kind(ErrorKind::BelowThreshold, [&] { bound_concentration2(c, 1000, 0.0, DeltaVariant::Proof); });
         }},
        {"KS of a point mass at the median",
         [] {
             const std::vector<double> zeros(10, 0.0);
             return near(ks_statistic(zeros, normal_reference(0.0, 1.0)), 0.5);
         }},
        {"KS against its own empirical CDF",
         [] {
             const std::vector<double> xs{0.3, -1.0, 2.0, 0.3, 5.0};
             return near(ks_statistic(xs, EmpiricalCdf(xs).reference()), 0.0);
         }},
        {"empirical entropy of a constant sequence",
         [] { return near(empirical_entropy(bits_of(std::string(20, '1')), 1), 0.0); }},
        {"garbage codeword is corrupt",
         [] {
             return throws_kind(ErrorKind::Corrupt, [] { decode(from_file_bytes({0xde, 0xad, 0xbe, 0xef})); });
         }},
        {"minimal config echoes defaults",
         [] {
             const auto r = validate_config("concentration", nlohmann::json::object());
             return r.ok() && r.normalized["eta"] == 0.1 && r.normalized["tol"] == 1e-14 && r.normalized["k_start"] == 0;
         }},
        {"negative seed rejected",
         [] { return !validate_config("clt", nlohmann::json{{"seed", -1}}).ok(); }},
    };
    std::size_t failed = 0;
    for (const auto& [name, check] : checks) {
        bool ok = false;
        try {
            ok = check();
        } catch (const std::exception&) {
            ok = false;
        }
        out << (ok ? "PASS " : "FAIL ") << name << "\n";
        if (!ok) ++failed;
    }
    out << (checks.size() - failed) << "/" << checks.size() << " passed\n";
    return failed == 0 ? kExitOk : kExitFailure;
}

}  // namespace entrokit::cli
