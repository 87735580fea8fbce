#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "config.hpp"
#include "entrokit/bitstream.hpp"
#include "entrokit/entropy.hpp"
#include "entrokit/experiments.hpp"
#include "entrokit/mixing.hpp"
#include "entrokit/parallel.hpp"
#include "entrokit/rng.hpp"
#include "entrokit/stability.hpp"
#include "entrokit/type_class.hpp"
#include "entrokit/type_coder.hpp"
#include "model_io.hpp"
#include "report.hpp"

#ifndef ENTROKIT_VERSION
#define ENTROKIT_VERSION "0.0.0"
#endif

namespace entrokit::cli {

using nlohmann::json;

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::GuardExceeded:
        case ErrorKind::TooLarge:
        case ErrorKind::Infeasible:
        case ErrorKind::NoDecay:
        case ErrorKind::TailCapExceeded:
            return kExitGuard;
        default:
            return kExitValidation;
    }
}

namespace {

struct Options {
    std::string model;
    std::string config;
    std::string out;
    std::string in;
    std::string alphabet;
    std::string manifest;
    std::optional<std::uint64_t> seed;
    std::vector<std::size_t> n;
    std::optional<std::size_t> m;
    std::optional<std::size_t> reps;
    std::optional<std::size_t> max_gap;
    std::optional<std::size_t> depth;
    std::optional<std::size_t> k_start;
    std::optional<std::size_t> window;
    std::optional<std::size_t> mc_paths;
    std::optional<std::size_t> mc_length;
    std::optional<double> eta;
    std::optional<double> epsilon;
    std::optional<double> tol;
    std::optional<double> delta;
    std::optional<double> beta;
    std::vector<double> t_grid;
    std::vector<double> deltas;
    bool json = false;
    bool validate_only = false;
};

json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

const MarkovModel& require_markov(const LoadedModel& lm, const std::string& what) {
    if (const auto* m = lm.markov()) return *m;
    fail(ErrorKind::Validation, what + " needs a markov model, got " + lm.kind);
}

void emit_json(std::ostream& out, const std::optional<std::string>& path, const json& doc) {
    const auto text = doc.dump(2) + "\n";
    if (path) {
        write_file(*path, text);
    } else {
        out << text;
    }
}

// ---- codec ---------------------------------------------------------------

int cmd_encode(const Options& o, std::ostream& out) {
    std::optional<Alphabet> alphabet;
    if (!o.alphabet.empty()) {
        alphabet = parse_alphabet_list(o.alphabet);
    } else if (!o.model.empty()) {
        const auto lm = load_model_file(o.model);
        alphabet = require_markov(lm, "--model for encode").alphabet();
    }
    std::string text;
    try {
        text = read_file(o.in);
    } catch (const std::exception& e) {
        fail(ErrorKind::Validation, e.what());
    }
    const auto parsed = parse_sequence_text(text, alphabet);
    const CodecParams params = o.m ? CodecParams::fixed(*o.m) : CodecParams::paper_schedule(o.epsilon.value_or(0.1));
    if (params.schedule && !(params.epsilon > 0.0 && params.epsilon < 0.5)) {
        fail(ErrorKind::Validation, "--epsilon must lie in (0, 1/2)");
    }
    const auto bits = encode(parsed.sequence, params);
    const auto bytes = to_file_bytes(bits);
    write_file(o.out, std::string(bytes.begin(), bytes.end()));
    const auto b = codelength_breakdown(parsed.sequence, params);
    if (o.json) {
        out << json{{"n", parsed.sequence.size()},
                    {"l", parsed.alphabet.size()},
                    {"m", b.order},
                    {"bits", bits.size()},
                    {"fixed", b.fixed},
                    {"prefix", b.prefix},
                    {"counts", b.counts},
                    {"index", b.index},
                    {"file_bytes", bytes.size()}}
                   .dump(2)
            << "\n";
    } else {
        out << "n " << parsed.sequence.size() << "  l " << parsed.alphabet.size() << "  m " << b.order << "\n"
            << "bits " << bits.size() << " (fixed " << b.fixed << ", prefix " << b.prefix << ", counts " << b.counts
            << ", index " << b.index << ")\n";
    }
    return kExitOk;
}

int cmd_decode(const Options& o, std::ostream& out) {
    std::string raw;
    try {
        raw = read_file(o.in);
    } catch (const std::exception& e) {
        fail(ErrorKind::Validation, e.what());
    }
    const auto bits = from_file_bytes(std::vector<std::uint8_t>(raw.begin(), raw.end()));
    const auto seq = decode(bits);
    Alphabet alphabet = Alphabet::indices(seq.alphabet_size());
    if (!o.alphabet.empty()) {
        alphabet = parse_alphabet_list(o.alphabet);
        if (alphabet.size() != seq.alphabet_size()) {
            fail(ErrorKind::Validation, "--alphabet has " + std::to_string(alphabet.size()) + " labels, the codeword " +
                                            std::to_string(seq.alphabet_size()));
        }
    }
    const auto text = format_sequence_text(seq, alphabet);
    if (o.out.empty()) {
        out << text;
    } else {
        write_file(o.out, text);
    }
    return kExitOk;
}

// ---- analytics -----------------------------------------------------------

int cmd_entropy(const Options& o, std::ostream& out) {
    const auto lm = load_model_file(o.model);
    double h = 0.0;
    json doc{{"model", std::visit([](const auto& m) { return m.id(); }, lm.model)}, {"unit", "bits/symbol"}};
    if (const auto* m = lm.markov()) {
        h = entropy_rate(*m);
        doc["entropy_rate"] = h;
        doc["marginal_entropy"] = marginal_entropy(*m);
    } else if (lm.blockwise()) {
        // The block process has no finite-order law; its entropy rate is the
        // value asserted for the construction.
        h = 0.5;
        doc["entropy_rate"] = h;
        doc["note"] = "asserted value for the block process, not computed";
    } else {
        fail(ErrorKind::Validation, "entropy rate is exact only for markov and blockwise models");
    }
    if (o.json) {
        out << doc.dump(2) << "\n";
    } else {
        out << fixed6(h) << "\n";
    }
    return kExitOk;
}

int cmd_sigma(const Options& o, std::ostream& out) {
    const auto lm = load_model_file(o.model);
    const auto& model = require_markov(lm, "sigma");
    auto report = sigma_squared(model, o.tol.value_or(kDefaultSigmaTol));
    if (o.mc_paths && *o.mc_paths > 0) {
        const auto mc = long_run_variance_mc(model, *o.mc_paths, o.mc_length.value_or(100'000), o.seed.value_or(1));
        report.mc_estimate = mc.estimate;
        report.mc_std_error = mc.std_error;
    }
    json doc{{"model", model.id()},
             {"sigma2", report.sigma2},
             {"terms", report.terms},
             {"last_term", report.last_term},
             {"decay_ratio", report.decay_ratio},
             {"tail_bound", report.tail_bound},
             {"mc_estimate", report.mc_estimate ? json(*report.mc_estimate) : json(nullptr)},
             {"mc_std_error", report.mc_std_error ? json(*report.mc_std_error) : json(nullptr)}};
    if (o.json) {
        out << doc.dump(2) << "\n";
    } else {
        out << fixed6(report.sigma2) << "\n";
        if (report.mc_estimate) out << "mc " << fixed6(*report.mc_estimate) << " +- " << fixed6(*report.mc_std_error) << "\n";
    }
    return kExitOk;
}

json fit_json(const DecayFit& f) {
    return {{"geometric_ratio", real_or_null(f.geometric_ratio)},
            {"geometric_residual", real_or_null(f.geometric_residual)},
            {"power_exponent", real_or_null(f.power_exponent)},
            {"power_residual", real_or_null(f.power_residual)},
            {"points", f.points}};
}

int cmd_mixing(const Options& o, std::ostream& out) {
    const auto lm = load_model_file(o.model);
    const std::size_t N = o.max_gap.value_or(50);
    const double delta = o.delta.value_or(1.0);
    const std::optional<std::string> path = o.out.empty() ? std::nullopt : std::optional(o.out);
    if (const auto* m = lm.markov()) {
        const auto p = mixing_profile(*m, N, o.depth.value_or(1), delta);
        emit_json(out, path,
                  {{"model_id", p.model_id},
                   {"type", "markov"},
                   {"max_gap", N},
                   {"depth", p.depth},
                   {"delta", p.delta},
                   {"phi", p.phi},
                   {"alpha_lower", p.alpha_lower},
                   {"alpha_upper", p.alpha_upper},
                   {"nu_delta", p.nu_delta},
                   {"phi_fit", fit_json(p.phi_fit)}});
        return kExitOk;
    }
    if (const auto* h = lm.hmm()) {
        const std::size_t W = o.window.value_or(std::max<std::size_t>(32, 2 * N));
        const std::size_t R = o.reps.value_or(2000);
        const std::uint64_t seed = o.seed.value_or(1);
        json rows = json::array();
        std::vector<double> values{0.0};
        for (std::size_t n = 1; n <= N; ++n) {
            const auto e = nu_delta(*h, n, delta, W, R, derive_seed(seed, n));
            rows.push_back({{"n", n},
                            {"value", e.value},
                            {"std_error", e.std_error},
                            {"value_double_window", e.value_double_window},
                            {"window_converged", e.window_converged}});
            values.push_back(e.value);
        }
        emit_json(out, path,
                  {{"model_id", h->id()},
                   {"type", "hmm"},
                   {"epsilon", h->epsilon()},
                   {"eta", h->eta()},
                   {"delta", delta},
                   {"window", W},
                   {"reps", R},
                   {"seed", seed},
                   {"nu_delta", rows},
                   {"nu_fit", fit_json(fit_decay(values))},
                   {"note", "phi and alpha are not computed for hidden Markov models"}});
        return kExitOk;
    }
    fail(ErrorKind::Validation, "not applicable: no exact mixing computation for blockwise models");
}

json constants_json(const ConcentrationConstants& c, std::size_t n, const MarkovModel& model) {
    json doc{{"model_id", c.model_id},
             {"l", c.l},
             {"m", c.m},
             {"M", c.M},
             {"M_bound", c.M_bound},
             {"rho", c.rho},
             {"k_start", c.k_start},
             {"sum_phi_from0", c.sum_phi_from0},
             {"sum_phi_from1", c.sum_phi_from1},
             {"Delta_thm", c.delta_thm},
             {"Delta_proof", c.delta_proof},
             {"K1_thm", c.K1(DeltaVariant::Theorem)},
             {"K1_proof", c.K1(DeltaVariant::Proof)},
             {"eta", c.eta},
             {"entropy_rate", c.entropy_rate},
             {"marginal_entropy", c.marginal_entropy},
             {"K_sym", c.k_sym}};
    doc["at_n"] = {{"n", n},
                   {"C1", c1(c, n)},
                   {"C_prime", c_prime(c, n)},
                   {"zeta", zeta(c, n)},
                   {"gamma_n", gamma_n(c, n)},
                   {"gamma_prime", gamma_prime(c, n)},
                   {"K1p_thm", K1_prime(c, n, DeltaVariant::Theorem)},
                   {"K1p_proof", K1_prime(c, n, DeltaVariant::Proof)}};
    if (n <= 10'000) {
        doc["at_n"]["Delta_n"] = phi_prime_matrix(model, n).delta_n;
    } else {
        doc["at_n"]["Delta_n"] = nullptr;
    }
    return doc;
}

int cmd_stability(const Options& o, std::ostream& out) {
    const auto lm = load_model_file(o.model);
    const auto& model = require_markov(lm, "stability");
    const auto c = concentration_constants(model, o.eta.value_or(kDefaultEta), o.k_start.value_or(0), o.tol.value_or(1e-14));
    const std::size_t n = o.n.empty() ? 4096 : o.n.front();
    const std::optional<std::string> path = o.out.empty() ? std::nullopt : std::optional(o.out);
    emit_json(out, path, constants_json(c, n, model));
    return kExitOk;
}

int cmd_conditions(const Options& o, std::ostream& out) {
    const auto lm = load_model_file(o.model);
    const std::vector<double> deltas = o.deltas.empty() ? std::vector<double>{0.25, 0.5, 1.0} : o.deltas;
    const double beta = o.beta.value_or(1.5);
    const std::size_t horizon = o.max_gap.value_or(256);
    const ConditionsReport r = lm.markov() ? check_theorem2_conditions(*lm.markov(), deltas, beta, horizon)
                                           : conditions_not_applicable(lm.kind);
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"delta", row.delta},
                        {"exponent", row.exponent},
                        {"log2_K", real_or_null(row.log2_K)},
                        {"alpha_ok", row.alpha_ok},
                        {"nu_ok", row.nu_ok},
                        {"note", row.note}});
    }
    json doc{{"status", r.status}, {"note", r.note}, {"beta", r.beta}, {"horizon", r.horizon}, {"rows", rows}};
    if (o.json) {
        out << doc.dump(2) << "\n";
    } else {
        out << r.status;
        if (!r.note.empty()) out << ": " << r.note;
        out << "\n";
        for (const auto& row : r.rows) {
            out << "  delta " << row.delta << "  exponent " << row.exponent << "  alpha " << (row.alpha_ok ? "ok" : "fails")
                << "  nu " << (row.nu_ok ? "ok" : "fails") << "\n";
        }
    }
    return kExitOk;
}

// ---- experiments ---------------------------------------------------------

struct ExperimentSetup {
    std::optional<LoadedModel> model;
    json model_doc;       // null when absent
    json model_digest;    // null when absent
    json params;          // normalized config
};

json read_json_file(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::exception& e) {
        fail(ErrorKind::Validation, e.what());
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::Validation, path + ": " + e.what());
    }
}

bool has_overrides(const Options& o) {
    return o.seed || !o.n.empty() || o.reps || !o.t_grid.empty() || o.eta || o.epsilon || o.tol || o.k_start ||
           !o.config.empty() || !o.model.empty();
}

// Returns an exit code when setup stops early (errors or --validate-only).
std::optional<int> prepare(const std::string& command, const Options& o, std::ostream& out, std::ostream& err,
                           ExperimentSetup& setup) {
    json doc = json::object();
    if (!o.manifest.empty()) {
        if (has_overrides(o)) {
            err << "entrokit: --manifest replays a run exactly and takes no model, config or overrides\n";
            return kExitValidation;
        }
        const auto manifest = read_json_file(o.manifest);
        if (!manifest.is_object() || manifest.value("command", "") != command) {
            err << "entrokit: " << o.manifest << " is not a manifest for " << command << "\n";
            return kExitValidation;
        }
        doc = manifest.value("params", json::object());
        setup.model_doc = manifest.value("model", json(nullptr));
        setup.model_digest = manifest.value("model_digest", json(nullptr));
        if (!setup.model_doc.is_null()) setup.model = parse_model(setup.model_doc, manifest.value("model_id", ""));
    } else {
        if (!o.config.empty()) doc = read_json_file(o.config);
        if (!doc.is_object()) {
            err << "entrokit: /: must be a JSON object\n";
            return kExitValidation;
        }
        if (o.seed) doc["seed"] = *o.seed;
        if (o.reps) doc["reps"] = *o.reps;
        if (!o.n.empty()) {
            if (command == "concentration") {
                if (o.n.size() != 1) {
                    err << "entrokit: --n takes one value for concentration\n";
                    return kExitValidation;
                }
                doc["n"] = o.n.front();
            } else {
                doc["n_grid"] = o.n;
            }
        }
        if (!o.t_grid.empty()) doc["t_grid"] = o.t_grid;
        if (o.eta) doc["eta"] = *o.eta;
        if (o.epsilon) doc["epsilon"] = *o.epsilon;
        if (o.tol) doc["tol"] = *o.tol;
        if (o.k_start) doc["k_start"] = *o.k_start;
        if (!o.model.empty()) {
            setup.model = load_model_file(o.model);
            setup.model_doc = setup.model->document;
            setup.model_digest = setup.model->digest;
        }
    }
    if (command == "example1" && setup.model) {
        const auto* b = setup.model->blockwise();
        if (!b) {
            err << "entrokit: example1 takes a blockwise model, got " << setup.model->kind << "\n";
            return kExitValidation;
        }
        for (const auto& [key, value] : {std::pair<std::string, json>{"epsilon", b->epsilon()}, {"tail_cap", b->tail_cap()}}) {
            if (doc.contains(key) && doc[key] != value) {
                err << "entrokit: /" << key << ": conflicts with the model file\n";
                return kExitValidation;
            }
            doc[key] = value;
        }
    }
    const auto checked = validate_config(command, doc);
    if (!checked.ok()) {
        for (const auto& e : checked.errors) err << "entrokit: " << e << "\n";
        return kExitValidation;
    }
    setup.params = checked.normalized;
    if (o.validate_only) {
        out << setup.params.dump(2) << "\n";
        return kExitOk;
    }
    if (command != "example1" && !setup.model) {
        err << "entrokit: " << command << " needs --model\n";
        return kExitValidation;
    }
    if (o.out.empty()) {
        err << "entrokit: " << command << " needs --out\n";
        return kExitValidation;
    }
    return std::nullopt;
}

json manifest_base(const std::string& command, const ExperimentSetup& s, const std::string& started) {
    return {{"tool", "entrokit"},
            {"version", ENTROKIT_VERSION},
            {"command", command},
            {"model", s.model_doc},
            {"model_id", s.model ? json(std::visit([](const auto& m) { return m.id(); }, s.model->model)) : json(nullptr)},
            {"model_digest", s.model_digest},
            {"params", s.params},
            {"base_seed", s.params.at("seed")},
            {"threads", worker_count()},
            {"started", started}};
}

int cmd_clt(const Options& o, std::ostream& out, std::ostream& err) {
    ExperimentSetup s;
    if (auto code = prepare("clt", o, out, err, s)) return *code;
    const auto started = utc_timestamp();
    const auto& model = require_markov(*s.model, "clt");
    const auto report = run_clt(model, clt_params(s.params));

    CsvTable samples({"n", "replicate", "codelength", "loglik", "D"});
    for (const auto& x : report.samples) {
        samples.row().add(std::uint64_t{x.n}).add(std::uint64_t{x.replicate}).add(std::uint64_t{x.codelength}).add(x.loglik).add(x.deviation);
    }
    CsvTable summary({"n", "order", "ks", "mean", "std", "median", "offset_pred", "header_offset", "lower_events"});
    for (const auto& r : report.rows) {
        summary.row()
            .add(std::uint64_t{r.n})
            .add(std::uint64_t{r.order})
            .add(r.ks)
            .add(r.mean)
            .add(r.std)
            .add(r.median)
            .add(r.offset_pred)
            .add(r.header_offset)
            .add(std::uint64_t{r.lower_events});
    }
    auto manifest = manifest_base("clt", s, started);
    manifest["entropy_rate"] = report.entropy;
    manifest["sigma2"] = report.sigma2;
    write_outputs(o.out, {{"samples.csv", samples.str()}, {"summary.csv", summary.str()}}, manifest);
    out << summary.str();
    return kExitOk;
}

int cmd_concentration(const Options& o, std::ostream& out, std::ostream& err) {
    ExperimentSetup s;
    if (auto code = prepare("concentration", o, out, err, s)) return *code;
    const auto started = utc_timestamp();
    const auto& model = require_markov(*s.model, "concentration");
    const auto params = concentration_params(s.params);
    const auto report = run_concentration(model, params);

    CsvTable samples({"n", "replicate", "codelength", "loglik", "deviation"});
    for (const auto& x : report.samples) {
        samples.row().add(std::uint64_t{x.n}).add(std::uint64_t{x.replicate}).add(std::uint64_t{x.codelength}).add(x.loglik).add(x.deviation);
    }
    CsvTable summary({"t", "exceed", "tail", "wilson_lower", "wilson_upper", "bound1_thm", "bound1_proof", "bound2_thm",
                      "bound2_proof", "status"});
    for (const auto& r : report.rows) {
        summary.row()
            .add(r.t)
            .add(std::uint64_t{r.exceed})
            .add(r.tail)
            .add(r.wilson.lower)
            .add(r.wilson.upper)
            .add(r.bound1_thm)
            .add(r.bound1_proof)
            .add(r.bound2_thm)
            .add(r.bound2_proof)
            .add(r.status);
    }
    auto constants = constants_json(report.constants, params.n, model);
    constants["at_n"]["lower_events"] = report.lower_events;
    auto manifest = manifest_base("concentration", s, started);
    manifest["violation"] = report.violation;
    write_outputs(o.out,
                  {{"samples.csv", samples.str()}, {"summary.csv", summary.str()}, {"constants.json", constants.dump(2) + "\n"}},
                  manifest);
    out << summary.str();
    if (report.violation) {
        err << "entrokit: soundness violation, an empirical tail's lower confidence limit exceeds a bound\n";
        return kExitViolation;
    }
    return kExitOk;
}

int cmd_example1(const Options& o, std::ostream& out, std::ostream& err) {
    ExperimentSetup s;
    if (auto code = prepare("example1", o, out, err, s)) return *code;
    const auto started = utc_timestamp();
    const auto report = run_example1(example1_params(s.params));

    CsvTable samples({"series", "n", "replicate", "codelength", "deviation"});
    auto add_samples = [&samples](const std::string& series, const std::vector<ExperimentSample>& xs) {
        for (const auto& x : xs) {
            samples.row().add(series).add(std::uint64_t{x.n}).add(std::uint64_t{x.replicate}).add(std::uint64_t{x.codelength}).add(x.deviation);
        }
    };
    add_samples("blockwise", report.samples);
    add_samples("control", report.control_samples);
    CsvTable summary({"series", "n", "order", "s", "sqrt_n_s"});
    auto add_rows = [&summary](const std::string& series, const std::vector<ScalingRow>& rows) {
        for (const auto& r : rows) summary.row().add(series).add(std::uint64_t{r.n}).add(std::uint64_t{r.order}).add(r.s).add(r.scaled);
    };
    add_rows("blockwise", report.rows);
    add_rows("control", report.control);
    auto manifest = manifest_base("example1", s, started);
    manifest["tail_cap"] = report.tail_cap;
    manifest["truncated_mass"] = report.truncated_mass;
    manifest["tail_cap_hits"] = report.tail_cap_hits;
    manifest["slope"] = report.slope;
    manifest["control_slope"] = report.control.empty() ? json(nullptr) : json(report.control_slope);
    write_outputs(o.out, {{"samples.csv", samples.str()}, {"summary.csv", summary.str()}}, manifest);
    out << summary.str() << "slope " << format_real(report.slope) << "\n";
    return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"entrokit: codec-length surrogate for Kolmogorov complexity, with entropy analytics"};
    app.set_version_flag("--version", ENTROKIT_VERSION);
    app.require_subcommand(1);
    Options o;

    auto model_opt = [&o](CLI::App* sub, bool required) {
        auto* opt = sub->add_option("--model", o.model, "model JSON file");
        if (required) opt->required();
    };
    auto json_flag = [&o](CLI::App* sub) { sub->add_flag("--json", o.json, "machine-readable stdout"); };

    auto* encode_cmd = app.add_subcommand("encode", "encode a sequence file");
    encode_cmd->add_option("--in", o.in, "sequence text file")->required();
    encode_cmd->add_option("--out", o.out, "codeword file")->required();
    encode_cmd->add_option("--m", o.m, "codec order; default is the m_n schedule");
    encode_cmd->add_option("--epsilon", o.epsilon, "schedule epsilon (default 0.1)");
    encode_cmd->add_option("--alphabet", o.alphabet, "comma-separated labels");
    model_opt(encode_cmd, false);
    json_flag(encode_cmd);

    auto* decode_cmd = app.add_subcommand("decode", "decode a codeword file");
    decode_cmd->add_option("--in", o.in, "codeword file")->required();
    decode_cmd->add_option("--out", o.out, "sequence text file (default stdout)");
    decode_cmd->add_option("--alphabet", o.alphabet, "comma-separated labels");

    auto* entropy_cmd = app.add_subcommand("entropy", "entropy rate in bits per symbol");
    model_opt(entropy_cmd, true);
    json_flag(entropy_cmd);

    auto* sigma_cmd = app.add_subcommand("sigma", "asymptotic variance of the log-likelihood");
    model_opt(sigma_cmd, true);
    sigma_cmd->add_option("--tol", o.tol, "series truncation tolerance");
    sigma_cmd->add_option("--mc-paths", o.mc_paths, "Monte Carlo oracle paths (0 skips)");
    sigma_cmd->add_option("--mc-length", o.mc_length, "Monte Carlo path length");
    sigma_cmd->add_option("--seed", o.seed, "base seed");
    json_flag(sigma_cmd);

    auto* mixing_cmd = app.add_subcommand("mixing", "phi, alpha bounds and nu_delta profile");
    model_opt(mixing_cmd, true);
    mixing_cmd->add_option("--max-gap", o.max_gap, "largest gap N");
    mixing_cmd->add_option("--depth", o.depth, "future cylinder depth d");
    mixing_cmd->add_option("--delta", o.delta, "delta for nu_delta");
    mixing_cmd->add_option("--window", o.window, "HMM window W");
    mixing_cmd->add_option("--reps", o.reps, "HMM Monte Carlo paths");
    mixing_cmd->add_option("--seed", o.seed, "base seed");
    mixing_cmd->add_option("--out", o.out, "profile JSON file (default stdout)");

    auto* stability_cmd = app.add_subcommand("stability", "M-stability and concentration constants");
    model_opt(stability_cmd, true);
    stability_cmd->add_option("--eta", o.eta, "eta in (0, 0.5)");
    stability_cmd->add_option("--k-start", o.k_start, "first lag of the phi sum, 0 or 1");
    stability_cmd->add_option("--tol", o.tol, "phi tail tolerance");
    stability_cmd->add_option("--n", o.n, "sequence length for the n-dependent constants")->expected(1);
    stability_cmd->add_option("--out", o.out, "constants JSON file (default stdout)");

    auto* conditions_cmd = app.add_subcommand("conditions", "check the CLT mixing conditions");
    model_opt(conditions_cmd, true);
    conditions_cmd->add_option("--delta", o.deltas, "delta grid");
    conditions_cmd->add_option("--beta", o.beta, "beta > 1");
    conditions_cmd->add_option("--max-gap", o.max_gap, "horizon N");
    json_flag(conditions_cmd);

    std::vector<CLI::App*> experiments;
    for (const auto& [name, help] : {std::pair<const char*, const char*>{"clt", "CLT experiment"},
                                     {"concentration", "concentration tails against the bounds"},
                                     {"example1", "slow-convergence block process scaling"}}) {
        auto* sub = app.add_subcommand(name, help);
        model_opt(sub, false);
        sub->add_option("--config", o.config, "experiment config JSON");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--manifest", o.manifest, "replay a manifest.json");
        sub->add_option("--seed", o.seed, "base seed");
        sub->add_option("--reps", o.reps, "replicates");
        sub->add_option("--n", o.n, std::string(name) == "concentration" ? "sequence length" : "n grid");
        sub->add_flag("--validate-only", o.validate_only, "print the normalized config and exit");
        if (std::string(name) == "concentration") {
            sub->add_option("--t-grid", o.t_grid, "deviation grid");
            sub->add_option("--eta", o.eta, "eta in (0, 0.5)");
            sub->add_option("--k-start", o.k_start, "first lag of the phi sum");
        } else {
            sub->add_option("--epsilon", o.epsilon, "schedule epsilon");
        }
        experiments.push_back(sub);
    }

    app.add_subcommand("selftest", "run the built-in closed-form checks");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kExitOk;
        }
        err << "entrokit: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kExitValidation;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        if (name == "encode") return cmd_encode(o, out);
        if (name == "decode") return cmd_decode(o, out);
        if (name == "entropy") return cmd_entropy(o, out);
        if (name == "sigma") return cmd_sigma(o, out);
        if (name == "mixing") return cmd_mixing(o, out);
        if (name == "stability") return cmd_stability(o, out);
        if (name == "conditions") return cmd_conditions(o, out);
        if (name == "clt") return cmd_clt(o, out, err);
        if (name == "concentration") return cmd_concentration(o, out, err);
        if (name == "example1") return cmd_example1(o, out, err);
        if (name == "selftest") return run_selftest(out);
    } catch (const Error& e) {
        err << "entrokit: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "entrokit: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}

}  // namespace entrokit::cli
