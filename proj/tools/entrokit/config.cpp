#include "config.hpp"

#include <cmath>
#include <functional>
#include <optional>

#include "entrokit/type_coder.hpp"
#include "report.hpp"

namespace entrokit::cli {

using nlohmann::json;

namespace {

enum class Kind { Count, Seed, Real, Bool, CountList, RealList };

// Returns a constraint message when the (type-checked) value is out of range.
using Check = std::function<std::optional<std::string>(const json&)>;

struct Field {
    std::string name;
    Kind kind;
    json fallback;
    Check check;
};

std::optional<std::string> type_error(Kind kind, const json& v) {
    switch (kind) {
        case Kind::Count:
            if (!is_non_negative_integer(v) || v.get<std::uint64_t>() == 0) return "must be a positive integer";
            return std::nullopt;
        case Kind::Seed:
            if (!is_non_negative_integer(v)) return "must be a non-negative integer";
            return std::nullopt;
        case Kind::Real:
            if (!v.is_number() || !std::isfinite(v.get<double>())) return "must be a finite number";
            return std::nullopt;
        case Kind::Bool:
            if (!v.is_boolean()) return "must be a boolean";
            return std::nullopt;
        case Kind::CountList:
            if (!v.is_array() || v.empty()) return "must be a non-empty array of positive integers";
            for (const auto& e : v) {
                if (!is_non_negative_integer(e) || e.get<std::uint64_t>() == 0) return "must be a non-empty array of positive integers";
            }
            return std::nullopt;
        case Kind::RealList:
            if (!v.is_array() || v.empty()) return "must be a non-empty array of numbers";
            for (const auto& e : v) {
                if (!e.is_number() || !std::isfinite(e.get<double>())) return "must be a non-empty array of numbers";
            }
            return std::nullopt;
    }
    return std::nullopt;
}

Check open_interval(double lo, double hi, std::string text) {
    return [=](const json& v) -> std::optional<std::string> {
        const double x = v.get<double>();
        if (x > lo && x < hi) return std::nullopt;
        return text;
    };
}

std::optional<std::string> length_guard(const json& v) {
    for (const auto& e : v) {
        if (e.get<std::uint64_t>() > kMaxCodecLength) return "entries must not exceed 2^28";
    }
    return std::nullopt;
}

std::vector<Field> schema(const std::string& command) {
    const Check none = [](const json&) -> std::optional<std::string> { return std::nullopt; };
    if (command == "clt") {
        const CltParams d;
        return {
            {"n_grid", Kind::CountList, d.n_grid, length_guard},
            {"reps", Kind::Count, d.reps, none},
            {"seed", Kind::Seed, d.seed, none},
            {"schedule", Kind::Bool, d.schedule, none},
            {"epsilon", Kind::Real, d.epsilon, open_interval(0.0, 0.5, "epsilon must lie in (0, 1/2)")},
        };
    }
    if (command == "concentration") {
        const ConcentrationParams d;
        return {
            {"n", Kind::Count, d.n,
             [](const json& v) -> std::optional<std::string> {
                 if (v.get<std::uint64_t>() > kMaxCodecLength) return "must not exceed 2^28";
                 return std::nullopt;
             }},
            {"t_grid", Kind::RealList, d.t_grid,
             [](const json& v) -> std::optional<std::string> {
                 for (const auto& e : v) {
                     if (!(e.get<double>() > 0.0)) return "entries must be positive";
                 }
                 return std::nullopt;
             }},
            {"reps", Kind::Count, d.reps, none},
            {"seed", Kind::Seed, d.seed, none},
            {"eta", Kind::Real, d.eta, open_interval(0.0, 0.5, "eta must lie in (0, 0.5)")},
            {"k_start", Kind::Seed, d.k_start,
             [](const json& v) -> std::optional<std::string> {
                 if (v.get<std::uint64_t>() > 1) return "k_start must be 0 or 1";
                 return std::nullopt;
             }},
            {"tol", Kind::Real, d.tol,
             [](const json& v) -> std::optional<std::string> {
                 if (!(v.get<double>() > 0.0)) return "tol must be positive";
                 return std::nullopt;
             }},
        };
    }
    if (command == "example1") {
        const Example1Params d;
        return {
            {"epsilon", Kind::Real, d.epsilon, open_interval(0.0, 1.0 / 6.0, "epsilon must lie in (0, 1/6)")},
            {"n_grid", Kind::CountList, d.n_grid, length_guard},
            {"reps", Kind::Count, d.reps, none},
            {"seed", Kind::Seed, d.seed, none},
            {"tail_cap", Kind::Count, d.tail_cap, none},
            {"control", Kind::Bool, d.control, none},
        };
    }
    return {};
}

}  // namespace

ConfigResult validate_config(const std::string& command, const json& doc) {
    ConfigResult out;
    const auto fields = schema(command);
    if (fields.empty()) {
        out.errors.push_back("command: no configuration schema for \"" + command + "\"");
        return out;
    }
    if (!doc.is_object()) {
        out.errors.push_back("/: must be a JSON object");
        return out;
    }
    for (const auto& [key, value] : doc.items()) {
        bool known = false;
        for (const auto& f : fields) known = known || f.name == key;
        if (!known) out.errors.push_back("/" + key + ": unknown key");
    }
    out.normalized = json::object();
    for (const auto& f : fields) {
        if (!doc.contains(f.name)) {
            out.normalized[f.name] = f.fallback;
            continue;
        }
        const auto& v = doc[f.name];
        if (auto e = type_error(f.kind, v)) {
            out.errors.push_back("/" + f.name + ": " + *e);
        } else if (auto c = f.check(v)) {
            out.errors.push_back("/" + f.name + ": " + *c);
        } else {
            out.normalized[f.name] = v;
        }
    }
    return out;
}

CltParams clt_params(const json& c) {
    CltParams p;
    p.n_grid = c.at("n_grid").get<std::vector<std::size_t>>();
    p.reps = c.at("reps").get<std::size_t>();
    p.seed = c.at("seed").get<std::uint64_t>();
    p.schedule = c.at("schedule").get<bool>();
    p.epsilon = c.at("epsilon").get<double>();
    return p;
}

ConcentrationParams concentration_params(const json& c) {
    ConcentrationParams p;
    p.n = c.at("n").get<std::size_t>();
    p.t_grid = c.at("t_grid").get<std::vector<double>>();
    p.reps = c.at("reps").get<std::size_t>();
    p.seed = c.at("seed").get<std::uint64_t>();
    p.eta = c.at("eta").get<double>();
    p.k_start = c.at("k_start").get<std::size_t>();
    p.tol = c.at("tol").get<double>();
    return p;
}

Example1Params example1_params(const json& c) {
    Example1Params p;
    p.epsilon = c.at("epsilon").get<double>();
    p.n_grid = c.at("n_grid").get<std::vector<std::size_t>>();
    p.reps = c.at("reps").get<std::size_t>();
    p.seed = c.at("seed").get<std::uint64_t>();
    p.tail_cap = c.at("tail_cap").get<std::uint64_t>();
    p.control = c.at("control").get<bool>();
    return p;
}

}  // namespace entrokit::cli
