#include "model_io.hpp"

#include <algorithm>
#include <set>

#include "entrokit/errors.hpp"
#include "report.hpp"

namespace entrokit::cli {

using nlohmann::json;

namespace {

const std::set<std::string> kMarkovKeys{"type", "id", "alphabet", "order", "transitions", "initial_law", "ergodic"};
const std::set<std::string> kHmmKeys{"type", "id", "alphabet", "hidden_kernel", "emissions"};
const std::set<std::string> kBlockwiseKeys{"type", "id", "alphabet", "epsilon", "tail_cap"};

void reject_unknown(const json& doc, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : doc.items()) {
        if (!allowed.count(key)) fail(ErrorKind::Validation, "/" + key + ": unknown key");
    }
}

double real_at(const json& v, const std::string& path) {
    if (!v.is_number()) fail(ErrorKind::Validation, path + ": must be a number");
    return v.get<double>();
}

std::vector<double> real_row(const json& v, const std::string& path) {
    if (!v.is_array()) fail(ErrorKind::Validation, path + ": must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(real_at(v[i], path + "/" + std::to_string(i)));
    return out;
}

std::vector<double> real_matrix(const json& v, const std::string& path, std::size_t rows, std::size_t cols) {
    if (!v.is_array() || v.size() != rows) {
        fail(ErrorKind::Validation, path + ": must hold " + std::to_string(rows) + " rows");
    }
    std::vector<double> out;
    for (std::size_t r = 0; r < rows; ++r) {
        const auto row = real_row(v[r], path + "/" + std::to_string(r));
        if (row.size() != cols) {
            fail(ErrorKind::Validation, path + "/" + std::to_string(r) + ": must hold " + std::to_string(cols) + " entries");
        }
        out.insert(out.end(), row.begin(), row.end());
    }
    return out;
}

Alphabet read_alphabet(const json& doc, bool required) {
    if (!doc.contains("alphabet")) {
        if (required) fail(ErrorKind::Validation, "/alphabet: required");
        return Alphabet::indices(2);
    }
    const auto& a = doc["alphabet"];
    if (!a.is_array()) fail(ErrorKind::Validation, "/alphabet: must be an array of labels");
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_string()) {
            labels.push_back(a[i].get<std::string>());
        } else if (a[i].is_number_integer()) {
            labels.push_back(std::to_string(a[i].get<long long>()));
        } else {
            fail(ErrorKind::Validation, "/alphabet/" + std::to_string(i) + ": must be a string");
        }
    }
    try {
        return Alphabet(std::move(labels));
    } catch (const Error& e) {
        fail(ErrorKind::Validation, std::string("/alphabet: ") + e.what());
    }
}

std::string context_key(const Alphabet& alphabet, const std::vector<Symbol>& ctx, bool compact) {
    std::string key;
    for (std::size_t i = 0; i < ctx.size(); ++i) {
        if (!compact && i > 0) key += ",";
        key += alphabet.label(ctx[i]);
    }
    return key;
}

LoadedModel parse_markov(const json& doc, const std::string& id) {
    reject_unknown(doc, kMarkovKeys);
    auto alphabet = read_alphabet(doc, true);
    const std::size_t l = alphabet.size();
    if (!doc.contains("order")) fail(ErrorKind::Validation, "/order: required");
    if (!is_non_negative_integer(doc["order"])) fail(ErrorKind::Validation, "/order: must be a non-negative integer");
    const auto m = doc["order"].get<std::size_t>();
    const ContextSpace ctx(l, m);
    if (!doc.contains("transitions")) fail(ErrorKind::Validation, "/transitions: required");
    const auto& t = doc["transitions"];
    std::vector<double> table;
    if (t.is_array()) {
        table = real_matrix(t, "/transitions", ctx.count(), l);
    } else if (t.is_object()) {
        bool compact = true;
        for (const auto& label : alphabet.labels()) compact = compact && label.size() == 1;
        if (t.size() != ctx.count()) {
            fail(ErrorKind::Validation, "/transitions: must hold one row per context (" + std::to_string(ctx.count()) + ")");
        }
        for (std::size_t c = 0; c < ctx.count(); ++c) {
            const auto key = context_key(alphabet, ctx.symbols(c), compact);
            if (!t.contains(key)) fail(ErrorKind::Validation, "/transitions: missing row for context \"" + key + "\"");
            const auto row = real_row(t[key], "/transitions/" + key);
            if (row.size() != l) fail(ErrorKind::Validation, "/transitions/" + key + ": must hold " + std::to_string(l) + " entries");
            table.insert(table.end(), row.begin(), row.end());
        }
    } else {
        fail(ErrorKind::Validation, "/transitions: must be an array of rows or an object keyed by context");
    }
    std::optional<std::vector<double>> initial;
    if (doc.contains("initial_law")) initial = real_row(doc["initial_law"], "/initial_law");
    bool ergodic = true;
    if (doc.contains("ergodic")) {
        if (!doc["ergodic"].is_boolean()) fail(ErrorKind::Validation, "/ergodic: must be a boolean");
        ergodic = doc["ergodic"].get<bool>();
    }
    return {"markov", doc, {}, MarkovModel::create(std::move(alphabet), m, std::move(table), std::move(initial), ergodic, id)};
}

LoadedModel parse_hmm(const json& doc, const std::string& id) {
    reject_unknown(doc, kHmmKeys);
    auto alphabet = read_alphabet(doc, true);
    if (!doc.contains("hidden_kernel")) fail(ErrorKind::Validation, "/hidden_kernel: required");
    if (!doc.contains("emissions")) fail(ErrorKind::Validation, "/emissions: required");
    const auto& q = doc["hidden_kernel"];
    if (!q.is_array() || q.empty()) fail(ErrorKind::Validation, "/hidden_kernel: must be a non-empty square matrix");
    const std::size_t H = q.size();
    auto kernel = real_matrix(q, "/hidden_kernel", H, H);
    auto emissions = real_matrix(doc["emissions"], "/emissions", H, alphabet.size());
    return {"hmm", doc, {}, HmmModel::create(std::move(alphabet), H, std::move(kernel), std::move(emissions), id)};
}

LoadedModel parse_blockwise(const json& doc, const std::string& id) {
    reject_unknown(doc, kBlockwiseKeys);
    if (doc.contains("alphabet")) {
        const auto a = read_alphabet(doc, false);
        if (a.size() != 2) fail(ErrorKind::Validation, "/alphabet: the blockwise process is binary");
    }
    if (!doc.contains("epsilon")) fail(ErrorKind::Validation, "/epsilon: required");
    const double eps = real_at(doc["epsilon"], "/epsilon");
    if (!(eps > 0.0 && eps < 1.0 / 6.0)) fail(ErrorKind::Validation, "/epsilon: epsilon must lie in (0, 1/6)");
    std::uint64_t cap = BlockwiseModel::kDefaultTailCap;
    if (doc.contains("tail_cap")) {
        if (!is_non_negative_integer(doc["tail_cap"]) || doc["tail_cap"].get<std::uint64_t>() == 0) {
            fail(ErrorKind::Validation, "/tail_cap: must be a positive integer");
        }
        cap = doc["tail_cap"].get<std::uint64_t>();
    }
    return {"blockwise", doc, {}, BlockwiseModel::create(eps, cap, id)};
}

}  // namespace

LoadedModel parse_model(const json& doc, const std::string& fallback_id) {
    if (!doc.is_object()) fail(ErrorKind::Validation, "model: must be a JSON object");
    if (!doc.contains("type") || !doc["type"].is_string()) fail(ErrorKind::Validation, "/type: required string");
    std::string id = fallback_id;
    if (doc.contains("id")) {
        if (!doc["id"].is_string()) fail(ErrorKind::Validation, "/id: must be a string");
        id = doc["id"].get<std::string>();
    }
    const auto type = doc["type"].get<std::string>();
    if (type == "markov") return parse_markov(doc, id);
    if (type == "hmm") return parse_hmm(doc, id);
    if (type == "blockwise") return parse_blockwise(doc, id);
    fail(ErrorKind::Validation, "/type: must be one of markov, hmm, blockwise");
}

LoadedModel load_model_file(const std::string& path) {
    std::string bytes;
    try {
        bytes = read_file(path);
    } catch (const std::exception& e) {
        fail(ErrorKind::Validation, e.what());
    }
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::Validation, path + ": " + e.what());
    }
    auto stem = std::filesystem::path(path).stem().string();
    auto loaded = parse_model(doc, stem);
    loaded.digest = sha256_hex(bytes);
    return loaded;
}

namespace {

std::vector<std::string> split_tokens(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace

Alphabet parse_alphabet_list(const std::string& list) {
    std::vector<std::string> labels;
    for (const auto& t : split_tokens(list, ',')) labels.push_back(trim(t));
    try {
        return Alphabet(std::move(labels));
    } catch (const Error& e) {
        fail(ErrorKind::Validation, std::string("--alphabet: ") + e.what());
    }
}

ParsedSequence parse_sequence_text(const std::string& text, const std::optional<Alphabet>& alphabet) {
    std::vector<std::string> lines;
    for (const auto& line : split_tokens(text, '\n')) {
        auto t = trim(line);
        if (!t.empty()) lines.push_back(std::move(t));
    }
    bool single_char = true;
    if (alphabet) {
        for (const auto& label : alphabet->labels()) single_char = single_char && label.size() == 1;
    }
    std::vector<std::string> tokens;
    if (lines.size() == 1 && single_char && (alphabet || lines[0].size() > 1)) {
        for (char ch : lines[0]) tokens.emplace_back(1, ch);
    } else {
        tokens = std::move(lines);
    }
    std::vector<Symbol> data;
    data.reserve(tokens.size());
    if (alphabet) {
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            const auto s = alphabet->index_of(tokens[i]);
            if (!s) fail(ErrorKind::Validation, "symbol " + std::to_string(i) + " (\"" + tokens[i] + "\") is not in the alphabet");
            data.push_back(*s);
        }
        return {*alphabet, SymbolSequence(alphabet->size(), std::move(data))};
    }
    std::size_t largest = 1;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        const bool digits = !t.empty() && t.size() <= 3 && t.find_first_not_of("0123456789") == std::string::npos;
        const int v = digits ? std::stoi(t) : -1;
        if (v < 0 || v >= static_cast<int>(kMaxAlphabet)) {
            fail(ErrorKind::Validation, "symbol " + std::to_string(i) + " (\"" + t + "\") is not an integer label in 0..254; pass --alphabet");
        }
        data.push_back(static_cast<Symbol>(v));
        largest = std::max<std::size_t>(largest, static_cast<std::size_t>(v));
    }
    auto inferred = Alphabet::indices(largest + 1);
    return {inferred, SymbolSequence(inferred.size(), std::move(data))};
}

std::string format_sequence_text(const SymbolSequence& seq, const Alphabet& alphabet) {
    bool compact = true;
    for (const auto& label : alphabet.labels()) compact = compact && label.size() == 1;
    std::string out;
    for (Symbol s : seq.symbols()) {
        out += alphabet.label(s);
        if (!compact) out += '\n';
    }
    if (compact) out += '\n';
    return out;
}

}  // namespace entrokit::cli
