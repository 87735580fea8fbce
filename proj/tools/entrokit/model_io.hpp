#pragma once

#include <optional>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "entrokit/models.hpp"

namespace entrokit::cli {

using AnyModel = std::variant<MarkovModel, HmmModel, BlockwiseModel>;

struct LoadedModel {
    std::string kind;        // "markov", "hmm", "blockwise"
    nlohmann::json document; // as read
    std::string digest;      // sha256 of the file bytes, empty when parsed from memory
    AnyModel model;

    const MarkovModel* markov() const { return std::get_if<MarkovModel>(&model); }
    const HmmModel* hmm() const { return std::get_if<HmmModel>(&model); }
    const BlockwiseModel* blockwise() const { return std::get_if<BlockwiseModel>(&model); }
};

/// Model file schema:
///   {"type": "markov", "id": ..., "alphabet": [...], "order": m,
///    "transitions": [[row], ...] or {"<context>": [row], ...},
///    "initial_law": [...], "ergodic": true}
///   {"type": "hmm", "alphabet": [...], "hidden_kernel": [[...]], "emissions": [[...]]}
///   {"type": "blockwise", "epsilon": e, "tail_cap": T}
/// Context keys are the context's labels joined by "," or, when every label
/// is a single character, concatenated. Throws Error(Validation) naming the
/// field.
LoadedModel parse_model(const nlohmann::json& doc, const std::string& fallback_id = {});
LoadedModel load_model_file(const std::string& path);

/// Sequence text: one label per line, or a single line of one-character
/// labels. Without an alphabet the labels must be integers 0..254 and l is
/// max(2, largest + 1).
struct ParsedSequence {
    Alphabet alphabet;
    SymbolSequence sequence;
};
ParsedSequence parse_sequence_text(const std::string& text, const std::optional<Alphabet>& alphabet);
/// Inverse of parse_sequence_text: compact when every label is one character.
std::string format_sequence_text(const SymbolSequence& seq, const Alphabet& alphabet);
/// "a,b,c" to an Alphabet.
Alphabet parse_alphabet_list(const std::string& list);

}  // namespace entrokit::cli
