#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "scdiff/config.hpp"
#include "scdiff/search.hpp"

namespace scdiff {

inline constexpr std::string_view kSearchSchema = "scdiff-search/1";

nlohmann::json to_json(const BoTrace& trace);
nlohmann::json to_json(const SpsaTrace& trace);
nlohmann::json to_json(const EvalResult& result);

/// Full search document: schema tag, result, both traces, budget
/// breakdown and the config snapshot that produced it.
nlohmann::json to_json(const SearchResult& result, const RunConfig& config);

/// Pretty-printed with a trailing newline. Doubles use the shortest
/// representation that round-trips.
std::string dump(const nlohmann::json& doc);

/// Structural check of a search document (schema tag, required fields,
/// types, config snapshot). Throws ConfigError describing the first problem.
void validate_search_document(const nlohmann::json& doc);

}  // namespace scdiff
