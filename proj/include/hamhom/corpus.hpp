#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hamhom/hamiltonian.hpp"

namespace hamhom {

// One built-in model problem: either a full Hamiltonian or a front-speed
// graph equation, never both.
struct CorpusEntry {
    std::string name;
    std::string summary;
    std::optional<HamiltonianSpec> spec;
    std::optional<GraphSpec> graph;
};

// The built-in model problems, in a fixed order.
const std::vector<CorpusEntry>& corpus();

// Lookup by name; throws ConfigError listing the known names on a miss or a
// kind mismatch.
const CorpusEntry& corpus_entry(std::string_view name);
const HamiltonianSpec& corpus_spec(std::string_view name);
const GraphSpec& corpus_graph(std::string_view name);

} // namespace hamhom
