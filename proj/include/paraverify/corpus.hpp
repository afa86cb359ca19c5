#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "paraverify/protocol.hpp"

namespace paraverify {

namespace detail {
const std::vector<std::pair<std::string_view, std::string_view>>& corpusSources();
}

// Names of the bundled protocols, sorted.
std::vector<std::string_view> corpusNames();

std::optional<std::string_view> corpusSource(std::string_view name);

// Parses a bundled protocol; throws std::out_of_range for unknown names.
std::shared_ptr<const ProtocolSpec> loadCorpus(std::string_view name);

}  // namespace paraverify
