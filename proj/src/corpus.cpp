#include "paraverify/corpus.hpp"

#include <stdexcept>
#include <string>

namespace paraverify {

std::vector<std::string_view> corpusNames() {
  std::vector<std::string_view> out;
  for (const auto& [name, src] : detail::corpusSources()) out.push_back(name);
  return out;
}

std::optional<std::string_view> corpusSource(std::string_view name) {
  for (const auto& [n, src] : detail::corpusSources())
    if (n == name) return src;
  return std::nullopt;
}

std::shared_ptr<const ProtocolSpec> loadCorpus(std::string_view name) {
  auto src = corpusSource(name);
  if (!src) throw std::out_of_range("no bundled protocol named '" + std::string(name) + "'");
  return std::make_shared<const ProtocolSpec>(parseProtocol(*src, std::string(name)));
}

}  // namespace paraverify
