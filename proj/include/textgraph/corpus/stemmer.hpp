#pragma once

#include <string>
#include <string_view>

namespace textgraph::corpus {

/// Porter (1980) suffix stripper with the departures of Martin Porter's
/// reference C implementation ("bli" -> "ble", "logi" -> "log"; words of one
/// or two letters are returned unchanged). Input must be lowercase ASCII.
std::string porter_stem(std::string_view word);

/// Snowball English ("Porter2") stemmer, including its exceptional-forms
/// table. Input must be lowercase ASCII.
std::string snowball_stem(std::string_view word);

/// Stem used by the preprocessor. One step is Porter, or Snowball when Porter
/// leaves the word unchanged; steps repeat until the word is a fixed point, so
/// normalize_stem(normalize_stem(w)) == normalize_stem(w).
std::string normalize_stem(std::string_view word);

}  // namespace textgraph::corpus
